"""Empirical operator norms: the largest output/input norm ratio over a field bank.

These are lower bounds for the true operator norms, since the bank is finite
and every norm is a maximum over a finite ball family.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

from src.core.fields import BallFamily, SampledField
from src.core.growth import Constant, GrowthFunction
from src.core.norms import campanato_norm, campanato_p, om_norm
from src.core.reports import RatioReport
from src.core.young import YoungFunction
from src.harness.bank import BankEntry

logger = logging.getLogger(__name__)

NORM_KINDS = ("om", "campanato", "campanato_p")


@dataclass(frozen=True)
class NormSpec:
    """Which sup-over-balls norm to measure with: om and campanato use (Φ, φ), campanato_p uses (p, ψ)."""

    kind: str
    phi_Y: Optional[YoungFunction] = None
    weight: Optional[GrowthFunction] = None
    p: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in NORM_KINDS:
            raise ValueError(f"Unknown norm kind: {self.kind}")
        if self.kind != "campanato_p" and (self.phi_Y is None or self.weight is None):
            raise ValueError(f"Norm {self.kind} needs a Young function and a growth function")

    def value(self, f: SampledField, balls: BallFamily) -> float:
        if self.kind == "om":
            return om_norm(f, self.phi_Y, self.weight, balls).value
        if self.kind == "campanato":
            return campanato_norm(f, self.phi_Y, self.weight, balls).value
        return campanato_p(f, self.p, self.weight or Constant(1.0), balls).value

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind}
        if self.phi_Y is not None:
            data["phi"] = self.phi_Y.to_dict()
        if self.weight is not None:
            data["weight"] = self.weight.to_dict()
        if self.kind == "campanato_p":
            data["p"] = self.p
        return data


def empirical_norm(
    op: Callable[[SampledField], SampledField],
    bank: List[BankEntry],
    in_norm: NormSpec,
    out_norm: NormSpec,
    balls: BallFamily,
) -> RatioReport:
    """max over the bank of out_norm(op f) / in_norm(f); fields with zero input norm are skipped."""
    if not bank:
        raise ValueError("Empirical norm needs a nonempty field bank")

    ratios: Dict[str, float] = {}
    best, best_name = 0.0, None
    for entry in bank:
        denominator = in_norm.value(entry.field, balls)
        if denominator == 0.0:
            logger.debug("Skipping %s: zero input norm", entry.name)
            continue
        ratio = out_norm.value(op(entry.field), balls) / denominator
        ratios[entry.name] = ratio
        if ratio > best or best_name is None:
            best, best_name = ratio, entry.name
    if math.isinf(best):
        logger.warning("Empirical norm is infinite at %s", best_name)
    return RatioReport(best, best_name, ratios)
