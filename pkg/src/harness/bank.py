"""Deterministic field banks the properties are checked against."""

import logging
from typing import List, NamedTuple, Optional

from src.core.fields import (
    Affine,
    FieldSpec,
    Indicator,
    LogAbs,
    Oscillatory,
    PowerSingular,
    RadialPower,
    RandomStep,
    Ramp,
    SampledField,
    Window,
)
from src.core.growth import GrowthFunction

logger = logging.getLogger(__name__)


class BankEntry(NamedTuple):
    name: str
    spec: FieldSpec
    field: SampledField


def entry_name(spec: FieldSpec) -> str:
    params = spec.to_dict().get("params", {})
    scalars = [f"{k}={v}" for k, v in sorted(params.items()) if isinstance(v, (int, float, str))]
    return f"{spec.family}({', '.join(scalars)})"


def default_specs(n: int, seed: int) -> List[FieldSpec]:
    """Indicators at three scales, two singular powers, two oscillations, four random steps and one mix."""
    specs: List[FieldSpec] = [
        Indicator(0.5),
        Indicator(1.0),
        Indicator(2.0),
        PowerSingular(0.25 * n),
        PowerSingular(0.5 * n),
        Oscillatory(2.0),
        Oscillatory(8.0),
    ]
    specs.extend(RandomStep(seed + i) for i in range(4))
    specs.append(Affine(((1.0, Indicator(1.0)), (0.5, Oscillatory(2.0)))))
    return specs


def default_b_specs(psi: Optional[GrowthFunction] = None) -> List[FieldSpec]:
    """Ramp, clipped log and |x|^β with β taken from ψ = c·r^β when it is a positive power."""
    beta = 0.5
    law = psi.power_law() if psi is not None else None
    if law is not None and 0.0 < law[1] <= 1.0:
        beta = law[1]
    return [Ramp(2.0), LogAbs(), RadialPower(beta)]


def build_bank(window: Window, specs: List[FieldSpec]) -> List[BankEntry]:
    entries = []
    for spec in specs:
        entries.append(BankEntry(entry_name(spec), spec, spec.sample(window)))
    logger.debug("Bank of %d fields on N=%d", len(entries), window.N)
    return entries


def random_steps(window: Window, count: int, seed: int, depth: int = 3) -> List[BankEntry]:
    """count RandomStep fields with consecutive seeds starting at seed."""
    depth = min(depth, window.N.bit_length() - 1)
    return build_bank(window, [RandomStep(seed + i, depth) for i in range(count)])
