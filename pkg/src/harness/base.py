import logging
import math
from abc import ABC, abstractmethod
from functools import cached_property
from typing import Any, Callable, ClassVar, Dict, List, NamedTuple, Optional, Type, Union

import numpy as np

from src.config.config import SETTINGS, ExperimentConfig
from src.core.fields import BallBlock, BallFamily, Window, ball_family
from src.core.growth import GrowthFunction
from src.core.operators import KernelSpec
from src.core.young import YoungFunction
from src.harness.bank import BankEntry, build_bank, default_b_specs, default_specs

logger = logging.getLogger(__name__)


class CheckOutcome(NamedTuple):
    """Result of one property at one refinement level."""

    holds: bool
    worst_ratio: float
    witness: Optional[Dict[str, Any]]
    details: Dict[str, Any] = {}


class Worst:
    """Running maximum of a ratio together with the witness that attained it."""

    def __init__(self) -> None:
        self.ratio = -math.inf
        self.witness: Optional[Dict[str, Any]] = None

    def update(self, ratio: float, witness: Union[Dict[str, Any], Callable[[], Dict[str, Any]]]) -> None:
        ratio = math.inf if math.isnan(ratio) else float(ratio)
        if ratio > self.ratio or self.witness is None:
            self.ratio = ratio
            self.witness = witness() if callable(witness) else witness

    def update_array(self, ratios: np.ndarray, witness: Callable[[int], Dict[str, Any]]) -> None:
        """Folds in a vector of ratios; witness(i) describes entry i."""
        if ratios.size == 0:
            return
        ratios = np.where(np.isnan(ratios), np.inf, ratios)
        i = int(np.argmax(ratios))
        self.update(float(ratios[i]), lambda: witness(i))

    @property
    def value(self) -> float:
        return max(self.ratio, 0.0)

    def outcome(
        self,
        bound: float = math.inf,
        details: Optional[Dict[str, Any]] = None,
        holds: Optional[bool] = None,
    ) -> CheckOutcome:
        if holds is None:
            holds = self.value <= bound
        return CheckOutcome(bool(holds), self.value, self.witness, details or {})


def ball_witness(balls: BallFamily, block: BallBlock, i: int, **extra: Any) -> Dict[str, Any]:
    ball = balls.ball(block.rung, block.centers[i])
    return {**extra, "ball": {**ball.to_dict(), "rung": block.rung}}


class PropertyContext:
    """Everything a property needs at one grid size; fields and balls are built lazily."""

    def __init__(self, config: ExperimentConfig, N: int, levels: Optional[List[int]] = None):
        self.config = config
        self.N = N
        self.levels = list(levels or config.window.levels)
        self.window: Window = config.window.window(N)
        self.tolerances = config.tolerances

    @property
    def n(self) -> int:
        return self.window.n

    @property
    def finest(self) -> bool:
        """True at the last refinement level of the run."""
        return self.N == max(self.levels)

    @property
    def seed(self) -> int:
        return self.config.seed

    @cached_property
    def balls(self) -> BallFamily:
        return ball_family(self.window, self.config.balls.policy())

    @cached_property
    def bank(self) -> List[BankEntry]:
        specs = self.config.bank.fields
        if specs is None:
            specs = default_specs(self.n, self.seed)
        return build_bank(self.window, specs)

    @cached_property
    def b_bank(self) -> List[BankEntry]:
        specs = self.config.bank.b_fields
        if specs is None:
            specs = default_b_specs(self.config.growth.get("psi"))
        return build_bank(self.window, specs)

    def young(self, key: str, default: Optional[YoungFunction] = None) -> YoungFunction:
        value = self.config.young.get(key, default)
        if value is None:
            raise ValueError(f"Experiment {self.config.name} needs Young function {key}")
        return value

    def growth(self, key: str, default: Optional[GrowthFunction] = None) -> GrowthFunction:
        value = self.config.growth.get(key, default)
        if value is None:
            raise ValueError(f"Experiment {self.config.name} needs growth function {key}")
        return value

    def param(self, key: str, default: Any = None) -> Any:
        return self.config.params.get(key, default)

    def setting(self, section: str, key: str, default: Any = None) -> Any:
        """Experiment params override library settings of the same key."""
        if key in self.config.params:
            return self.config.params[key]
        return SETTINGS.get(section, key, default)

    def kernel(self) -> KernelSpec:
        """Configured kernel, else Hilbert in one dimension and Riesz_1 in two."""
        if self.config.kernel is not None:
            return self.config.kernel
        return KernelSpec("Hilbert") if self.n == 1 else KernelSpec("Riesz", 1)

    @property
    def cap(self) -> float:
        return self.tolerances.cap

    @property
    def r_grid(self) -> np.ndarray:
        lo, hi = SETTINGS.get("grids", "r_exponents", [-20, 20])
        return 2.0 ** np.arange(lo, hi + 1, dtype=float)


class PropertyCheck(ABC):
    """One named inequality or identity, evaluated at a single refinement level."""

    name: ClassVar[str] = ""
    description: ClassVar[str] = ""
    # False: grid-independent, evaluated once
    refine: ClassVar[bool] = True
    # True: the ratio is the round-off error of an identity; no stability requirement
    exact: ClassVar[bool] = False
    stability_key: ClassVar[str] = "stability"

    @abstractmethod
    def check(self, ctx: PropertyContext) -> CheckOutcome:
        pass


PROPERTY_REGISTRY: Dict[str, Type[PropertyCheck]] = {}


def register(cls: Type[PropertyCheck]) -> Type[PropertyCheck]:
    if not cls.name:
        raise ValueError(f"{cls.__name__} has no property name")
    PROPERTY_REGISTRY[cls.name] = cls
    return cls


def get_property(name: str) -> PropertyCheck:
    if name not in PROPERTY_REGISTRY:
        raise ValueError(f"Unknown property: {name}")
    return PROPERTY_REGISTRY[name]()
