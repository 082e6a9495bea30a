from typing import Any, Dict, List, NamedTuple, Optional


class ConditionReport(NamedTuple):
    """Verdict of a scanned hypothesis: the max of its defining ratio over a grid."""

    holds: bool
    best_constant: float
    witness: Any
    grid: Dict[str, Any]
    details: Dict[str, Any] = {}


class FlagResult(NamedTuple):
    holds: bool
    constant: float


class ClassReport(NamedTuple):
    in_Gdec: FlagResult
    in_Ginc: FlagResult
    doubling: FlagResult
    almost_increasing: FlagResult
    almost_decreasing: FlagResult
    grid: Dict[str, Any]


class NormResult(NamedTuple):
    value: float
    attaining_ball: Optional[Dict[str, Any]] = None
    bisection_iterations: int = 0
    family: Optional[Dict[str, Any]] = None


class RatioReport(NamedTuple):
    ratio: float
    field_id: Optional[str]
    ratios: Dict[str, float]


class PropertyReport(NamedTuple):
    name: str
    verdict: str
    worst_ratio: float
    witness: Optional[Dict[str, Any]]
    trend: Dict[int, float]
    details: Dict[str, Any] = {}
    seconds: Dict[int, float] = {}

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def geometric_grid_info(grid: List[float], label: str = "r") -> Dict[str, Any]:
    return {
        "variable": label,
        "kind": "geometric",
        "min": float(min(grid)),
        "max": float(max(grid)),
        "size": len(grid),
    }
