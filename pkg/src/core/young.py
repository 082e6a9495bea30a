"""Young functions on the extended half-line [0, ∞].

Every family is an immutable dataclass. Values are computed on numpy arrays
with the conventions Φ(0) = 0, Φ(t) = ∞ for t > b(Φ) and Φ(∞) = ∞.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Any, ClassVar, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.reports import ConditionReport, geometric_grid_info

logger = logging.getLogger(__name__)

INVERSE_REL_TOL = 1e-12
BRACKET_CAP = 2.0**512
HULL_NODES = 2048
HULL_RANGE = (2.0**-40, 2.0**40)
EXP_TABLE_MAX = 700.0

DEFAULT_T_GRID = 2.0 ** np.arange(-20, 21)
DEFAULT_K_GRID = 2.0 ** (np.arange(1, 17) / 4.0)
DELTA2_CAP = 1e6
NABLA2_SLACK = 1e-12

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _as_array(x: ArrayLike) -> np.ndarray:
    return np.asarray(x, dtype=float)


def _parse_extended(value: Any) -> float:
    if value is None:
        return math.inf
    if isinstance(value, str):
        return float(value.replace("∞", "inf"))
    return float(value)


def _format_extended(value: float) -> Union[float, str]:
    return "inf" if math.isinf(value) else float(value)


class YoungFunction(ABC):
    family: ClassVar[str] = ""

    @property
    def a_phi(self) -> float:
        """sup{t: Φ(t) = 0}."""
        return 0.0

    @property
    def b_phi(self) -> float:
        """inf{t: Φ(t) = ∞}."""
        return math.inf

    @abstractmethod
    def _finite_eval(self, t: np.ndarray) -> np.ndarray:
        """Φ on finite t in [0, b(Φ)]."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    def evaluate(self, t: ArrayLike) -> np.ndarray:
        t = _as_array(t)
        if np.any(t < 0):
            raise ValueError("Young functions are evaluated on t >= 0")
        out = np.full(t.shape, np.inf)
        inside = np.isfinite(t) & (t <= self.b_phi)
        if np.any(inside):
            with np.errstate(over="ignore"):
                out[inside] = self._finite_eval(t[inside])
        return out

    def inverse(self, u: ArrayLike) -> np.ndarray:
        return _bisect_inverse(self, u)

    def homogeneity(self) -> Optional[Tuple[float, float]]:
        """(k, p) with Φ(t) = (k·t)^p, or None."""
        return None

    def __call__(self, t: ArrayLike) -> np.ndarray:
        return self.evaluate(t)


def _check_u(u: np.ndarray) -> None:
    if np.any(u < 0):
        raise ValueError("Generalized inverse is defined for u >= 0")


def _bisect_inverse(phi: YoungFunction, u: ArrayLike) -> np.ndarray:
    """inf{t >= 0: Φ(t) > u}, bracketing by doubling from t = 1."""
    u = _as_array(u)
    _check_u(u)
    out = np.full(u.shape, np.inf)
    out[u == 0] = phi.a_phi

    todo = np.isfinite(u) & (u > 0)
    if not np.any(todo):
        return out
    uu = u[todo]

    hi = np.ones_like(uu)
    while True:
        low = phi.evaluate(hi) <= uu
        low &= hi < BRACKET_CAP
        if not np.any(low):
            break
        hi[low] *= 2.0
    unbounded = phi.evaluate(hi) <= uu
    lo = np.where(hi > 1.0, hi / 2.0, 0.0)

    for _ in range(2000):
        active = (hi - lo) > INVERSE_REL_TOL * hi
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        above = phi.evaluate(mid) > uu
        hi = np.where(active & above, mid, hi)
        lo = np.where(active & ~above, mid, lo)

    hi[unbounded] = np.inf
    out[todo] = hi
    return out


def lower_convex_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the greatest convex minorant of the points (x_i, y_i), x ascending."""
    hull = []
    for i in range(len(x)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            if (y[i1] - y[i0]) * (x[i] - x[i0]) >= (y[i] - y[i0]) * (x[i1] - x[i0]):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=int)


@dataclass(frozen=True)
class Power(YoungFunction):
    p: float
    family: ClassVar[str] = "Power"

    def __post_init__(self) -> None:
        if not self.p >= 1.0:
            raise ValueError(f"Power exponent must be >= 1, got {self.p}")

    def _finite_eval(self, t: np.ndarray) -> np.ndarray:
        return t**self.p

    def inverse(self, u: ArrayLike) -> np.ndarray:
        u = _as_array(u)
        _check_u(u)
        return u ** (1.0 / self.p)

    def homogeneity(self) -> Optional[Tuple[float, float]]:
        return 1.0, self.p

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"p": self.p}}


@dataclass(frozen=True)
class PowerLog(YoungFunction):
    """t^p (log(e + t))^q, replaced by its convex minorant on a log grid."""

    p: float
    q: float
    family: ClassVar[str] = "PowerLog"

    def __post_init__(self) -> None:
        if not self.p >= 1.0:
            raise ValueError(f"PowerLog exponent must be >= 1, got {self.p}")
        if self.p == 1.0 and self.q < 0:
            raise ValueError("PowerLog with p = 1 and q < 0 is not equivalent to a Young function")

    def raw(self, t: np.ndarray) -> np.ndarray:
        t = _as_array(t)
        with np.errstate(over="ignore"):
            return t**self.p * np.log(np.e + t) ** self.q

    @cached_property
    def hull(self) -> Tuple[np.ndarray, np.ndarray]:
        nodes = np.concatenate([[0.0], np.geomspace(*HULL_RANGE, HULL_NODES)])
        values = self.raw(nodes)
        keep = lower_convex_hull(nodes, values)
        logger.debug("PowerLog(%g, %g) hull keeps %d of %d nodes", self.p, self.q, len(keep), len(nodes))
        return nodes[keep], values[keep]

    @cached_property
    def equivalence_constant(self) -> float:
        """max raw/hull over the grid; Φ ≤ raw ≤ C·Φ there."""
        nodes = np.geomspace(*HULL_RANGE, HULL_NODES)
        hn, hv = self.hull
        return float(np.max(self.raw(nodes) / np.interp(nodes, hn, hv)))

    def _finite_eval(self, t: np.ndarray) -> np.ndarray:
        hn, hv = self.hull
        out = np.interp(t, hn, hv)
        above = t > hn[-1]
        if np.any(above):
            out[above] = self.raw(t[above]) * (hv[-1] / self.raw(hn[-1]))
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"p": self.p, "q": self.q}}


@dataclass(frozen=True)
class ExpMinusOne(YoungFunction):
    family: ClassVar[str] = "ExpMinusOne"

    def _finite_eval(self, t: np.ndarray) -> np.ndarray:
        return np.expm1(t)

    def inverse(self, u: ArrayLike) -> np.ndarray:
        u = _as_array(u)
        _check_u(u)
        return np.log1p(u)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {}}


@dataclass(frozen=True)
class LinearCap(YoungFunction):
    """t on [0, 1], ∞ beyond."""

    family: ClassVar[str] = "LinearCap"

    @property
    def b_phi(self) -> float:
        return 1.0

    def _finite_eval(self, t: np.ndarray) -> np.ndarray:
        return t.copy()

    def inverse(self, u: ArrayLike) -> np.ndarray:
        u = _as_array(u)
        _check_u(u)
        return np.minimum(u, 1.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {}}


@dataclass(frozen=True)
class PiecewiseLinearConvex(YoungFunction):
    """Linear interpolation of (t_i, Φ(t_i)) from (0, 0), last slope continued up to b."""

    breakpoints: Tuple[Tuple[float, float], ...]
    b: float = math.inf
    family: ClassVar[str] = "PiecewiseLinearConvex"

    def __post_init__(self) -> None:
        points = tuple((float(t), float(v)) for t, v in self.breakpoints)
        object.__setattr__(self, "breakpoints", points)
        object.__setattr__(self, "b", _parse_extended(self.b))

        if len(points) < 2:
            raise ValueError("PiecewiseLinearConvex needs at least two breakpoints")
        if points[0] != (0.0, 0.0):
            raise ValueError(f"First breakpoint must be (0, 0), got {points[0]}")
        t = self.nodes
        if np.any(np.diff(t) <= 0):
            raise ValueError("Breakpoints must be strictly ascending in t")
        slopes = self.slopes
        if np.any(slopes < 0):
            raise ValueError("Breakpoint values must be nondecreasing")
        tol = 1e-9 * np.maximum(1.0, np.abs(slopes[:-1]))
        if np.any(np.diff(slopes) < -tol):
            raise ValueError("Slopes must be nondecreasing (convexity)")
        if self.b < t[-1]:
            raise ValueError(f"b_phi={self.b} lies before the last breakpoint {t[-1]}")
        if math.isinf(self.b) and slopes[-1] <= 0:
            raise ValueError("Last slope must be positive when b_phi is infinite")

    @property
    def nodes(self) -> np.ndarray:
        return np.array([t for t, _ in self.breakpoints])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.breakpoints])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.nodes)

    @property
    def a_phi(self) -> float:
        v = self.values
        last_zero = int(np.nonzero(v == 0.0)[0][-1])
        if last_zero == len(v) - 1:
            return self.b
        return float(self.nodes[last_zero])

    @property
    def b_phi(self) -> float:
        return self.b

    def _finite_eval(self, t: np.ndarray) -> np.ndarray:
        tn, vn = self.nodes, self.values
        out = np.interp(t, tn, vn)
        beyond = t > tn[-1]
        if np.any(beyond):
            out[beyond] = vn[-1] + self.slopes[-1] * (t[beyond] - tn[-1])
        return out

    def inverse(self, u: ArrayLike) -> np.ndarray:
        u = _as_array(u)
        _check_u(u)
        tn, vn = self.nodes, self.values
        slopes = np.append(self.slopes, self.slopes[-1])

        finite = np.isfinite(u)
        uu = np.where(finite, u, 0.0)
        i = np.searchsorted(vn, uu, side="right") - 1
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(slopes[i] > 0, (uu - vn[i]) / slopes[i], np.inf)
        out = np.minimum(tn[i] + step, self.b)
        out[~finite] = np.inf
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "params": {
                "breakpoints": [[t, v] for t, v in self.breakpoints],
                "b_phi": _format_extended(self.b),
            },
        }


@dataclass(frozen=True)
class Scaled(YoungFunction):
    """t ↦ Φ_inner(c·t)."""

    inner: YoungFunction
    c: float
    family: ClassVar[str] = "Scaled"

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ValueError(f"Scale factor must be positive, got {self.c}")

    @property
    def a_phi(self) -> float:
        return self.inner.a_phi / self.c

    @property
    def b_phi(self) -> float:
        return self.inner.b_phi / self.c

    def _finite_eval(self, t: np.ndarray) -> np.ndarray:
        return self.inner.evaluate(self.c * t)

    def inverse(self, u: ArrayLike) -> np.ndarray:
        return self.inner.inverse(u) / self.c

    def homogeneity(self) -> Optional[Tuple[float, float]]:
        inner = self.inner.homogeneity()
        if inner is None:
            return None
        return inner[0] * self.c, inner[1]

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"inner": self.inner.to_dict(), "c": self.c}}


def scaled(inner: YoungFunction, c: float) -> YoungFunction:
    """Scaled(inner, c) with nested scalings collapsed."""
    if c == 1.0:
        return inner
    if isinstance(inner, Scaled):
        return scaled(inner.inner, inner.c * c)
    return Scaled(inner, c)


YOUNG_FAMILIES = {
    "Power": lambda params: Power(float(params["p"])),
    "PowerLog": lambda params: PowerLog(float(params["p"]), float(params.get("q", 0.0))),
    "ExpMinusOne": lambda params: ExpMinusOne(),
    "LinearCap": lambda params: LinearCap(),
    "PiecewiseLinearConvex": lambda params: PiecewiseLinearConvex(
        tuple(tuple(pt) for pt in params["breakpoints"]),
        _parse_extended(params.get("b_phi")),
    ),
    "Scaled": lambda params: Scaled(young_from_dict(params["inner"]), float(params["c"])),
}


def young_from_dict(data: Dict[str, Any]) -> YoungFunction:
    family = data.get("family")
    if family not in YOUNG_FAMILIES:
        raise ValueError(f"Unknown Young family: {family}")
    try:
        return YOUNG_FAMILIES[family](data.get("params") or {})
    except KeyError as e:
        raise ValueError(f"Missing parameter {e} for Young family {family}") from e


def eval_young(phi: YoungFunction, t: ArrayLike) -> Union[float, np.ndarray]:
    out = phi.evaluate(t)
    return float(out) if np.ndim(t) == 0 else out


def eval_young_array(phi: YoungFunction, t: ArrayLike) -> np.ndarray:
    """Φ applied elementwise; always returns an array, ∞ where t > b(Φ)."""
    return phi.evaluate(t)


def inverse_young(phi: YoungFunction, u: ArrayLike) -> Union[float, np.ndarray]:
    out = phi.inverse(u)
    return float(out) if np.ndim(u) == 0 else out


def _legendre(nodes: np.ndarray, values: np.ndarray, b: float) -> PiecewiseLinearConvex:
    """Exact conjugate of the piecewise-linear function through (nodes, values) on [0, b]."""
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    slopes = np.diff(values) / np.diff(nodes)
    if math.isfinite(b) and b > nodes[-1]:
        values = np.append(values, values[-1] + slopes[-1] * (b - nodes[-1]))
        nodes = np.append(nodes, b)
        slopes = np.diff(values) / np.diff(nodes)

    points = [(0.0, 0.0)]
    for i, s in enumerate(slopes):
        if s <= points[-1][0]:
            continue
        points.append((float(s), float(s * nodes[i] - values[i])))

    if math.isfinite(b):
        s_next = points[-1][0] + 1.0
        points.append((s_next, s_next * b - float(values[-1])))
        return PiecewiseLinearConvex(tuple(points), math.inf)
    return PiecewiseLinearConvex(tuple(points), float(slopes[-1]))


def complementary(phi: YoungFunction) -> YoungFunction:
    """Φ̃(t) = sup{tu - Φ(u): u >= 0}."""
    if isinstance(phi, Power):
        if phi.p == 1.0:
            return PiecewiseLinearConvex(((0.0, 0.0), (1.0, 0.0)), 1.0)
        conj = phi.p / (phi.p - 1.0)
        return scaled(Power(conj), (phi.p - 1.0) ** (1.0 / conj) / phi.p)
    if isinstance(phi, Scaled):
        return scaled(complementary(phi.inner), 1.0 / phi.c)
    if isinstance(phi, LinearCap):
        return _legendre(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 1.0)
    if isinstance(phi, PiecewiseLinearConvex):
        return _legendre(phi.nodes, phi.values, phi.b)
    if isinstance(phi, PowerLog):
        hn, hv = phi.hull
        return _legendre(hn, hv, math.inf)
    if isinstance(phi, ExpMinusOne):
        nodes = np.concatenate([[0.0], np.geomspace(2.0**-30, EXP_TABLE_MAX, HULL_NODES)])
        return _legendre(nodes, phi.evaluate(nodes), math.inf)
    raise ValueError(f"No complementary function for family {phi.family}")


def power_compose(phi: YoungFunction, theta: float) -> YoungFunction:
    """A Young function equivalent to Φ(t^θ); its inverse behaves like (Φ⁻¹)^{1/θ}."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    if theta == 1.0:
        return phi

    hom = phi.homogeneity()
    if hom is not None:
        k, p = hom
        if p * theta < 1.0:
            raise ValueError(
                f"Power exponent {p} composed with theta={theta} gives {p * theta} < 1; not a Young function"
            )
        return scaled(Power(p * theta), k ** (1.0 / theta))

    if not check_nabla2(phi).holds:
        raise ValueError(f"power_compose requires a nabla2 Young function, got {phi.family}")
    nodes = np.concatenate([[0.0], np.geomspace(*HULL_RANGE, HULL_NODES)])
    values = phi.evaluate(nodes**theta)
    finite = np.isfinite(values)
    nodes, values = nodes[finite], values[finite]
    if not np.any(values > 0):
        raise ValueError(f"Composition of {phi.family} with theta={theta} vanishes on the grid")
    keep = lower_convex_hull(nodes, values)
    b = phi.b_phi ** (1.0 / theta)
    return PiecewiseLinearConvex(tuple(zip(nodes[keep], values[keep])), b)


def check_delta2(
    phi: YoungFunction,
    t_grid: Optional[ArrayLike] = None,
    cap: float = DELTA2_CAP,
) -> ConditionReport:
    """max Φ(2t)/Φ(t) over the grid (0/0 counted as 1)."""
    grid = DEFAULT_T_GRID if t_grid is None else _as_array(t_grid)
    grid = grid[(grid > 0) & (grid <= phi.b_phi)]
    if grid.size == 0:
        raise ValueError("Delta2 scan grid is empty")

    num = phi.evaluate(2.0 * grid)
    den = phi.evaluate(grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den > 0, num / den, np.where(num > 0, np.inf, 1.0))
    ratio = np.where(np.isnan(ratio), np.inf, ratio)
    idx = int(np.argmax(ratio))
    best = float(ratio[idx])
    holds = math.isfinite(best) and best <= cap
    logger.debug("Delta2 %s: best=%g at t=%g", phi.family, best, grid[idx])
    return ConditionReport(
        holds=holds,
        best_constant=best,
        witness=float(grid[idx]),
        grid=geometric_grid_info(grid.tolist(), "t"),
        details={"cap": cap},
    )


def check_nabla2(
    phi: YoungFunction,
    t_grid: Optional[ArrayLike] = None,
    k_grid: Optional[ArrayLike] = None,
) -> ConditionReport:
    """Smallest k > 1 in k_grid with Φ(t) <= Φ(kt)/(2k) on all of t_grid."""
    grid = DEFAULT_T_GRID if t_grid is None else _as_array(t_grid)
    ks = np.sort(DEFAULT_K_GRID if k_grid is None else _as_array(k_grid))
    ks = ks[ks > 1.0]
    if grid.size == 0 or ks.size == 0:
        raise ValueError("Nabla2 scan needs a nonempty t-grid and k-grid with k > 1")

    lhs = phi.evaluate(grid)
    witness: Dict[str, float] = {}
    for k in ks:
        rhs = phi.evaluate(k * grid) / (2.0 * k)
        ok = (lhs <= rhs * (1.0 + NABLA2_SLACK)) | np.isinf(rhs)
        if np.all(ok):
            return ConditionReport(
                holds=True,
                best_constant=float(k),
                witness={"k": float(k)},
                grid=geometric_grid_info(grid.tolist(), "t"),
                details={"k_grid": ks.tolist()},
            )
        bad = int(np.argmin(np.where(ok, np.inf, rhs - lhs)))
        witness = {"k": float(k), "t": float(grid[bad])}

    return ConditionReport(
        holds=False,
        best_constant=math.inf,
        witness=witness,
        grid=geometric_grid_info(grid.tolist(), "t"),
        details={"k_grid": ks.tolist()},
    )
