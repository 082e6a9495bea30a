"""Grid-sampled functions on [-L, L]^n, balls, dyadic cubes and the field bank specs.

A SampledField is piecewise constant on cells and zero outside the window, so
ball means count every lattice cell whose center lies in the ball, including
the zero cells beyond the window.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, ClassVar, Dict, Iterator, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import quad

logger = logging.getLogger(__name__)

# Chunk of ball centers whose membership masks are materialized together
CENTER_BLOCK = 512
# Ladder rungs beyond log2(N)
EXTRA_RUNGS = 3


@dataclass(frozen=True)
class Window:
    n: int
    L: float
    N: int

    def __post_init__(self) -> None:
        if self.n not in (1, 2):
            raise ValueError(f"Only dimensions 1 and 2 are supported, got n={self.n}")
        if self.N < 8 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")
        if not self.L > 0:
            raise ValueError(f"Window half-width must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.h**self.n

    def axis(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return -self.L + self.h * (np.arange(self.N) + 0.5)

    def points(self) -> np.ndarray:
        """Cell centers, shape (N, ..., N, n)."""
        axes = np.meshgrid(*([self.axis()] * self.n), indexing="ij")
        return np.stack(axes, axis=-1)

    def cell_indices(self) -> np.ndarray:
        """Integer cell indices in C order, shape (N^n, n)."""
        grids = np.meshgrid(*([np.arange(self.N)] * self.n), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "L": self.L, "N": self.N}


@dataclass(frozen=True, eq=False)
class SampledField:
    window: Window
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).reshape(self.window.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("Sampled field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray) -> "SampledField":
        return SampledField(self.window, values)

    def _other(self, other: Union["SampledField", float]) -> Union[np.ndarray, float]:
        if isinstance(other, SampledField):
            if other.window != self.window:
                raise ValueError("Fields live on different windows")
            return other.values
        return float(other)

    def __add__(self, other: Union["SampledField", float]) -> "SampledField":
        return self.with_values(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other: Union["SampledField", float]) -> "SampledField":
        return self.with_values(self.values - self._other(other))

    def __mul__(self, other: Union["SampledField", float]) -> "SampledField":
        return self.with_values(self.values * self._other(other))

    __rmul__ = __mul__

    def flat(self) -> np.ndarray:
        return self.values.ravel()


def zero_field(window: Window) -> SampledField:
    return SampledField(window, np.zeros(window.shape))


# Balls


@dataclass(frozen=True)
class Ball:
    """Open ball |x - center| < radius in window coordinates."""

    center: Tuple[float, ...]
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not self.radius > 0:
            raise ValueError(f"Ball radius must be positive, got {self.radius}")

    def to_dict(self) -> Dict[str, Any]:
        return {"center": list(self.center), "radius": self.radius}


def _snap(x: np.ndarray) -> np.ndarray:
    """Round values lying within 1e-9 of an integer."""
    rounded = np.round(x)
    return np.where(np.abs(x - rounded) < 1e-9, rounded, x)


def index_units(window: Window, ball: Ball) -> Tuple[np.ndarray, float]:
    if len(ball.center) != window.n:
        raise ValueError(f"Ball center has dimension {len(ball.center)}, window has {window.n}")
    center = _snap((np.asarray(ball.center) + window.L) / window.h - 0.5)
    radius = float(_snap(np.asarray(ball.radius / window.h)))
    return center, radius


def lattice_count(center: np.ndarray, radius: float) -> int:
    """Number of integer points i with |i - center| < radius."""
    center = np.atleast_1d(center).astype(float)
    if center.size == 1:
        lo = math.floor(center[0] - radius) + 1
        hi = math.ceil(center[0] + radius) - 1
        return max(0, hi - lo + 1)
    total = 0
    cy = center[1]
    for i in range(math.floor(center[0] - radius) + 1, math.ceil(center[0] + radius)):
        rest = radius**2 - (i - center[0]) ** 2
        if rest <= 0:
            continue
        half = math.sqrt(rest)
        lo = math.floor(cy - half) + 1
        hi = math.ceil(cy + half) - 1
        total += max(0, hi - lo + 1)
    return total


def ball_mask(window: Window, ball: Ball) -> np.ndarray:
    """Boolean array over the window: cells whose centers lie in the ball."""
    center, radius = index_units(window, ball)
    idx = window.cell_indices().astype(float)
    d2 = np.sum((idx - center) ** 2, axis=-1)
    return (d2 < radius**2).reshape(window.shape)


def support_radius(f: SampledField) -> float:
    """Largest |x| over the nonzero cells; B(0, r) holds the support for every r above it."""
    nonzero = f.flat() != 0
    if not nonzero.any():
        return 0.0
    points = f.window.points().reshape(-1, f.window.n)[nonzero]
    return float(np.sqrt(np.sum(points**2, axis=-1)).max())


def ball_mean(f: SampledField, ball: Ball) -> float:
    """⨍_B f over the lattice cells in B (zero outside the window)."""
    center, radius = index_units(f.window, ball)
    count = lattice_count(center, radius)
    mask = ball_mask(f.window, ball)
    if count == 0 or not mask.any():
        raise ValueError(f"Ball {ball.to_dict()} contains no cell of the window")
    return float(f.values[mask].sum() / count)


@dataclass(frozen=True)
class BallPolicy:
    stride: int = 1
    max_radius: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"stride": self.stride, "max_radius": self.max_radius}


@dataclass(frozen=True)
class BallBlock:
    """Balls of one rung for a chunk of centers with their cell masks."""

    rung: int
    radius: float
    centers: np.ndarray
    mask: np.ndarray
    count: int


@dataclass(frozen=True, eq=False)
class BallFamily:
    window: Window
    policy: BallPolicy
    rungs: Tuple[int, ...]
    center_indices: np.ndarray
    counts: Tuple[int, ...]

    @property
    def radii(self) -> np.ndarray:
        return self.window.h * 2.0 ** np.asarray(self.rungs, dtype=float)

    @property
    def size(self) -> int:
        return len(self.rungs) * len(self.center_indices)

    def blocks(self) -> Iterator[BallBlock]:
        cells = self.window.cell_indices()
        for rung, count in zip(self.rungs, self.counts):
            limit = 4**rung
            for start in range(0, len(self.center_indices), CENTER_BLOCK):
                centers = self.center_indices[start : start + CENTER_BLOCK]
                d2 = np.sum((centers[:, None, :] - cells[None, :, :]) ** 2, axis=-1)
                yield BallBlock(
                    rung=rung,
                    radius=float(self.window.h * 2.0**rung),
                    centers=centers,
                    mask=d2 < limit,
                    count=count,
                )

    def ball(self, rung: int, center_index: np.ndarray) -> Ball:
        center = -self.window.L + self.window.h * (np.asarray(center_index) + 0.5)
        return Ball(tuple(center), float(self.window.h * 2.0**rung))

    def describe(self) -> Dict[str, Any]:
        return {
            "centers": len(self.center_indices),
            "stride": self.policy.stride,
            "radii": self.radii.tolist(),
            "size": self.size,
            "mass": "lattice cells with center in B, zero outside the window",
        }


def ball_family(w: Window, policy: Optional[BallPolicy] = None) -> BallFamily:
    policy = policy or BallPolicy()
    if policy.stride < 1 or w.N % policy.stride:
        raise ValueError(f"Stride {policy.stride} must divide N={w.N}")
    top = int(math.log2(w.N)) + EXTRA_RUNGS
    rungs = [j for j in range(top + 1)]
    if policy.max_radius is not None:
        rungs = [j for j in rungs if w.h * 2.0**j <= policy.max_radius * (1 + 1e-12)]
    if not rungs:
        raise ValueError(f"max_radius={policy.max_radius} is below the cell width h={w.h}")

    axis = np.arange(0, w.N, policy.stride)
    grids = np.meshgrid(*([axis] * w.n), indexing="ij")
    centers = np.stack([g.ravel() for g in grids], axis=-1)
    counts = tuple(lattice_count(np.zeros(w.n), float(2**j)) for j in rungs)
    family = BallFamily(w, policy, tuple(rungs), centers, counts)
    logger.debug("Ball family: %d centers x %d radii", len(centers), len(rungs))
    return family


def ball_masks(balls: BallFamily, rung: int) -> np.ndarray:
    """Membership of every cell in every ball of one rung, shape (centers, cells)."""
    if rung not in balls.rungs:
        raise ValueError(f"Rung {rung} is not on the ladder {balls.rungs}")
    cells = balls.window.cell_indices()
    centers = balls.center_indices
    d2 = np.sum((centers[:, None, :] - cells[None, :, :]) ** 2, axis=-1)
    return d2 < 4**rung


# Dyadic cubes


@dataclass(frozen=True)
class DyadicFamily:
    """Dyadic subcubes of Q = corner + [0, side)^n (cell units) down to depth J."""

    window: Window
    corner: Tuple[int, ...]
    side: int
    depth: int

    def __post_init__(self) -> None:
        corner = tuple(int(c) for c in self.corner)
        object.__setattr__(self, "corner", corner)
        if len(corner) != self.window.n:
            raise ValueError("Cube corner dimension does not match the window")
        if self.side < 1 or self.side & (self.side - 1):
            raise ValueError(f"Cube side must be a power of two, got {self.side}")
        if any(c < 0 or c + self.side > self.window.N for c in corner):
            raise ValueError("Cube must lie inside the window")
        if self.depth < 0 or 2**self.depth > self.side:
            raise ValueError(
                f"Depth {self.depth} misaligned: 2^J must divide the cube side of {self.side} cells"
            )

    @property
    def cube_count(self) -> int:
        n = self.window.n
        return sum(2 ** (n * j) for j in range(self.depth + 1))

    def cubes(self) -> Iterator[Tuple[int, Tuple[int, ...]]]:
        for j in range(self.depth + 1):
            for k in np.ndindex(*([2**j] * self.window.n)):
                yield j, tuple(int(x) for x in k)

    def cube_slices(self, j: int, k: Tuple[int, ...]) -> Tuple[slice, ...]:
        s = self.side // 2**j
        return tuple(slice(c + ki * s, c + (ki + 1) * s) for c, ki in zip(self.corner, k))

    def parent(self, j: int, k: Tuple[int, ...]) -> Optional[Tuple[int, Tuple[int, ...]]]:
        if j == 0:
            return None
        return j - 1, tuple(ki // 2 for ki in k)

    def restrict(self, f: SampledField) -> np.ndarray:
        return np.asarray(f.values[self.cube_slices(0, (0,) * self.window.n)])

    def level_means(self, values: np.ndarray, j: int) -> np.ndarray:
        """Means over depth-j cubes broadcast back to every cell of Q."""
        n = self.window.n
        m = 2**j
        s = self.side // m
        shaped = values.reshape(sum(((m, s) for _ in range(n)), ()))
        means = shaped.mean(axis=tuple(range(1, 2 * n, 2)), keepdims=True)
        return np.broadcast_to(means, shaped.shape).reshape(values.shape)

    def to_dict(self) -> Dict[str, Any]:
        return {"corner": list(self.corner), "side": self.side, "depth": self.depth, "cubes": self.cube_count}


def cube_masks(family: DyadicFamily, j: int) -> np.ndarray:
    """Flat label of the depth-j cube containing each cell of Q."""
    n = family.window.n
    s = family.side // 2**j
    coords = np.meshgrid(*([np.arange(family.side) // s] * n), indexing="ij")
    labels = np.zeros((family.side,) * n, dtype=np.int64)
    for c in coords:
        labels = labels * 2**j + c
    return labels


def cell_centers(window: Window) -> np.ndarray:
    return window.points()


def dyadic_family(
    window: Window,
    depth: int,
    corner: Optional[Tuple[int, ...]] = None,
    side: Optional[int] = None,
) -> DyadicFamily:
    side = window.N if side is None else side
    corner = (0,) * window.n if corner is None else corner
    return DyadicFamily(window, corner, side, depth)


# Field specs


class FieldSpec(ABC):
    family: ClassVar[str] = ""
    compact: ClassVar[bool] = True

    @abstractmethod
    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        """Function values at points x of shape (..., n)."""

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    def sample(self, window: Window) -> SampledField:
        return SampledField(window, self.values_at(window.points(), window))


def _center(center: Any, n: int) -> np.ndarray:
    c = np.zeros(n) if center is None else np.atleast_1d(np.asarray(center, dtype=float))
    if c.size == 1 and n == 2:
        c = np.repeat(c, 2)
    return c


@dataclass(frozen=True)
class Indicator(FieldSpec):
    radius: float
    center: Optional[Tuple[float, ...]] = None
    shape: str = "ball"
    family: ClassVar[str] = "Indicator"

    def __post_init__(self) -> None:
        if self.shape not in ("ball", "cube"):
            raise ValueError(f"Unknown indicator shape: {self.shape}")
        if not self.radius > 0:
            raise ValueError("Indicator radius must be positive")

    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        d = x - _center(self.center, window.n)
        if self.shape == "ball":
            inside = np.sum(d**2, axis=-1) < self.radius**2
        else:
            inside = np.max(np.abs(d), axis=-1) < self.radius
        return inside.astype(float)

    def to_dict(self) -> Dict[str, Any]:
        params = {"radius": self.radius, "shape": self.shape}
        if self.center is not None:
            params["center"] = list(np.atleast_1d(self.center))
        return {"family": self.family, "params": params}


def _corner_integral(a: float, b: float, beta: float) -> float:
    """∫ over [0,a]x[0,b] of |x|^{-beta}."""
    if a <= 0 or b <= 0:
        return 0.0
    theta0 = math.atan2(b, a)
    e = 2.0 - beta
    first = quad(lambda t: (a / math.cos(t)) ** e, 0.0, theta0)[0]
    second = quad(lambda t: (b / math.sin(t)) ** e, theta0, math.pi / 2)[0]
    return (first + second) / e


@dataclass(frozen=True)
class PowerSingular(FieldSpec):
    """|x - center|^{-beta} with 0 < beta < n."""

    beta: float
    center: Optional[Tuple[float, ...]] = None
    family: ClassVar[str] = "PowerSingular"
    compact: ClassVar[bool] = False

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise ValueError(f"PowerSingular exponent must be positive, got {self.beta}")

    def _check(self, window: Window) -> None:
        if self.beta >= window.n:
            raise ValueError(
                f"|x|^-{self.beta} is not locally integrable in dimension {window.n}"
            )

    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        self._check(window)
        r = np.sqrt(np.sum((x - _center(self.center, window.n)) ** 2, axis=-1))
        with np.errstate(divide="ignore"):
            return np.where(r > 0, r ** (-self.beta), 0.0)

    def sample(self, window: Window) -> SampledField:
        self._check(window)
        c = _center(self.center, window.n)
        h = window.h
        if window.n == 1:
            edges = -window.L + h * np.arange(window.N + 1) - c[0]
            e = 1.0 - self.beta
            antiderivative = np.sign(edges) * np.abs(edges) ** e / e
            return SampledField(window, np.diff(antiderivative) / h)

        values = self.values_at(window.points(), window)
        lo = -window.L + h * np.arange(window.N)
        touching = [
            i for i in range(window.N) if lo[i] - 1e-12 <= c[0] <= lo[i] + h + 1e-12
        ]
        touching_y = [
            i for i in range(window.N) if lo[i] - 1e-12 <= c[1] <= lo[i] + h + 1e-12
        ]
        for i in touching:
            for j in touching_y:
                xs = (c[0] - lo[i], lo[i] + h - c[0])
                ys = (c[1] - lo[j], lo[j] + h - c[1])
                total = sum(_corner_integral(a, b, self.beta) for a in xs for b in ys)
                values[i, j] = total / h**2
        return SampledField(window, values)

    def to_dict(self) -> Dict[str, Any]:
        params: Dict[str, Any] = {"beta": self.beta}
        if self.center is not None:
            params["center"] = list(np.atleast_1d(self.center))
        return {"family": self.family, "params": params}


@dataclass(frozen=True)
class Oscillatory(FieldSpec):
    """sin(k·x₁) on the ball of the given radius."""

    k: float
    radius: float = 2.0
    family: ClassVar[str] = "Oscillatory"

    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        inside = np.sum(x**2, axis=-1) < self.radius**2
        return np.where(inside, np.sin(self.k * x[..., 0]), 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"k": self.k, "radius": self.radius}}


@dataclass(frozen=True)
class RandomStep(FieldSpec):
    """Integer values in [-amplitude, amplitude], constant on the 2^depth dyadic blocks per axis of the window."""

    seed: int
    depth: int = 3
    amplitude: int = 8
    family: ClassVar[str] = "RandomStep"

    def table(self, n: int) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return rng.integers(-self.amplitude, self.amplitude + 1, size=(2**self.depth,) * n).astype(float)

    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        m = 2**self.depth
        block = np.floor((x + window.L) / (2.0 * window.L) * m).astype(int)
        inside = np.all((block >= 0) & (block < m), axis=-1)
        block = np.clip(block, 0, m - 1)
        values = self.table(window.n)[tuple(block[..., i] for i in range(window.n))]
        return np.where(inside, values, 0.0)

    def sample(self, window: Window) -> SampledField:
        if 2**self.depth > window.N:
            raise ValueError(f"RandomStep depth {self.depth} is finer than the grid N={window.N}")
        return super().sample(window)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "params": {"seed": self.seed, "depth": self.depth, "amplitude": self.amplitude},
        }


@dataclass(frozen=True)
class Constant(FieldSpec):
    c: float
    family: ClassVar[str] = "Constant"

    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        return np.full(x.shape[:-1], float(self.c))

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"c": self.c}}


@dataclass(frozen=True)
class Ramp(FieldSpec):
    """x₁ clipped to [-radius, radius]."""

    radius: float = 2.0
    family: ClassVar[str] = "Ramp"

    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        return np.clip(x[..., 0], -self.radius, self.radius)

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"radius": self.radius}}


@dataclass(frozen=True)
class LogAbs(FieldSpec):
    """log|x| with |x| clipped below at half a cell."""

    family: ClassVar[str] = "LogAbs"
    compact: ClassVar[bool] = False

    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        r = np.sqrt(np.sum(x**2, axis=-1))
        return np.log(np.maximum(r, 0.5 * window.h))

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {}}


@dataclass(frozen=True)
class RadialPower(FieldSpec):
    """|x|^beta."""

    beta: float
    family: ClassVar[str] = "RadialPower"
    compact: ClassVar[bool] = False

    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        return np.sqrt(np.sum(x**2, axis=-1)) ** self.beta

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"beta": self.beta}}


@dataclass(frozen=True)
class Affine(FieldSpec):
    """constant + Σ coef·spec."""

    terms: Tuple[Tuple[float, FieldSpec], ...] = field(default_factory=tuple)
    constant: float = 0.0
    family: ClassVar[str] = "Affine"

    @property
    def compact(self) -> bool:  # type: ignore[override]
        return self.constant == 0.0 and all(spec.compact for coef, spec in self.terms if coef != 0)

    def values_at(self, x: np.ndarray, window: Window) -> np.ndarray:
        out = np.full(x.shape[:-1], float(self.constant))
        for coef, spec in self.terms:
            if coef != 0:
                out = out + coef * spec.values_at(x, window)
        return out

    def sample(self, window: Window) -> SampledField:
        values = np.full(window.shape, float(self.constant))
        for coef, spec in self.terms:
            if coef != 0:
                values = values + coef * spec.sample(window).values
        return SampledField(window, values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "params": {
                "terms": [[coef, spec.to_dict()] for coef, spec in self.terms],
                "constant": self.constant,
            },
        }


def _opt_center(params: Dict[str, Any]) -> Optional[Tuple[float, ...]]:
    center = params.get("center")
    return None if center is None else tuple(np.atleast_1d(center).tolist())


FIELD_FAMILIES = {
    "Indicator": lambda p: Indicator(float(p["radius"]), _opt_center(p), p.get("shape", "ball")),
    "PowerSingular": lambda p: PowerSingular(float(p["beta"]), _opt_center(p)),
    "Oscillatory": lambda p: Oscillatory(float(p["k"]), float(p.get("radius", 2.0))),
    "RandomStep": lambda p: RandomStep(int(p["seed"]), int(p.get("depth", 3)), int(p.get("amplitude", 8))),
    "Constant": lambda p: Constant(float(p["c"])),
    "Ramp": lambda p: Ramp(float(p.get("radius", 2.0))),
    "LogAbs": lambda p: LogAbs(),
    "RadialPower": lambda p: RadialPower(float(p["beta"])),
    "Affine": lambda p: Affine(
        tuple((float(coef), field_from_dict(spec)) for coef, spec in p.get("terms", [])),
        float(p.get("constant", 0.0)),
    ),
}


def field_from_dict(data: Dict[str, Any]) -> FieldSpec:
    family = data.get("family")
    if family not in FIELD_FAMILIES:
        raise ValueError(f"Unknown field family: {family}")
    try:
        return FIELD_FAMILIES[family](data.get("params") or {})
    except KeyError as e:
        raise ValueError(f"Missing parameter {e} for field family {family}") from e


def sample(spec: FieldSpec, w: Window) -> SampledField:
    return spec.sample(w)


# Field files

HEADER_DTYPE = np.dtype([("n", "<i8"), ("N", "<i8"), ("L", "<f8")])


def write_field(path: Union[str, Path], f: SampledField) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".csv":
        points = f.window.points().reshape(-1, f.window.n)
        columns = ["x"] if f.window.n == 1 else ["x1", "x2"]
        frame = pd.DataFrame(points, columns=columns)
        frame["value"] = f.flat()
        frame.to_csv(path, index=False, float_format="%.17g")
        return
    header = np.array([(f.window.n, f.window.N, f.window.L)], dtype=HEADER_DTYPE)
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def read_field(path: Union[str, Path]) -> SampledField:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Field file {path} not found.")
    if path.suffix == ".csv":
        frame = pd.read_csv(path)
        n = 1 if "x" in frame.columns else 2
        coords = frame["x"].to_numpy() if n == 1 else frame["x1"].to_numpy()
        N = len(frame) if n == 1 else int(round(math.sqrt(len(frame))))
        L = float(np.max(np.abs(coords)) + (np.max(coords) - np.min(coords)) / (2 * (N - 1)))
        return SampledField(Window(n, L, N), frame["value"].to_numpy())

    raw = path.read_bytes()
    if len(raw) < HEADER_DTYPE.itemsize:
        raise ValueError(f"Field file {path} is truncated")
    header = np.frombuffer(raw[: HEADER_DTYPE.itemsize], dtype=HEADER_DTYPE)[0]
    window = Window(int(header["n"]), float(header["L"]), int(header["N"]))
    values = np.frombuffer(raw[HEADER_DTYPE.itemsize :], dtype="<f8")
    if values.size != window.size:
        raise ValueError(f"Field file {path} holds {values.size} values, expected {window.size}")
    return SampledField(window, values.copy())
