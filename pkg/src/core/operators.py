"""Maximal operators, the generalized fractional integral, Hilbert/Riesz transforms and commutators.

Integral operators are translation invariant on the grid, so each one is a
stencil of cell weights indexed by the offset between output and input cell.
Sums are direct over all cells; there is no FFT path.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, NamedTuple, Optional, Union

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_legendre

from src.core.fields import (
    Ball,
    BallFamily,
    DyadicFamily,
    FieldSpec,
    SampledField,
    ball_mask,
    ball_mean,
    dyadic_family,
)
from src.core.growth import (
    GrowthFunction,
    PowerPos,
    check_standard_kernel_dini,
    growth_from_dict,
    psi_weighted_tail,
    rho_star,
    rho_star_array,
    tail_of_inverse,
)
from src.core.norms import campanato_p, om_norm
from src.core.quadrature import NonConvergenceError
from src.core.reports import ConditionReport
from src.core.young import YoungFunction

logger = logging.getLogger(__name__)

GAUSS_POINTS = 4
ROW_BLOCK = 256
KERNEL_KINDS = ("Hilbert", "Riesz")

Weight = Union[GrowthFunction, Callable[[float], float]]


class OperatorOutput(NamedTuple):
    field: SampledField
    truncation_note: str


@dataclass(frozen=True)
class KernelSpec:
    """Hilbert (n=1, 1/(πx)) or Riesz_j (n=2, x_j/(2π|x|³))."""

    kind: str
    j: int = 1
    omega: GrowthFunction = field(default_factory=lambda: PowerPos(1.0))

    def __post_init__(self) -> None:
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"Unknown kernel kind: {self.kind}")
        if self.kind == "Riesz" and self.j not in (1, 2):
            raise ValueError(f"Riesz index must be 1 or 2, got {self.j}")

    @property
    def dimension(self) -> int:
        return 1 if self.kind == "Hilbert" else 2

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        """K(t) for offsets t of shape (..., n); t = 0 maps to 0."""
        t = np.asarray(t, dtype=float)
        if self.kind == "Hilbert":
            x = t[..., 0]
            with np.errstate(divide="ignore"):
                return np.where(x != 0, 1.0 / (math.pi * np.where(x != 0, x, 1.0)), 0.0)
        r = np.sqrt(np.sum(t**2, axis=-1))
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, t[..., self.j - 1] / (2.0 * math.pi * safe**3), 0.0)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind, "omega": self.omega.to_dict()}
        if self.kind == "Riesz":
            data["j"] = self.j
        return data


def kernel_from_dict(data: Dict[str, Any]) -> KernelSpec:
    omega = growth_from_dict(data["omega"]) if "omega" in data else PowerPos(1.0)
    return KernelSpec(data.get("kind", ""), int(data.get("j", 1)), omega)


def _check_window(kernel: KernelSpec, n: int) -> None:
    if kernel.dimension != n:
        raise ValueError(f"{kernel.kind} kernel acts in dimension {kernel.dimension}, field has n={n}")


# Maximal operators


def _as_weight(rho: Optional[Weight], power: float) -> Callable[[float], float]:
    if rho is None:
        return lambda r: 1.0
    return lambda r: float(rho(r)) ** power


def _ball_sup(
    f: SampledField,
    balls: BallFamily,
    weight: Callable[[float], float],
    sharp: bool,
) -> SampledField:
    if f.window != balls.window:
        raise ValueError("Field and ball family live on different windows")
    values = f.flat()
    magnitude = np.abs(values)
    out = np.zeros_like(values)
    for block in balls.blocks():
        maskf = block.mask.astype(float)
        if sharp:
            means = maskf @ values / block.count
            outside = block.count - block.mask.sum(axis=1)
            osc = np.where(block.mask, np.abs(values[None, :] - means[:, None]), 0.0).sum(axis=1)
            averages = (osc + outside * np.abs(means)) / block.count
        else:
            averages = maskf @ magnitude / block.count
        w = weight(block.radius)
        if not w > 0:
            raise ValueError(f"Weight must be positive on the ladder, got {w} at r={block.radius}")
        contribution = np.where(block.mask, (w * averages)[:, None], 0.0).max(axis=0)
        np.maximum(out, contribution, out=out)
    return f.with_values(out)


def hl_maximal(f: SampledField, balls: BallFamily) -> SampledField:
    """Mf(x) = max over balls B ∋ x of ⨍_B |f|."""
    return _ball_sup(f, balls, _as_weight(None, 1.0), sharp=False)


def frac_maximal(
    f: SampledField,
    rho: Weight,
    balls: BallFamily,
    power: float = 1.0,
) -> SampledField:
    """M_ρ f(x) = max over balls B(a, r) ∋ x of ρ(r)^power ⨍_B |f|."""
    return _ball_sup(f, balls, _as_weight(rho, power), sharp=False)


def sharp_maximal(f: SampledField, balls: BallFamily) -> SampledField:
    """M♯f(x) = max over balls B ∋ x of ⨍_B |f − f_B|."""
    return _ball_sup(f, balls, _as_weight(None, 1.0), sharp=True)


def _embed(f: SampledField, family: DyadicFamily, inner: np.ndarray) -> SampledField:
    out = np.zeros(f.window.shape)
    out[family.cube_slices(0, (0,) * f.window.n)] = inner
    return f.with_values(out)


def dyadic_maximal(f: SampledField, family: DyadicFamily) -> SampledField:
    """M^d_Q f on the cells of Q (zero elsewhere), one pass over the tree levels."""
    local = np.abs(family.restrict(f))
    out = np.zeros_like(local)
    for j in range(family.depth + 1):
        np.maximum(out, family.level_means(local, j), out=out)
    return _embed(f, family, out)


def dyadic_sharp(f: SampledField, family: DyadicFamily) -> SampledField:
    """M♯d_Q f on the cells of Q (zero elsewhere)."""
    local = family.restrict(f)
    out = np.zeros_like(local)
    for j in range(family.depth + 1):
        deviation = np.abs(local - family.level_means(local, j))
        np.maximum(out, family.level_means(deviation, j), out=out)
    return _embed(f, family, out)


# Stencils


def _gauss_cell_weights(window, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """h^n · average of g over the cell at every offset, 4-point Gauss per axis."""
    N, h = window.N, window.h
    nodes, weights = roots_legendre(GAUSS_POINTS)
    offsets = np.arange(-(N - 1), N, dtype=float)
    grids = np.meshgrid(offsets, offsets, nodes, nodes, indexing="ij")
    t = np.stack([(grids[0] + 0.5 * grids[2]) * h, (grids[1] + 0.5 * grids[3]) * h], axis=-1)
    w2 = np.outer(weights, weights) / 4.0
    return h**2 * np.einsum("ijab,ab->ij", g(t), w2)


def hilbert_stencil(window) -> np.ndarray:
    """Exact cell integrals of 1/(π(x−y)); the self cell is 0 by oddness."""
    N = window.N
    k = np.arange(-(N - 1), N, dtype=float)
    out = np.zeros_like(k)
    nz = k != 0
    out[nz] = np.log((k[nz] + 0.5) / (k[nz] - 0.5)) / math.pi
    return out


def riesz_stencil(window, kernel: KernelSpec) -> np.ndarray:
    stencil = _gauss_cell_weights(window, kernel.evaluate)
    c = window.N - 1
    stencil[c, c] = 0.0
    return stencil


def frac_stencil(window, rho: GrowthFunction) -> np.ndarray:
    """Cell integrals of ρ(|x−y|)/|x−y|^n; the self cell is radialized."""
    N, h = window.N, window.h
    try:
        rho_star(rho, 1.0)
    except NonConvergenceError as e:
        raise ValueError(f"rho is not admissible: ∫_0 ρ(t)/t dt diverges ({e})") from e

    if window.n == 1:
        k = np.abs(np.arange(-(N - 1), N, dtype=float))
        upper = rho_star_array(rho, (k + 0.5) * h)
        lower = rho_star_array(rho, np.maximum(k - 0.5, 0.0) * h)
        stencil = upper - lower
        stencil[N - 1] = 2.0 * rho_star(rho, 0.5 * h)
        return stencil

    def g(t: np.ndarray) -> np.ndarray:
        r = np.sqrt(np.sum(t**2, axis=-1))
        return rho.evaluate(r) / r**2

    stencil = _gauss_cell_weights(window, g)
    stencil[N - 1, N - 1] = 2.0 * math.pi * rho_star(rho, h / math.sqrt(math.pi))
    return stencil


def kernel_stencil(window, kernel: KernelSpec) -> np.ndarray:
    _check_window(kernel, window.n)
    return hilbert_stencil(window) if kernel.kind == "Hilbert" else riesz_stencil(window, kernel)


def apply_stencil(
    stencil: np.ndarray,
    f: SampledField,
    b: Optional[SampledField] = None,
    transpose: bool = False,
) -> SampledField:
    """(Wf)(x) = Σ_y W[x−y] f(y), or Σ_y (b(x)−b(y)) W[x−y] f(y) with b."""
    window = f.window
    if transpose:
        stencil = stencil[(slice(None, None, -1),) * window.n]
    cells = window.cell_indices()
    values = f.flat()
    bvals = None if b is None else b.flat()
    out = np.zeros(window.size)
    for start in range(0, window.size, ROW_BLOCK):
        rows = cells[start : start + ROW_BLOCK]
        offsets = rows[:, None, :] - cells[None, :, :] + (window.N - 1)
        W = stencil[tuple(offsets[..., d] for d in range(window.n))]
        if bvals is not None:
            W = (bvals[start : start + ROW_BLOCK, None] - bvals[None, :]) * W
        out[start : start + ROW_BLOCK] = W @ values
    return f.with_values(out)


# Integral operators


def frac_integral(f: SampledField, rho: GrowthFunction) -> OperatorOutput:
    """I_ρ f(x) = ∫ ρ(|x−y|)/|x−y|^n f(y) dy over the window."""
    out = apply_stencil(frac_stencil(f.window, rho), f)
    return OperatorOutput(out, "window truncation; self cell radialized")


def cz_apply(f: SampledField, kernel: KernelSpec) -> OperatorOutput:
    """p.v. ∫ K(x−y) f(y) dy over the window; the self cell contributes 0."""
    out = apply_stencil(kernel_stencil(f.window, kernel), f)
    return OperatorOutput(out, "window truncation; principal value, zero self cell")


def _operator_stencil(window, kind: str, op: Union[KernelSpec, GrowthFunction]) -> np.ndarray:
    if kind == "CZ":
        if not isinstance(op, KernelSpec):
            raise ValueError("CZ commutator needs a KernelSpec")
        return kernel_stencil(window, op)
    if kind == "FRACT":
        if not isinstance(op, GrowthFunction):
            raise ValueError("FRACT commutator needs a growth function ρ")
        return frac_stencil(window, op)
    raise ValueError(f"Unknown commutator kind: {kind}")


def commutator(
    kind: str,
    b: SampledField,
    f: SampledField,
    kernel_or_rho: Union[KernelSpec, GrowthFunction],
) -> OperatorOutput:
    """[b, Op]f(x) = Σ_y (b(x)−b(y)) W[x−y] f(y)."""
    if b.window != f.window:
        raise ValueError("b and f live on different windows")
    stencil = _operator_stencil(f.window, kind, kernel_or_rho)
    return OperatorOutput(apply_stencil(stencil, f, b=b), "direct form with factor b(x)−b(y)")


def two_ball_commutator(
    b: SampledField,
    f: SampledField,
    kernel: KernelSpec,
    B: Ball,
) -> SampledField:
    """[b,T](fχ_{2B}) + ∫_{ℝⁿ∖2B} (b(x)−b(y))K(x,y)f(y)dy.

    The outer integral is evaluated as b·T(f_out) − T(b·f_out).
    """
    stencil = kernel_stencil(f.window, kernel)
    inner_mask = ball_mask(f.window, Ball(B.center, 2.0 * B.radius))
    f_in = f.with_values(np.where(inner_mask, f.values, 0.0))
    f_out = f - f_in
    near = apply_stencil(stencil, f_in, b=b)
    far = b * apply_stencil(stencil, f_out) - apply_stencil(stencil, b * f_out)
    return near + far


def l2_bound(
    window,
    kernel: KernelSpec,
    iterations: int = 100,
    tol: float = 1e-8,
    seed: int = 0,
) -> float:
    """Largest singular value of the discrete T on ℓ²(cells), by power iteration on TᵀT."""
    stencil = kernel_stencil(window, kernel)
    rng = np.random.default_rng(seed)
    v = SampledField(window, rng.standard_normal(window.shape))
    v = v * (1.0 / np.linalg.norm(v.flat()))
    sigma = 0.0
    for i in range(iterations):
        w = apply_stencil(stencil, apply_stencil(stencil, v), transpose=True)
        norm = float(np.linalg.norm(w.flat()))
        if norm == 0.0:
            return 0.0
        estimate = math.sqrt(norm)
        v = w * (1.0 / norm)
        if abs(estimate - sigma) <= tol * estimate:
            sigma = estimate
            break
        sigma = estimate
    logger.debug("l2 bound %.8g after %d iterations", sigma, i + 1)
    return sigma


def check_standard_kernel(
    kernel: KernelSpec,
    omega: Optional[GrowthFunction] = None,
    sample_triples: int = 2000,
    seed: int = 0,
) -> ConditionReport:
    """Smoothness constant of K against ω(|y−z|/|x−y|) on random triples with 2|y−z| <= |x−y|."""
    omega = omega or kernel.omega
    n = kernel.dimension
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(sample_triples, n))
    y = rng.uniform(-1.0, 1.0, size=(sample_triples, n))
    dist = np.sqrt(np.sum((x - y) ** 2, axis=-1))
    direction = rng.standard_normal((sample_triples, n))
    direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
    step = 0.5 * dist * rng.uniform(0.0, 1.0, size=sample_triples)
    z = y + step[:, None] * direction

    keep = dist > 1e-6
    x, y, z, dist, step = x[keep], y[keep], z[keep], dist[keep], step[keep]
    lhs = np.abs(kernel.evaluate(x - y) - kernel.evaluate(x - z)) + np.abs(
        kernel.evaluate(y - x) - kernel.evaluate(z - x)
    )
    w = omega.evaluate(np.maximum(step / dist, 1e-300))
    ratio = lhs * dist**n / w
    i = int(np.argmax(ratio))
    best = float(ratio[i])

    dini = check_standard_kernel_dini(omega)
    holds = math.isfinite(best) and dini["log_dini"]["holds"]
    return ConditionReport(
        holds=holds,
        best_constant=best,
        witness={"x": x[i].tolist(), "y": y[i].tolist(), "z": z[i].tolist()},
        grid={"variable": "triples", "kind": "random", "size": int(len(ratio)), "seed": seed},
        details={"dini": dini, "kernel": kernel.to_dict()},
    )


# Tail bounds


def _beyond_window_tail(
    spec: FieldSpec,
    window,
    x: float,
    kernel_abs: Callable[[float], float],
    weight: Callable[[float], float],
) -> float:
    """∫_{|y|>L} |K(x−y)| |weight(y)| |f(y)| dy for a one-dimensional analytic spec."""

    def g(y: float) -> float:
        value = float(spec.values_at(np.array([[y]]), window)[0])
        return kernel_abs(x - y) * abs(weight(y)) * abs(value)

    total = 0.0
    for lo, hi in ((window.L, math.inf), (-math.inf, -window.L)):
        total += quad(g, lo, hi, limit=200)[0]
    return total


def tail_bound_check(
    f: SampledField,
    B: Ball,
    phi_Y: YoungFunction,
    vp: GrowthFunction,
    balls: BallFamily,
    kernel: Optional[KernelSpec] = None,
    rho: Optional[GrowthFunction] = None,
    b: Optional[SampledField] = None,
    psi: Optional[GrowthFunction] = None,
    spec: Optional[FieldSpec] = None,
    k1: float = 1.0,
    norm_f: Optional[float] = None,
    norm_b: Optional[float] = None,
) -> ConditionReport:
    """Ratio of the far-field integral over ℝⁿ∖2B to its tail-integral bound, maximized over x ∈ B.

    With ``b`` and ``psi`` the integrand carries |b(y) − b_B| and the bound
    the ψ-weighted double tail times the (1, ψ)-Campanato norm of b.
    """
    if (kernel is None) == (rho is None):
        raise ValueError("Give exactly one of kernel or rho")
    if (b is None) != (psi is None):
        raise ValueError("b and psi go together")
    window = f.window
    n = window.n
    r = B.radius

    if kernel is not None:
        _check_window(kernel, n)

        def kernel_abs_at(t: np.ndarray) -> np.ndarray:
            return np.abs(kernel.evaluate(t))

        start = 2.0 * r if b is None else r
    else:

        def kernel_abs_at(t: np.ndarray) -> np.ndarray:
            d = np.sqrt(np.sum(t**2, axis=-1))
            safe = np.where(d > 0, d, 1.0)
            return np.where(d > 0, rho.evaluate(safe) / safe**n, 0.0)

        start = k1 * r

    points = window.points().reshape(-1, n)
    inside = ball_mask(window, B).ravel()
    outside_2b = ~ball_mask(window, Ball(B.center, 2.0 * r)).ravel()
    values = np.abs(f.flat())
    weight = np.ones(window.size)
    b_mean = 0.0
    if b is not None:
        b_mean = ball_mean(b, B)
        weight = np.abs(b.flat() - b_mean)

    extend = spec is not None and not spec.compact and n == 1

    def k_scalar(s: float) -> float:
        return float(kernel_abs_at(np.array([[s]]))[0])

    # b vanishes beyond the window, so |b(y) − b_B| = |b_B| there
    beyond_weight = abs(b_mean) if b is not None else 1.0

    far = outside_2b & (values > 0)
    lhs = 0.0
    witness_x = None
    for x in points[inside]:
        t = x[None, :] - points[far]
        value = float(np.sum(kernel_abs_at(t) * weight[far] * values[far]) * window.cell_volume)
        if extend:
            value += _beyond_window_tail(spec, window, float(x[0]), k_scalar, lambda y: beyond_weight)
        if value > lhs or witness_x is None:
            lhs, witness_x = value, x.tolist()

    if norm_f is None:
        norm_f = om_norm(f, phi_Y, vp, balls).value
    if b is None:
        integral = tail_of_inverse(phi_Y, vp, start, rho)
        norm_b = 1.0
    else:
        integral = psi_weighted_tail(phi_Y, vp, psi, start, rho)
        if norm_b is None:
            norm_b = campanato_p(b, 1.0, psi, balls).value
    rhs = integral * norm_f * norm_b
    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
    return ConditionReport(
        holds=math.isfinite(ratio),
        best_constant=ratio,
        witness={"x": witness_x, "ball": B.to_dict()},
        grid={"variable": "x", "kind": "cells of B", "size": int(inside.sum())},
        details={
            "lhs": lhs,
            "tail_integral": integral,
            "norm_f": norm_f,
            "norm_b": norm_b,
            "start_radius": start,
        },
    )


# Dispatcher

OPERATORS = (
    "identity",
    "scale",
    "M",
    "Mrho",
    "Msharp",
    "Mdyadic",
    "Msharp_dyadic",
    "Irho",
    "T",
    "commT",
    "commIrho",
)


def apply_operator(
    op: str,
    f: SampledField,
    balls: Optional[BallFamily] = None,
    rho: Optional[GrowthFunction] = None,
    kernel: Optional[KernelSpec] = None,
    b: Optional[SampledField] = None,
    depth: Optional[int] = None,
    c: float = 1.0,
    power: float = 1.0,
) -> OperatorOutput:
    def need(name: str, value: Any) -> Any:
        if value is None:
            raise ValueError(f"Operator {op} needs {name}")
        return value

    if op == "identity":
        return OperatorOutput(f, "none")
    if op == "scale":
        return OperatorOutput(f * c, "none")
    if op == "M":
        return OperatorOutput(hl_maximal(f, need("balls", balls)), "max over ball family")
    if op == "Mrho":
        return OperatorOutput(
            frac_maximal(f, need("rho", rho), need("balls", balls), power), "max over ball family"
        )
    if op == "Msharp":
        return OperatorOutput(sharp_maximal(f, need("balls", balls)), "max over ball family")
    if op in ("Mdyadic", "Msharp_dyadic"):
        family = dyadic_family(f.window, need("depth", depth))
        fn = dyadic_maximal if op == "Mdyadic" else dyadic_sharp
        return OperatorOutput(fn(f, family), "dyadic tree over the window")
    if op == "Irho":
        return frac_integral(f, need("rho", rho))
    if op == "T":
        return cz_apply(f, need("kernel", kernel))
    if op == "commT":
        return commutator("CZ", need("b", b), f, need("kernel", kernel))
    if op == "commIrho":
        return commutator("FRACT", need("b", b), f, need("rho", rho))
    raise ValueError(f"Unknown operator: {op}")
