"""Luxemburg ball norms and the sup-over-balls norms built from them.

Every norm is computed over an explicit BallFamily; reports carry the family
so a value is never mistaken for the continuum supremum over all balls.
"""

import logging
import math
from typing import Any, Dict, Iterable, Iterator, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.core.fields import Ball, BallBlock, BallFamily, SampledField, ball_mask, index_units, lattice_count
from src.core.growth import GrowthFunction
from src.core.quadrature import NonConvergenceError
from src.core.reports import NormResult
from src.core.young import YoungFunction, eval_young_array

logger = logging.getLogger(__name__)

LUXEMBURG_REL_TOL = 1e-10
MAX_BISECTIONS = 200
MAX_DOUBLINGS = 400
SIGMA_TOL = 1e-6


def modular(
    f: SampledField,
    phi_Y: YoungFunction,
    vp: GrowthFunction,
    B: Ball,
    lam: float,
) -> float:
    """(1/φ(r)) ⨍_B Φ(|f|/λ), ∞ as soon as one sample is ∞."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    mask = ball_mask(f.window, B)
    center, radius = index_units(f.window, B)
    count = lattice_count(center, radius)
    if count == 0 or not mask.any():
        raise ValueError(f"Ball {B.to_dict()} contains no cell of the window")
    terms = eval_young_array(phi_Y, np.abs(f.values[mask]) / lam)
    if np.any(np.isinf(terms)):
        return math.inf
    return float(terms.sum() / count / float(vp(B.radius)))


def _row_modular(
    phi_Y: YoungFunction,
    G: np.ndarray,
    mask: np.ndarray,
    outside: np.ndarray,
    outside_count: np.ndarray,
    scale: np.ndarray,
    lam: np.ndarray,
) -> np.ndarray:
    """Row-wise modular: [Σ_mask Φ(G/λ) + m·Φ(outside/λ)] / scale."""
    inner = np.where(mask, eval_young_array(phi_Y, G / lam[:, None]), 0.0).sum(axis=1)
    tail = np.where(outside_count > 0, eval_young_array(phi_Y, outside / lam), 0.0)
    with np.errstate(invalid="ignore"):
        total = inner + outside_count * tail
    return total / scale


def luxemburg_rows(
    phi_Y: YoungFunction,
    G: np.ndarray,
    mask: np.ndarray,
    scale: np.ndarray,
    outside: Optional[np.ndarray] = None,
    outside_count: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, int]:
    """inf{λ > 0: modular(λ) <= 1} for each row of G, where scale = |B|·φ(r).

    G holds nonnegative integrand values on the cells of each ball; cells
    outside the window but inside the ball carry the value ``outside``.
    Returns (norms, bisection iterations used).
    """
    m = G.shape[0]
    G = np.where(mask, G, 0.0)
    outside = np.zeros(m) if outside is None else np.abs(outside)
    outside_count = np.zeros(m) if outside_count is None else outside_count.astype(float)

    hom = phi_Y.homogeneity()
    if hom is not None:
        k, p = hom
        total = (G**p).sum(axis=1) + outside_count * outside**p
        return k * (total / scale) ** (1.0 / p), 0

    peak = np.maximum(G.max(axis=1, initial=0.0), outside)
    norms = np.zeros(m)
    live = peak > 0
    if not np.any(live):
        return norms, 0

    args = (G[live], mask[live], outside[live], outside_count[live], scale[live])
    occupied = mask[live].sum(axis=1) + outside_count[live]
    inv = phi_Y.inverse(scale[live] / occupied)
    usable = np.isfinite(inv) & (inv > 0)
    hi = np.where(usable, peak[live] / np.where(usable, inv, 1.0), peak[live])
    for _ in range(MAX_DOUBLINGS):
        over = _row_modular(phi_Y, *args, hi) > 1.0
        if not np.any(over):
            break
        hi = np.where(over, 2.0 * hi, hi)
    else:
        raise NonConvergenceError("Luxemburg bracket did not close")
    lo = np.zeros_like(hi)

    iterations = 0
    for iterations in range(1, MAX_BISECTIONS + 1):
        active = (hi - lo) > LUXEMBURG_REL_TOL * hi
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        ok = _row_modular(phi_Y, *args, mid) <= 1.0
        hi = np.where(active & ok, mid, hi)
        lo = np.where(active & ~ok, mid, lo)
    norms[live] = hi
    return norms, iterations


def ball_norm(
    f: SampledField,
    phi_Y: YoungFunction,
    vp: GrowthFunction,
    B: Ball,
    centered: bool = False,
) -> NormResult:
    """‖f‖_{Φ,φ,B}, or ‖f − f_B‖_{Φ,φ,B} when centered."""
    mask = ball_mask(f.window, B).ravel()
    center, radius = index_units(f.window, B)
    count = lattice_count(center, radius)
    if count == 0 or not mask.any():
        raise ValueError(f"Ball {B.to_dict()} contains no cell of the window")
    values = f.flat()
    mean = values[mask].sum() / count if centered else 0.0
    G = np.abs(values - mean)[None, :]
    scale = np.array([count * float(vp(B.radius))])
    norms, iterations = luxemburg_rows(
        phi_Y,
        G,
        mask[None, :],
        scale,
        outside=np.array([mean]),
        outside_count=np.array([count - mask.sum()]),
    )
    return NormResult(float(norms[0]), B.to_dict(), iterations)


class BallNorms(NamedTuple):
    """Per-ball values for one block of a family."""

    block: BallBlock
    values: np.ndarray
    means: np.ndarray
    iterations: int = 0


def _check_family(f: SampledField, balls: BallFamily) -> None:
    if f.window != balls.window:
        raise ValueError("Field and ball family live on different windows")


def _centered_rows(values: np.ndarray, block: BallBlock, means: np.ndarray):
    G = np.abs(values[None, :] - means[:, None])
    outside_count = block.count - block.mask.sum(axis=1)
    return G, outside_count


def block_norms(
    values: np.ndarray,
    phi_Y: YoungFunction,
    vp: GrowthFunction,
    block: BallBlock,
    centered: bool = False,
) -> BallNorms:
    """Ball norms of flat field values for the balls of one block."""
    means = block.mask.astype(float) @ values / block.count
    scale = np.full(len(block.centers), block.count * float(vp(block.radius)))
    if centered:
        G, outside_count = _centered_rows(values, block, means)
        norms, used = luxemburg_rows(phi_Y, G, block.mask, scale, means, outside_count)
    else:
        G = np.broadcast_to(np.abs(values), block.mask.shape)
        norms, used = luxemburg_rows(phi_Y, G, block.mask, scale)
    return BallNorms(block, norms, means, used)


def iter_ball_norms(
    f: SampledField,
    phi_Y: YoungFunction,
    vp: GrowthFunction,
    balls: BallFamily,
    centered: bool = False,
) -> Iterator[BallNorms]:
    """‖f‖_{Φ,φ,B} (or ‖f − f_B‖_{Φ,φ,B}) for every ball of the family, block by block."""
    _check_family(f, balls)
    values = f.flat()
    for block in balls.blocks():
        yield block_norms(values, phi_Y, vp, block, centered)


def iter_campanato_p(
    f: SampledField,
    p: float,
    psi: GrowthFunction,
    balls: BallFamily,
) -> Iterator[BallNorms]:
    """(1/ψ(r))(⨍_B |f − f_B|^p)^{1/p} for every ball of the family."""
    if p < 1:
        raise ValueError(f"Campanato exponent must be >= 1, got {p}")
    _check_family(f, balls)
    values = f.flat()
    for block in balls.blocks():
        yield block_campanato_p(values, p, psi, block)


def block_campanato_p(values: np.ndarray, p: float, psi: GrowthFunction, block: BallBlock) -> BallNorms:
    means = block.mask.astype(float) @ values / block.count
    G, outside_count = _centered_rows(values, block, means)
    total = np.where(block.mask, G**p, 0.0).sum(axis=1) + outside_count * np.abs(means) ** p
    return BallNorms(block, (total / block.count) ** (1.0 / p) / float(psi(block.radius)), means)


def family_sup(balls: BallFamily, rows: Iterable[BallNorms]) -> NormResult:
    """Max over the family; the first attaining ball in enumeration order wins ties."""
    best = -1.0
    best_ball: Optional[Dict[str, Any]] = None
    iterations = 0
    for row in rows:
        iterations = max(iterations, row.iterations)
        i = int(np.argmax(row.values))
        if row.values[i] > best:
            best = float(row.values[i])
            ball = balls.ball(row.block.rung, row.block.centers[i])
            best_ball = {**ball.to_dict(), "rung": row.block.rung}
    logger.debug("Family sup %.6g attained at %s", best, best_ball)
    return NormResult(max(best, 0.0), best_ball, iterations, balls.describe())


def om_norm(
    f: SampledField,
    phi_Y: YoungFunction,
    vp: GrowthFunction,
    balls: BallFamily,
) -> NormResult:
    """max over the family of ‖f‖_{Φ,φ,B}."""
    return family_sup(balls, iter_ball_norms(f, phi_Y, vp, balls))


def campanato_norm(
    f: SampledField,
    phi_Y: YoungFunction,
    vp: GrowthFunction,
    balls: BallFamily,
) -> NormResult:
    """max over the family of ‖f − f_B‖_{Φ,φ,B}."""
    return family_sup(balls, iter_ball_norms(f, phi_Y, vp, balls, centered=True))


def campanato_p(
    f: SampledField,
    p: float,
    psi: GrowthFunction,
    balls: BallFamily,
) -> NormResult:
    """max over the family of (1/ψ(r))(⨍_B |f − f_B|^p)^{1/p}."""
    return family_sup(balls, iter_campanato_p(f, p, psi, balls))


def oscillation_profile(
    f: SampledField,
    center: Sequence[float],
    radii: Sequence[float],
) -> Dict[str, np.ndarray]:
    """Ball means f_{B(center, r)}, mean oscillations ⨍_B|f − f_B| and masses ∫_B f along the radii."""
    values = f.flat()
    means, oscillations, masses = [], [], []
    for r in radii:
        B = Ball(tuple(center), float(r))
        mask = ball_mask(f.window, B).ravel()
        c, R = index_units(f.window, B)
        count = lattice_count(c, R)
        if count == 0 or not mask.any():
            raise ValueError(f"Ball {B.to_dict()} contains no cell of the window")
        mean = values[mask].sum() / count
        osc = (np.abs(values[mask] - mean).sum() + (count - mask.sum()) * abs(mean)) / count
        means.append(mean)
        oscillations.append(osc)
        masses.append(values[mask].sum() * f.window.cell_volume)
    return {
        "radii": np.asarray(radii, dtype=float),
        "means": np.asarray(means),
        "oscillations": np.asarray(oscillations),
        "masses": np.asarray(masses),
    }


class SigmaResult(NamedTuple):
    value: float
    converged: bool
    radii: np.ndarray
    means: np.ndarray
    rate: Optional[float] = None


def default_sigma_ladder(f: SampledField) -> np.ndarray:
    """Radii h·2^j up to the window half-width."""
    w = f.window
    top = int(math.floor(math.log2(w.L / w.h) + 1e-12))
    return w.h * 2.0 ** np.arange(0, top + 1)


def inside_window(f: SampledField, radii: np.ndarray) -> np.ndarray:
    """Rungs no wider than the window half-width; wider balls see only the zero extension."""
    return radii[radii <= f.window.L * (1.0 + 1e-12)]


def sigma_limit(
    f: SampledField,
    radius_ladder: Optional[Sequence[float]] = None,
    compact: bool = False,
    center: Optional[Sequence[float]] = None,
    tol: float = SIGMA_TOL,
) -> SigmaResult:
    """σ(f) = lim_{r→∞} f_{B(0,r)} along the ladder.

    With ``compact`` only the rungs inside the window are used, and σ(f) = 0
    is accepted when ∫_{B(0,r)} f has stopped changing over the last two of
    them: the means are then mass/|B(0,r)| and tend to 0.
    """
    radii = default_sigma_ladder(f) if radius_ladder is None else np.asarray(radius_ladder, dtype=float)
    if radii.size < 2 or np.any(np.diff(radii) <= 0):
        raise ValueError("Radius ladder must be ascending with at least two rungs")
    if compact:
        radii = inside_window(f, radii)
        if radii.size < 2:
            raise ValueError("Checking σ(f) = 0 needs two rungs inside the window")
    center = [0.0] * f.window.n if center is None else list(center)
    profile = oscillation_profile(f, center, radii)
    means = profile["means"]

    rate = None
    a, b = abs(means[-2]), abs(means[-1])
    if a > 0 and b > 0:
        rate = math.log(b / a) / math.log(radii[-1] / radii[-2])

    if compact:
        masses = profile["masses"]
        converged = bool(abs(masses[-1] - masses[-2]) < tol)
        if not converged:
            logger.debug("Mass of f still moves at the window edge: %.6g, %.6g", masses[-2], masses[-1])
            return SigmaResult(float(means[-1]), False, radii, means, rate)
        return SigmaResult(0.0, True, radii, means, rate)
    converged = bool(abs(means[-1] - means[-2]) < tol)
    if not converged:
        logger.debug("σ(f) did not settle: last rungs %.6g, %.6g", means[-2], means[-1])
    return SigmaResult(float(means[-1]), converged, radii, means, rate)
