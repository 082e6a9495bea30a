"""Commutator properties: pointwise sharp bounds, Orlicz-Morrey bounds, decay at infinity and necessity."""

import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.fields import Indicator, Ramp, SampledField, support_radius
from src.core.growth import Constant, GrowthFunction, PowerNeg, check_pairing, rho_star
from src.core.norms import campanato_norm, campanato_p, inside_window, oscillation_profile
from src.core.operators import (
    apply_stencil,
    frac_maximal,
    frac_stencil,
    kernel_stencil,
    sharp_maximal,
)
from src.core.young import Power
from src.harness.base import CheckOutcome, PropertyCheck, PropertyContext, Worst, register
from src.harness.empirical import NormSpec, empirical_norm

logger = logging.getLogger(__name__)

# Spot checks need cells at distance >= 1 from the support of χ_[-1,1]
SPOT_DISTANCE = 2.0
SPOT_MIN_N = 256
HILBERT_SPOT_TOL = 1e-3
FRACT_SPOT_TOL = 1e-4
# Ball means below this fraction of ⨍_B|g| count as vanished
VANISH_FLOOR = 1e-10


def _operator(ctx: PropertyContext, kind: str) -> Tuple[np.ndarray, Dict[str, Any]]:
    """Stencil of T (kind CZ) or I_ρ (kind FRACT) on the current window."""
    if kind == "CZ":
        kernel = ctx.kernel()
        return kernel_stencil(ctx.window, kernel), {"kernel": kernel.to_dict()}
    rho = ctx.growth("rho")
    return frac_stencil(ctx.window, rho), {"rho": rho.to_dict()}


def _pairing_failure(kind: str, report) -> CheckOutcome:
    return CheckOutcome(False, report.best_constant, {"pairing": kind, "at": report.witness}, dict(report.details))


def _safe_ratio(num: float, den: float) -> Optional[float]:
    """num/den; None when both vanish."""
    if den == 0.0:
        return None if num == 0.0 else math.inf
    return num / den


def spot_cells(ctx: PropertyContext) -> np.ndarray:
    x = ctx.window.axis()
    return np.flatnonzero(np.abs(x) >= SPOT_DISTANCE)


def hilbert_spot_error(ctx: PropertyContext, stencil: np.ndarray) -> Optional[Dict[str, Any]]:
    """[x, H]χ_[-1,1] = 2/π away from the support; None when the window cannot host the check."""
    cells = spot_cells(ctx)
    if ctx.N < SPOT_MIN_N or cells.size == 0:
        return None
    b = Ramp(2.0 * ctx.window.L).sample(ctx.window)
    f = Indicator(1.0).sample(ctx.window)
    out = apply_stencil(stencil, f, b=b).flat()[cells]
    errors = np.abs(out - 2.0 / math.pi)
    i = int(np.argmax(errors))
    return {"error": float(errors[i]), "x": float(ctx.window.axis()[cells[i]]), "tolerance": HILBERT_SPOT_TOL}


def fract_spot_error(ctx: PropertyContext, stencil: np.ndarray, rho: GrowthFunction) -> Optional[Dict[str, Any]]:
    """I_ρχ_[-1,1](x) = c((|x|+1)^α − (|x|−1)^α)/α for ρ = c·r^α."""
    law = rho.power_law()
    cells = spot_cells(ctx)
    if law is None or ctx.N < SPOT_MIN_N or cells.size == 0:
        return None
    c, alpha = law
    x = np.abs(ctx.window.axis()[cells])
    expected = c * ((x + 1.0) ** alpha - (x - 1.0) ** alpha) / alpha
    out = apply_stencil(stencil, Indicator(1.0).sample(ctx.window)).flat()[cells]
    errors = np.abs(out - expected)
    i = int(np.argmax(errors))
    return {"error": float(errors[i]), "x": float(ctx.window.axis()[cells[i]]), "tolerance": FRACT_SPOT_TOL}


def spot_skipped(ctx: PropertyContext, label: str) -> Optional[Dict[str, Any]]:
    """Notice for the finest level of a run too coarse to host the closed-form spot check."""
    if not ctx.finest or ctx.N >= SPOT_MIN_N:
        return None
    logger.warning("%s spot check skipped: finest level N=%d is below N=%d", label, ctx.N, SPOT_MIN_N)
    return {"skipped": f"needs N >= {SPOT_MIN_N}", "N": ctx.N}


# Pointwise sharp-function bound


def _powered(g: SampledField, eta: float) -> SampledField:
    return g.with_values(np.abs(g.values) ** eta)


def pointwise_constant(ctx: PropertyContext, kind: str) -> CheckOutcome:
    """max over b, f and x of M♯([b,Op]f)(x) / (‖b‖(M_{ψ^η}(|Opf|^η)^{1/η} + M_{w^η}(|f|^η)^{1/η}))."""
    stencil, op_info = _operator(ctx, kind)
    psi = ctx.growth("psi", Constant(1.0))
    eta = float(ctx.setting("constants", "eta", 2.0))
    balls = ctx.balls

    weight: Union[GrowthFunction, Callable[[float], float]] = psi
    if kind == "FRACT":
        rho = ctx.growth("rho")

        def weight(r: float) -> float:
            return rho_star(rho, r) * float(psi(r))

    worst = Worst()
    for b in ctx.b_bank:
        b_norm = campanato_p(b.field, 1.0, psi, balls).value
        if b_norm == 0.0:
            continue
        for entry in ctx.bank:
            lhs = sharp_maximal(apply_stencil(stencil, entry.field, b=b.field), balls).flat()
            op_f = apply_stencil(stencil, entry.field)
            first = frac_maximal(_powered(op_f, eta), psi, balls, power=eta).flat() ** (1.0 / eta)
            second = frac_maximal(_powered(entry.field, eta), weight, balls, power=eta).flat() ** (1.0 / eta)
            denom = b_norm * (first + second)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(denom > 0, lhs / denom, np.where(lhs > 0, np.inf, 0.0))
            worst.update_array(ratio, lambda i: {"b": b.name, "field": entry.name, "cell": i})
    return worst.outcome(ctx.cap, {"eta": eta, **op_info})


@register
class CommutatorPointwiseCZ(PropertyCheck):
    name = "COMM_PW_CZ"
    description = "M♯([b,T]f) <= C‖b‖_{𝓛_{1,ψ}}(M_{ψ^η}(|Tf|^η)^{1/η} + M_{ψ^η}(|f|^η)^{1/η})"
    stability_key = "commutator_stability"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        return pointwise_constant(ctx, "CZ")


@register
class CommutatorPointwiseIR(PropertyCheck):
    name = "COMM_PW_IR"
    description = "M♯([b,I_ρ]f) <= C‖b‖_{𝓛_{1,ψ}}(M_{ψ^η}(|I_ρf|^η)^{1/η} + M_{(ρ*ψ)^η}(|f|^η)^{1/η})"
    stability_key = "commutator_stability"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        return pointwise_constant(ctx, "FRACT")


def decay_rungs(f: SampledField, support: float, radii: Sequence[float]) -> np.ndarray:
    """In-window rungs whose balls hold the whole support."""
    rungs = inside_window(f, np.asarray(radii, dtype=float))
    return rungs[rungs > support]


def mean_decay_ratio(g: SampledField, rungs: np.ndarray) -> float:
    """|g_{B(0,r)}| on the widest rung over the largest |g_{B(0,r)}| along the rungs.

    1 for a field whose ball means do not fall off; 0 when the means vanish outright.
    """
    if len(rungs) < 2:
        raise ValueError("Measuring decay needs at least two rungs")
    center = [0.0] * g.window.n
    means = np.abs(oscillation_profile(g, center, rungs)["means"])
    scale = float(np.max(oscillation_profile(g.with_values(np.abs(g.values)), center, rungs)["means"]))
    peak = float(means.max())
    if peak <= VANISH_FLOOR * scale:
        return 0.0
    return float(means[-1] / peak)


@register
class MeanVanish(PropertyCheck):
    name = "MEAN_VANISH"
    description = "Ball means of [b,Op]f for compactly supported f fall off between the support and the window edge"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        slack = float(ctx.setting("tolerances", "mean_vanish", 0.05))
        kinds = ["CZ"] + (["FRACT"] if "rho" in ctx.config.growth else [])
        stencils = {kind: _operator(ctx, kind)[0] for kind in kinds}
        radii = ctx.balls.radii

        worst = Worst()
        measured: List[str] = []
        skipped: List[str] = []
        for entry in ctx.bank:
            if not entry.spec.compact:
                continue
            support = support_radius(entry.field)
            rungs = decay_rungs(entry.field, support, radii)
            if rungs.size < 2:
                skipped.append(entry.name)
                continue
            measured.append(entry.name)
            for kind, stencil in stencils.items():
                for b in ctx.b_bank:
                    g = apply_stencil(stencil, entry.field, b=b.field)
                    ratio = mean_decay_ratio(g, rungs)
                    worst.update(ratio, {"operator": kind, "b": b.name, "field": entry.name, "support": support})
        if skipped:
            logger.debug("MEAN_VANISH skips %s: support reaches the window edge", ", ".join(skipped))
        return worst.outcome(1.0 - slack, {"operators": kinds, "measured": measured, "skipped": skipped})


# Orlicz-Morrey commutator bounds


def bound_constant(
    ctx: PropertyContext,
    stencil: np.ndarray,
    in_norm: NormSpec,
    out_norm: NormSpec,
    b_norm: Callable[[SampledField], float],
) -> Worst:
    """max over b and f of ‖[b,Op]f‖_out / (‖b‖ ‖f‖_in)."""
    balls = ctx.balls
    f_norms = [(entry, in_norm.value(entry.field, balls)) for entry in ctx.bank]
    worst = Worst()
    for b in ctx.b_bank:
        bn = b_norm(b.field)
        for entry, fn in f_norms:
            out = out_norm.value(apply_stencil(stencil, entry.field, b=b.field), balls)
            ratio = _safe_ratio(out, bn * fn)
            if ratio is not None:
                worst.update(ratio, {"b": b.name, "field": entry.name, "b_norm": bn, "f_norm": fn})
    return worst


def _with_spot(
    worst: Worst,
    ctx: PropertyContext,
    spot: Optional[Dict[str, Any]],
    details: Dict[str, Any],
) -> CheckOutcome:
    if spot is not None:
        details["spot_check"] = spot
        if "error" in spot and spot["error"] > spot["tolerance"]:
            return CheckOutcome(False, worst.value, {"spot_check": spot}, details)
    return worst.outcome(ctx.cap, details)


@register
class CommutatorBoundCZ(PropertyCheck):
    name = "COMM_BOUND_CZ"
    description = "‖[b,T]f‖_{(Ψ,φ)} <= C‖b‖_{𝓛_{1,ψ}}‖f‖_{(Φ,φ)}"
    stability_key = "commutator_stability"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi = ctx.young("Phi")
        psi_Y = ctx.young("Psi")
        vp = ctx.growth("vp")
        psi = ctx.growth("psi", Constant(1.0))
        pairing = check_pairing("CZ", phi, psi_Y, vp=vp, psi=psi, r_grid=ctx.r_grid, cap=ctx.cap)
        if not pairing.holds:
            return _pairing_failure("CZ", pairing)

        stencil, op_info = _operator(ctx, "CZ")
        worst = bound_constant(
            ctx,
            stencil,
            NormSpec("om", phi, vp),
            NormSpec("om", psi_Y, vp),
            lambda b: campanato_p(b, 1.0, psi, ctx.balls).value,
        )
        spot = None
        if ctx.n == 1 and ctx.kernel().kind == "Hilbert":
            spot = hilbert_spot_error(ctx, stencil) or spot_skipped(ctx, "[b,H]χ")
        return _with_spot(worst, ctx, spot, {"pairing_constant": pairing.best_constant, **op_info})


@register
class CommutatorBoundIR(PropertyCheck):
    name = "COMM_BOUND_IR"
    description = "‖[b,I_ρ]f‖_{(Ψ,φ)} <= C‖b‖_{𝓛_{1,ψ}}‖f‖_{(Φ,φ)}"
    stability_key = "commutator_stability"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi = ctx.young("Phi")
        psi_Y = ctx.young("Psi")
        theta_Y = ctx.young("Theta")
        vp = ctx.growth("vp")
        psi = ctx.growth("psi", Constant(1.0))
        rho = ctx.growth("rho")
        pairing = check_pairing(
            "FRACT",
            phi,
            psi_Y,
            aux={"Theta": theta_Y},
            vp=vp,
            psi=psi,
            rho=rho,
            r_grid=ctx.r_grid,
            cap=ctx.cap,
        )
        if not pairing.holds:
            return _pairing_failure("FRACT", pairing)

        stencil, op_info = _operator(ctx, "FRACT")
        worst = bound_constant(
            ctx,
            stencil,
            NormSpec("om", phi, vp),
            NormSpec("om", psi_Y, vp),
            lambda b: campanato_p(b, 1.0, psi, ctx.balls).value,
        )
        spot = None
        if ctx.n == 1 and rho.power_law() is not None:
            spot = fract_spot_error(ctx, stencil, rho) or spot_skipped(ctx, "I_ρχ")
        return _with_spot(worst, ctx, spot, {"pairing_constant": pairing.best_constant, **op_info})


def decomposed_constant(ctx: PropertyContext, kind: str) -> CheckOutcome:
    """‖[b,Op]f‖_{(Ψ,θ)} against ‖b‖ in the Campanato space of (Φ₀, ψ) and ‖f‖_{(Φ,φ)}."""
    phi = ctx.young("Phi")
    phi0 = ctx.young("Phi0")
    psi_Y = ctx.young("Psi")
    vp = ctx.growth("vp", PowerNeg(1.0))
    psi = ctx.growth("psi")
    theta = ctx.growth("theta")
    pairing = check_pairing(
        "HOLDER",
        phi,
        psi_Y,
        aux={"Phi0": phi0},
        vp=vp,
        psi=psi,
        theta_g=theta,
        r_grid=ctx.r_grid,
        cap=ctx.cap,
    )
    if not pairing.holds:
        return _pairing_failure("HOLDER", pairing)

    stencil, op_info = _operator(ctx, kind)
    worst = bound_constant(
        ctx,
        stencil,
        NormSpec("om", phi, vp),
        NormSpec("om", psi_Y, theta),
        lambda b: campanato_norm(b, phi0, psi, ctx.balls).value,
    )
    return worst.outcome(ctx.cap, {"pairing_constant": pairing.best_constant, **op_info})


@register
class CommutatorBoundCZDecomposed(PropertyCheck):
    name = "COMM_BOUND_CZ_DEC"
    description = "‖[b,T]f‖_{(Ψ,θ)} <= C‖b‖_{𝓛^{(Φ₀,ψ)}}‖f‖_{(Φ,φ)} under the Hölder pairing"
    stability_key = "commutator_stability"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        return decomposed_constant(ctx, "CZ")


@register
class CommutatorBoundIRDecomposed(PropertyCheck):
    name = "COMM_BOUND_IR_DEC"
    description = "‖[b,I_ρ]f‖_{(Ψ,θ)} <= C‖b‖_{𝓛^{(Φ₀,ψ)}}‖f‖_{(Φ,φ)} under the Hölder pairing"
    stability_key = "commutator_stability"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        return decomposed_constant(ctx, "FRACT")


@register
class NecessityRatio(PropertyCheck):
    name = "NECESSITY_RATIO"
    description = "‖b‖_{𝓛_{1,ψ}} against the empirical norm of [b,Op] from L^(Φ,φ) to L^(Ψ,φ)"
    stability_key = "commutator_stability"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        kind = "FRACT" if ctx.config.operator == "commIrho" else "CZ"
        phi = ctx.young("Phi", Power(2.0))
        psi_Y = ctx.young("Psi", Power(2.0))
        vp = ctx.growth("vp", PowerNeg(1.0))
        psi = ctx.growth("psi", Constant(1.0))
        details: Dict[str, Any] = {"operator": kind}
        if kind == "CZ":
            pairing = check_pairing("CZ_NEC", phi, psi_Y, vp=vp, psi=psi, r_grid=ctx.r_grid, cap=ctx.cap)
            if not pairing.holds:
                return _pairing_failure("CZ_NEC", pairing)
            details["pairing_constant"] = pairing.best_constant

        stencil, op_info = _operator(ctx, kind)
        in_norm, out_norm = NormSpec("om", phi, vp), NormSpec("om", psi_Y, vp)
        ratios: List[float] = []
        worst = Worst()
        for b in ctx.b_bank:
            b_norm = campanato_p(b.field, 1.0, psi, ctx.balls).value
            report = empirical_norm(
                lambda f, b=b: apply_stencil(stencil, f, b=b.field),
                ctx.bank,
                in_norm,
                out_norm,
                ctx.balls,
            )
            ratio = _safe_ratio(b_norm, report.ratio)
            if ratio is None:
                continue
            ratios.append(ratio)
            worst.update(ratio, {"b": b.name, "b_norm": b_norm, "operator_norm": report.ratio, "field": report.field_id})
        return worst.outcome(ctx.cap, {**details, **op_info, "ratios": ratios})
