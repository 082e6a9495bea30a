"""Maximal-operator, dyadic, fractional-integral and tail properties."""

import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from src.core.fields import Ball, dyadic_family
from src.core.growth import Constant, GrowthFunction, PowerNeg, PowerPos, check_pairing
from src.core.norms import campanato_p, om_norm
from src.core.operators import (
    KernelSpec,
    apply_stencil,
    commutator,
    dyadic_maximal,
    dyadic_sharp,
    frac_maximal,
    frac_stencil,
    hl_maximal,
    l2_bound,
    tail_bound_check,
    two_ball_commutator,
)
from src.core.young import Power, YoungFunction, check_nabla2
from src.harness.bank import random_steps
from src.harness.base import CheckOutcome, PropertyCheck, PropertyContext, Worst, register
from src.harness.empirical import NormSpec, empirical_norm

logger = logging.getLogger(__name__)

# (p, q, λ) with Φ = t^p, Ψ = t^q, φ = r^-λ and ρ = r^(λ/p − λ/q)
MAXIMAL_TRIPLES = ((2.0, 4.0, 1.0), (1.5, 3.0, 1.0))


def _dyadic_depth(ctx: PropertyContext) -> int:
    return min(ctx.N.bit_length() - 1, 6)


@register
class GoodLambda(PropertyCheck):
    name = "GOODLAMBDA"
    description = "|{M^d f > 2λ, M♯d f <= γλ}| <= 2^n γ |{M^d f > λ}| in the discrete measure"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        count = int(ctx.setting("bank", "goodlambda_fields", 100))
        grid = int(ctx.setting("bank", "lambda_grid", 32))
        family = dyadic_family(ctx.window, _dyadic_depth(ctx))
        gammas = [2.0**-k for k in range(4)]

        worst = Worst()
        for entry in random_steps(ctx.window, count, ctx.seed):
            md = family.restrict(dyadic_maximal(entry.field, family))
            ms = family.restrict(dyadic_sharp(entry.field, family))
            mean_abs = float(np.abs(family.restrict(entry.field)).mean())
            top = float(md.max())
            if top <= mean_abs:
                continue
            for lam in np.linspace(mean_abs, top, grid + 1)[1:]:
                above = np.count_nonzero(md > lam)
                for gamma in gammas:
                    lhs = np.count_nonzero((md > 2.0 * lam) & (ms <= gamma * lam))
                    rhs = 2**ctx.n * gamma * above
                    ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
                    worst.update(
                        ratio,
                        lambda: {"field": entry.name, "lambda": float(lam), "gamma": gamma, "lhs": lhs, "rhs": rhs},
                    )
        return worst.outcome(1.0, {"fields": count, "depth": family.depth, "lambda_grid": grid})


def dyadic_modular_constant(p: float, n: int) -> float:
    """Constant of the modular inequality for Φ = t^p with γ chosen so that 2^(n+1)γC_Φ' = 1/2."""
    return 4.0 * 2.0 ** (p - 1.0) * 2.0 ** (p * (n + p + 1.0)) + 2.0 ** (p + 1.0)


@register
class DyadicModular(PropertyCheck):
    name = "DYADIC_MODULAR"
    description = "Σ_Q Φ(M^d_Q(f − f_Q)) <= K Σ_Q Φ(M♯d_Q f) for Φ = t^p"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        family = dyadic_family(ctx.window, _dyadic_depth(ctx))
        worst = Worst()
        constants = {}
        for p in (1.5, 2.0, 3.0):
            phi = Power(p)
            K = dyadic_modular_constant(p, ctx.n)
            constants[str(p)] = K
            for entry in ctx.bank:
                local = family.restrict(entry.field)
                centered = entry.field - float(local.mean())
                lhs = float(phi.evaluate(family.restrict(dyadic_maximal(centered, family))).sum())
                rhs = float(phi.evaluate(family.restrict(dyadic_sharp(entry.field, family))).sum())
                ratio = lhs / (K * rhs) if rhs > 0 else (0.0 if lhs == 0 else math.inf)
                worst.update(ratio, {"field": entry.name, "p": p, "lhs": lhs, "rhs": rhs})
        return worst.outcome(1.0, {"constants": constants, "depth": family.depth})


# Maximal operators on Orlicz-Morrey spaces


def _maximal_triples(ctx: PropertyContext) -> List[Tuple[YoungFunction, YoungFunction, GrowthFunction, GrowthFunction]]:
    triples = ctx.param("maximal_triples", MAXIMAL_TRIPLES)
    out = []
    for p, q, lam in triples:
        alpha = lam / p - lam / q
        out.append((Power(p), Power(q), PowerNeg(lam), PowerPos(alpha)))
    return out


def _maximal_pairing(ctx: PropertyContext, phi, psi_Y, vp, rho) -> Optional[CheckOutcome]:
    pairing = check_pairing("MAXIMAL", phi, psi_Y, vp=vp, rho=rho, r_grid=ctx.r_grid, cap=ctx.cap)
    if pairing.holds:
        return None
    witness = {"pairing": "MAXIMAL", "rho": rho.to_dict(), "at": pairing.witness}
    return CheckOutcome(False, pairing.best_constant, witness, {})


@register
class FracMaximalPointwise(PropertyCheck):
    name = "MR_POINTWISE"
    description = "Ψ(M_ρf/(C₁‖f‖)) <= Φ(Mf/‖f‖) with the smallest C₁ over the bank"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        balls = ctx.balls
        worst = Worst()
        constants: Dict[str, float] = {}
        for phi, psi_Y, vp, rho in _maximal_triples(ctx):
            failed = _maximal_pairing(ctx, phi, psi_Y, vp, rho)
            if failed is not None:
                return failed
            local = Worst()
            for entry in ctx.bank:
                norm = om_norm(entry.field, phi, vp, balls).value
                if norm == 0.0:
                    continue
                a = frac_maximal(entry.field, rho, balls).flat() / norm
                b = phi.evaluate(hl_maximal(entry.field, balls).flat() / norm)
                inv = psi_Y.inverse(b)
                with np.errstate(divide="ignore", invalid="ignore"):
                    ratio = np.where(a > 0, a / inv, 0.0)
                local.update_array(ratio, lambda i: {"field": entry.name, "cell": i, "rho": rho.to_dict()})
            constants[f"p={phi.p},q={psi_Y.p}"] = local.value
            if local.witness is not None:
                worst.update(local.value, local.witness)
        return worst.outcome(ctx.cap, {"C1": constants})


@register
class FracMaximalBounded(PropertyCheck):
    name = "MR_BOUNDED"
    description = "Empirical norm of M_ρ from L^(Φ,φ) to L^(Ψ,φ)"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        balls = ctx.balls
        worst = Worst()
        for phi, psi_Y, vp, rho in _maximal_triples(ctx):
            failed = _maximal_pairing(ctx, phi, psi_Y, vp, rho)
            if failed is not None:
                return failed
            report = empirical_norm(
                lambda f: frac_maximal(f, rho, balls),
                ctx.bank,
                NormSpec("om", phi, vp),
                NormSpec("om", psi_Y, vp),
                balls,
            )
            worst.update(report.ratio, {"field": report.field_id, "rho": rho.to_dict()})
        return worst.outcome(ctx.cap)


@register
class MaximalBounded(PropertyCheck):
    name = "M_BOUNDED"
    description = "Empirical norm of M on L^(Φ,φ)"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi = ctx.young("Phi", Power(2.0))
        vp = ctx.growth("vp", PowerNeg(1.0))
        spec = NormSpec("om", phi, vp)
        report = empirical_norm(lambda f: hl_maximal(f, ctx.balls), ctx.bank, spec, spec, ctx.balls)
        worst = Worst()
        worst.update(report.ratio, {"field": report.field_id})
        return worst.outcome(ctx.cap, {"ratios": report.ratios})


def modular_constant(phi: YoungFunction, magnitude: np.ndarray, target: float) -> float:
    """Smallest C >= 1 with Σ Φ(C|f|) >= target."""
    base = float(phi.evaluate(magnitude).sum())
    if base >= target:
        return 1.0
    hom = phi.homogeneity()
    if hom is not None:
        return (target / base) ** (1.0 / hom[1])

    def gap(c: float) -> float:
        return float(phi.evaluate(c * magnitude).sum()) - target

    hi = 2.0
    while gap(hi) < 0:
        hi *= 2.0
    return brentq(gap, hi / 2.0, hi, xtol=1e-12, rtol=1e-10)


@register
class MaximalModular(PropertyCheck):
    name = "MAXIMAL_MODULAR"
    description = "Σ Φ(Mf) <= Σ Φ(C|f|) with a single C over the bank"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi = ctx.young("Phi", Power(2.0))
        if not check_nabla2(phi).holds:
            raise ValueError(f"MAXIMAL_MODULAR needs a nabla2 Young function, got {phi.family}")
        worst = Worst()
        for entry in ctx.bank:
            magnitude = np.abs(entry.field.flat())
            if not np.any(magnitude > 0):
                continue
            target = float(phi.evaluate(hl_maximal(entry.field, ctx.balls).flat()).sum())
            worst.update(modular_constant(phi, magnitude, target), {"field": entry.name})
        return worst.outcome(ctx.cap)


@register
class FracIntegralBounded(PropertyCheck):
    name = "IR_BOUNDED"
    description = "Empirical norm of I_ρ from L^(Φ,φ) to L^(Ψ,φ) under the boundedness pairing"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi = ctx.young("Phi")
        psi_Y = ctx.young("Psi")
        vp = ctx.growth("vp")
        rho = ctx.growth("rho")
        pairing = check_pairing("IR_BOUNDED", phi, psi_Y, vp=vp, rho=rho, r_grid=ctx.r_grid, cap=ctx.cap)
        if not pairing.holds:
            return CheckOutcome(False, pairing.best_constant, {"pairing": "IR_BOUNDED", "at": pairing.witness}, {})

        stencil = frac_stencil(ctx.window, rho)
        report = empirical_norm(
            lambda f: apply_stencil(stencil, f),
            ctx.bank,
            NormSpec("om", phi, vp),
            NormSpec("om", psi_Y, vp),
            ctx.balls,
        )
        worst = Worst()
        worst.update(report.ratio, {"field": report.field_id})
        return worst.outcome(ctx.cap, {"pairing_constant": pairing.best_constant})


# Calderón-Zygmund operator


@register
class TwoBall(PropertyCheck):
    name = "TWO_BALL"
    description = "The two-ball representation of [b,T]f does not depend on the ball"
    exact = True

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        kernel = ctx.kernel()
        tol = float(ctx.param("two_ball_tolerance", 1e-10))
        fields = ctx.bank[: int(ctx.param("two_ball_fields", 4))]
        N = ctx.N
        balls = [
            ctx.balls.ball(2, np.full(ctx.n, N // 2)),
            ctx.balls.ball(3, np.full(ctx.n, N // 4)),
        ]
        worst = Worst()
        for b in ctx.b_bank:
            for entry in fields:
                direct = commutator("CZ", b.field, entry.field, kernel).field.flat()
                scale = max(1.0, float(np.max(np.abs(direct))))
                for B in balls:
                    split = two_ball_commutator(b.field, entry.field, kernel, B).flat()
                    error = float(np.max(np.abs(split - direct))) / scale
                    worst.update(error, {"b": b.name, "field": entry.name, "ball": B.to_dict()})
        return worst.outcome(tol)


@register
class L2Bound(PropertyCheck):
    name = "L2_BOUND"
    description = "Empirical ℓ² operator norm of the discrete T"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        kernel = ctx.kernel()
        sigma = l2_bound(ctx.window, kernel, seed=ctx.seed)
        worst = Worst()
        worst.update(sigma, {"kernel": kernel.to_dict()})
        return worst.outcome(ctx.cap)


# Tail integrals beyond 2B


def tail_balls(ctx: PropertyContext) -> List[Ball]:
    rungs = int(ctx.setting("bank", "tail_rungs", 4))
    centers = (ctx.N // 2, ctx.N // 4)
    return [ctx.balls.ball(j, np.full(ctx.n, c)) for c in centers for j in range(1, rungs + 1)]


def tail_constant(
    ctx: PropertyContext,
    kernel: Optional[KernelSpec] = None,
    rho: Optional[GrowthFunction] = None,
    weighted: bool = False,
) -> CheckOutcome:
    """Largest far-field/tail-bound ratio over the bank, the tail balls and (when weighted) the b-bank."""
    phi = ctx.young("Phi", Power(2.0))
    vp = ctx.growth("vp", PowerNeg(1.0))
    psi = ctx.growth("psi", Constant(1.0)) if weighted else None
    k1 = float(ctx.setting("constants", "tail_K1", 1.0))
    balls = ctx.balls

    f_norms = [(entry, om_norm(entry.field, phi, vp, balls).value) for entry in ctx.bank]
    if weighted:
        b_terms = [(b, campanato_p(b.field, 1.0, psi, balls).value) for b in ctx.b_bank]
    else:
        b_terms = [(None, None)]

    worst = Worst()
    for b, b_norm in b_terms:
        if weighted and b_norm == 0.0:
            continue
        for entry, f_norm in f_norms:
            if f_norm == 0.0:
                continue
            for B in tail_balls(ctx):
                report = tail_bound_check(
                    entry.field,
                    B,
                    phi,
                    vp,
                    balls,
                    kernel=kernel,
                    rho=rho,
                    b=b.field if b is not None else None,
                    psi=psi,
                    spec=entry.spec,
                    k1=k1,
                    norm_f=f_norm,
                    norm_b=b_norm,
                )
                witness = {"field": entry.name, **report.witness}
                if b is not None:
                    witness["b"] = b.name
                worst.update(report.best_constant, witness)
    return worst.outcome(ctx.cap, {"balls": len(tail_balls(ctx))})


@register
class TailCZ(PropertyCheck):
    name = "TAIL_CZ"
    description = "∫_{ℝⁿ∖2B}|K(x,y)f(y)|dy <= C∫_{2r}^∞Φ⁻¹(φ(t))/t dt‖f‖_{(Φ,φ)}"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        return tail_constant(ctx, kernel=ctx.kernel())


@register
class TailCZPsi(PropertyCheck):
    name = "TAIL_CZ_PSI"
    description = "ψ-weighted CZ tail with |b(y) − b_B| against ‖b‖_{𝓛_{1,ψ}}"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        return tail_constant(ctx, kernel=ctx.kernel(), weighted=True)


@register
class TailIR(PropertyCheck):
    name = "TAIL_IR"
    description = "∫_{ℝⁿ∖2B}ρ(|x−y|)|x−y|^{-n}|f(y)|dy <= C∫_{K₁r}^∞ρ(t)Φ⁻¹(φ(t))/t dt‖f‖_{(Φ,φ)}"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        return tail_constant(ctx, rho=ctx.growth("rho"))


@register
class TailIRPsi(PropertyCheck):
    name = "TAIL_IR_PSI"
    description = "ψ-weighted I_ρ tail with |b(y) − b_B| against ‖b‖_{𝓛_{1,ψ}}"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        return tail_constant(ctx, rho=ctx.growth("rho"), weighted=True)
