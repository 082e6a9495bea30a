"""Ball-norm inequalities, sharp-function bounds and the Campanato/Morrey bridge."""

import logging
import math
from typing import Dict, Iterator, List, Tuple

import numpy as np

from src.core.fields import SampledField, ball_mask
from src.core.growth import Constant, PowerNeg, check_pairing, window_integral
from src.core.norms import (
    ball_norm,
    block_norms,
    campanato_norm,
    campanato_p,
    om_norm,
    sigma_limit,
)
from src.core.operators import sharp_maximal
from src.core.quadrature import log_integral
from src.core.young import Power, check_nabla2, inverse_young, power_compose
from src.harness.bank import BankEntry, random_steps
from src.harness.base import (
    CheckOutcome,
    PropertyCheck,
    PropertyContext,
    Worst,
    ball_witness,
    register,
)
from src.harness.young_checks import pairs_for

logger = logging.getLogger(__name__)


def _phi_vp(ctx: PropertyContext):
    return ctx.young("Phi", Power(2.0)), ctx.growth("vp", PowerNeg(1.0))


def family_means(fields: List[np.ndarray], balls) -> Dict[int, np.ndarray]:
    """Signed ball means per rung, shape (centers, fields), in family enumeration order."""
    stacked = np.stack(fields, axis=1)
    chunks: Dict[int, List[np.ndarray]] = {}
    for block in balls.blocks():
        chunks.setdefault(block.rung, []).append(block.mask.astype(float) @ stacked / block.count)
    return {rung: np.concatenate(parts, axis=0) for rung, parts in chunks.items()}


@register
class ChiNorm(PropertyCheck):
    name = "CHI_NORM"
    description = "‖cχ_B‖_{Φ,φ,B} = c/Φ⁻¹(φ(r)) and 1/Φ⁻¹(φ(r)) <= ‖χ_B‖ <= C/Φ⁻¹(φ(r))"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi, vp = _phi_vp(ctx)
        balls = ctx.balls
        half = ctx.N // 2
        if half % balls.policy.stride:
            raise ValueError(f"Ball stride {balls.policy.stride} must divide N/2={half}")
        center = np.full(ctx.n, half)
        height = float(ctx.param("chi_height", 2.0))
        tol = float(ctx.setting("tolerances", "chi_norm", 1e-8))
        cap = float(ctx.setting("caps", "chi_norm", 8.0))

        exact, lower, sandwich = Worst(), Worst(), Worst()
        for rung in balls.rungs:
            if 2**rung > half:
                continue
            B = balls.ball(rung, center)
            indicator = SampledField(ctx.window, ball_mask(ctx.window, B).astype(float))
            inv = inverse_young(phi, float(vp(B.radius)))
            witness = {"rung": rung, "ball": B.to_dict()}

            value = ball_norm(indicator * height, phi, vp, B).value
            expected = height / inv
            exact.update(abs(value - expected) / expected, {**witness, "norm": value, "expected": expected})

            om = om_norm(indicator, phi, vp, balls).value
            lower.update((1.0 / inv) / om, {**witness, "om_norm": om})
            sandwich.update(om * inv, {**witness, "om_norm": om})

        details = {
            "exact_error": exact.value,
            "lower_ratio": lower.value,
            "sandwich_constant": sandwich.value,
        }
        if exact.value > tol:
            return CheckOutcome(False, sandwich.value, exact.witness, details)
        if lower.value > 1.0 + tol:
            return CheckOutcome(False, sandwich.value, lower.witness, details)
        return sandwich.outcome(cap, details)


@register
class MeanBound(PropertyCheck):
    name = "MEAN_BOUND"
    description = "⨍_B|f| <= 2Φ⁻¹(φ(r))‖f‖_{Φ,φ,B}"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi, vp = _phi_vp(ctx)
        balls = ctx.balls
        worst = Worst()
        for block in balls.blocks():
            inv = inverse_young(phi, float(vp(block.radius)))
            weights = block.mask.astype(float)
            for entry in ctx.bank:
                values = entry.field.flat()
                norms = block_norms(values, phi, vp, block).values
                mean_abs = weights @ np.abs(values) / block.count
                with np.errstate(divide="ignore", invalid="ignore"):
                    ratio = np.where(norms > 0, mean_abs / (inv * norms), 0.0)
                worst.update_array(ratio, lambda i: ball_witness(balls, block, i, field=entry.name))
        return worst.outcome(2.0 * (1.0 + ctx.tolerances.exact))


@register
class MeanPBound(PropertyCheck):
    name = "MEAN_P_BOUND"
    description = "(⨍_B|f|^p)^{1/p} <= CΦ⁻¹(φ(r))‖f‖_{Φ,φ,B} with p = 1/θ"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi, vp = _phi_vp(ctx)
        theta = float(ctx.param("theta", 0.5))
        if not check_nabla2(phi).holds:
            raise ValueError(f"MEAN_P_BOUND needs a nabla2 Young function, got {phi.family}")
        composed = power_compose(phi, theta)
        p = 1.0 / theta
        balls = ctx.balls

        worst = Worst()
        for block in balls.blocks():
            inv = inverse_young(phi, float(vp(block.radius)))
            weights = block.mask.astype(float)
            for entry in ctx.bank:
                values = entry.field.flat()
                norms = block_norms(values, phi, vp, block).values
                p_mean = (weights @ np.abs(values) ** p / block.count) ** (1.0 / p)
                with np.errstate(divide="ignore", invalid="ignore"):
                    ratio = np.where(norms > 0, p_mean / (inv * norms), 0.0)
                worst.update_array(ratio, lambda i: ball_witness(balls, block, i, field=entry.name))
        return worst.outcome(ctx.cap, {"p": p, "composed": composed.to_dict()})


@register
class HolderBall(PropertyCheck):
    name = "HOLDER_BALL"
    description = "⨍_B|fg|/φ(r) <= 2‖f‖_{Φ,φ,B}‖g‖_{Φ̃,φ,B} on random step pairs"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        vp = ctx.growth("vp", PowerNeg(1.0))
        count = int(ctx.setting("bank", "holder_pairs", 50))
        fields = random_steps(ctx.window, 2 * count, ctx.seed + 1000)
        values = [entry.field.flat() for entry in fields]
        pairs = pairs_for([Power(2.0), Power(3.0), Power(1.5)])
        balls = ctx.balls

        worst = Worst()
        for block in balls.blocks():
            weights = block.mask.astype(float)
            scale = float(vp(block.radius))
            for phi, conj in pairs:
                f_norms = [block_norms(v, phi, vp, block).values for v in values[0::2]]
                g_norms = [block_norms(v, conj, vp, block).values for v in values[1::2]]
                for i in range(count):
                    product = weights @ np.abs(values[2 * i] * values[2 * i + 1]) / block.count
                    denom = f_norms[i] * g_norms[i]
                    with np.errstate(divide="ignore", invalid="ignore"):
                        ratio = np.where(denom > 0, product / scale / denom, np.where(product > 0, np.inf, 0.0))
                    worst.update_array(
                        ratio,
                        lambda k: ball_witness(
                            balls,
                            block,
                            k,
                            f=fields[2 * i].name,
                            g=fields[2 * i + 1].name,
                            phi=phi.to_dict(),
                        ),
                    )
        return worst.outcome(2.0 * (1.0 + ctx.tolerances.exact), {"pairs": count, "young_pairs": len(pairs)})


@register
class HolderOM(PropertyCheck):
    name = "HOLDER_OM"
    description = "‖fg‖_{(Ψ,θ)} <= 2C‖f‖_{(Φ,φ)}‖g‖_{(Φ₀,ψ)} with C from the Hölder pairing"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi = ctx.young("Phi", Power(4.0))
        phi0 = ctx.young("Phi0", Power(4.0))
        psi_Y = ctx.young("Psi", Power(2.0))
        vp = ctx.growth("vp", PowerNeg(1.0))
        psi = ctx.growth("psi", PowerNeg(1.0))
        theta = ctx.growth("theta", PowerNeg(1.0))
        pairing = check_pairing(
            "HOLDER", phi, psi_Y, {"Phi0": phi0}, vp, psi, theta, r_grid=ctx.r_grid, cap=ctx.cap
        )
        if not pairing.holds:
            return CheckOutcome(False, pairing.best_constant, {"pairing": "HOLDER", "at": pairing.witness}, {})

        bank = ctx.bank
        worst = Worst()
        for i, entry in enumerate(bank):
            other = bank[(i + 1) % len(bank)]
            f_norm = om_norm(entry.field, phi, vp, ctx.balls).value
            denom = f_norm * om_norm(other.field, phi0, psi, ctx.balls).value
            if denom == 0.0:
                continue
            value = om_norm(entry.field * other.field, psi_Y, theta, ctx.balls).value
            worst.update(value / denom, {"f": entry.name, "g": other.name})
        bound = 2.0 * pairing.best_constant * (1.0 + ctx.tolerances.exact)
        return worst.outcome(bound, {"pairing_constant": pairing.best_constant})


# Sharp maximal function and the Campanato/Morrey bridge


def _sharp_norms(
    ctx: PropertyContext, entries: List[BankEntry]
) -> Iterator[Tuple[BankEntry, float, float]]:
    """(entry, Campanato norm of f, Orlicz-Morrey norm of M♯f)."""
    phi, vp = _phi_vp(ctx)
    for entry in entries:
        campanato = campanato_norm(entry.field, phi, vp, ctx.balls).value
        sharp = om_norm(sharp_maximal(entry.field, ctx.balls), phi, vp, ctx.balls).value
        yield entry, campanato, sharp


def _quotient(num: float, den: float) -> float:
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


def _sigma(ctx: PropertyContext, entry: BankEntry):
    if entry.spec.compact:
        return sigma_limit(entry.field, ctx.balls.radii, compact=True, tol=ctx.tolerances.sigma)
    return sigma_limit(entry.field, compact=False, tol=ctx.tolerances.sigma)


def sigma_zero_fields(ctx: PropertyContext) -> Tuple[List[BankEntry], List[str]]:
    """Bank entries with σ(f) = 0 confirmed inside the window, and the names of the rest."""
    confirmed, rest = [], []
    for entry in ctx.bank:
        if entry.spec.compact and _sigma(ctx, entry).converged:
            confirmed.append(entry)
        else:
            rest.append(entry.name)
    return confirmed, rest


@register
class SharpLower(PropertyCheck):
    name = "SHARP_LOWER"
    description = "‖f‖_{𝓛^(Φ,φ)} <= C‖M♯f‖_{(Φ,φ)}"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        worst = Worst()
        for entry, campanato, sharp in _sharp_norms(ctx, ctx.bank):
            if campanato == 0.0 and sharp == 0.0:
                continue
            worst.update(_quotient(campanato, sharp), {"field": entry.name, "campanato": campanato, "sharp": sharp})
        return worst.outcome(ctx.cap)


@register
class SharpEquiv(PropertyCheck):
    name = "SHARP_EQUIV"
    description = "‖f‖_{𝓛^(Φ,φ)} and ‖M♯f‖_{(Φ,φ)} are equivalent"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        lower, upper = Worst(), Worst()
        for entry, campanato, sharp in _sharp_norms(ctx, ctx.bank):
            if campanato == 0.0 and sharp == 0.0:
                continue
            witness = {"field": entry.name, "campanato": campanato, "sharp": sharp}
            lower.update(_quotient(campanato, sharp), witness)
            upper.update(_quotient(sharp, campanato), witness)
        worst = lower if lower.value >= upper.value else upper
        return worst.outcome(ctx.cap, {"lower_constant": lower.value, "upper_constant": upper.value})


@register
class SharpMorrey(PropertyCheck):
    name = "SHARP_MORREY"
    description = "‖f‖_{(Φ,φ)} <= C‖M♯f‖_{(Φ,φ)} for fields with σ(f) = 0"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi, vp = _phi_vp(ctx)
        confirmed, skipped = sigma_zero_fields(ctx)
        if skipped:
            logger.debug("SHARP_MORREY skips %s: σ(f) = 0 not confirmed in the window", ", ".join(skipped))
        worst = Worst()
        for entry, campanato, sharp in _sharp_norms(ctx, confirmed):
            norm = om_norm(entry.field, phi, vp, ctx.balls).value
            if norm == 0.0 and sharp == 0.0:
                continue
            worst.update(_quotient(norm, sharp), {"field": entry.name, "norm": norm, "sharp": sharp})
        return worst.outcome(ctx.cap, {"sigma_zero": [entry.name for entry in confirmed], "skipped": skipped})


@register
class Bridge(PropertyCheck):
    name = "BRIDGE"
    description = "c⁻¹‖f‖_{𝓛^(Φ,φ)} <= ‖f − σ(f)‖_{(Φ,φ)} <= c‖f‖_{𝓛^(Φ,φ)}"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi, vp = _phi_vp(ctx)
        cap = float(ctx.setting("caps", "bridge", 16.0))
        worst = Worst()
        skipped: List[str] = []
        for entry in ctx.bank:
            sigma = _sigma(ctx, entry)
            if not sigma.converged:
                logger.debug("BRIDGE skips %s: σ(f) did not settle", entry.name)
                skipped.append(entry.name)
                continue
            campanato = campanato_norm(entry.field, phi, vp, ctx.balls).value
            centered = om_norm(entry.field - sigma.value, phi, vp, ctx.balls).value
            if campanato == 0.0 and centered == 0.0:
                continue
            witness = {"field": entry.name, "sigma": sigma.value, "campanato": campanato, "norm": centered}
            worst.update(max(_quotient(campanato, centered), _quotient(centered, campanato)), witness)
        return worst.outcome(cap, {"skipped": skipped})


@register
class JohnNirenbergEquiv(PropertyCheck):
    name = "JN_EQUIV"
    description = "‖b‖_{𝓛_{p,ψ}} / ‖b‖_{𝓛_{1,ψ}} stays in [1/8, 8] over the b-bank"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        psi = ctx.growth("psi", Constant(1.0))
        p = float(ctx.param("jn_p", 2.0))
        low = float(ctx.setting("caps", "jn_low", 0.125))
        high = float(ctx.setting("caps", "jn_high", 8.0))
        largest, smallest = Worst(), Worst()
        for entry in ctx.b_bank:
            one = campanato_p(entry.field, 1.0, psi, ctx.balls).value
            higher = campanato_p(entry.field, p, psi, ctx.balls).value
            if one == 0.0 and higher == 0.0:
                continue
            ratio = _quotient(higher, one)
            witness = {"field": entry.name, "p_norm": higher, "one_norm": one}
            largest.update(ratio, witness)
            smallest.update(-ratio, witness)
        lowest = -smallest.ratio if smallest.witness is not None else 1.0
        details = {"p": p, "min_ratio": lowest, "max_ratio": largest.value}
        if lowest < low:
            return CheckOutcome(False, largest.value, smallest.witness, details)
        return largest.outcome(high, details)


# Means along concentric balls


def _rung_pairs(balls, gap: int = 1) -> List[Tuple[int, int, int, int]]:
    """(rung1, count1, rung2, count2) with rung2 >= rung1 + gap."""
    rungs = list(zip(balls.rungs, balls.counts))
    return [(j1, c1, j2, c2) for a, (j1, c1) in enumerate(rungs) for j2, c2 in rungs[a + 1 :] if j2 - j1 >= gap]


@register
class Chain(PropertyCheck):
    name = "CHAIN"
    description = "|f_B1 − f_B2| against 2(|B2|/|B1|)Φ⁻¹(φ(r2)) and ∫_{r1}^{2r2}Φ⁻¹(φ(t))/t dt times ‖f‖_{𝓛^(Φ,φ)}"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi, vp = _phi_vp(ctx)
        balls = ctx.balls
        bank = ctx.bank
        norms = np.array([campanato_norm(e.field, phi, vp, balls).value for e in bank])
        means = family_means([e.field.flat() for e in bank], balls)
        pairs = _rung_pairs(balls)
        h = ctx.window.h

        def inv_at(t: float) -> float:
            return inverse_young(phi, float(vp(t)))

        nested, integral = Worst(), Worst()
        for j1, c1, j2, c2 in pairs:
            r1, r2 = h * 2.0**j1, h * 2.0**j2
            nested_scale = 2.0 * (c2 / c1) * inv_at(r2)
            chain_scale = log_integral(inv_at, r1, 2.0 * r2)
            diff = np.abs(means[j1] - means[j2])
            for k, entry in enumerate(bank):
                if norms[k] == 0.0:
                    continue

                def witness(i: int, k: int = k, entry: BankEntry = entry) -> Dict[str, object]:
                    center = balls.ball(j1, balls.center_indices[i]).center
                    return {"field": entry.name, "center": list(center), "r1": r1, "r2": r2}

                nested.update_array(diff[:, k] / (nested_scale * norms[k]), witness)
                integral.update_array(diff[:, k] / (chain_scale * norms[k]), witness)

        details = {"nested_ratio": nested.value, "integral_constant": integral.value}
        if not math.isfinite(integral.value):
            return CheckOutcome(False, nested.value, integral.witness, details)
        return nested.outcome(1.0 + ctx.tolerances.exact, details)


@register
class OscillationGrowth(PropertyCheck):
    name = "OSC_GROWTH"
    description = "|f_B(a,r) − f_B(a,s)| <= C∫_r^s ψ(t)/t dt‖f‖_{𝓛_{1,ψ}}, and the log2(s/r)ψ(s) variant"

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        psi = ctx.growth("psi", Constant(1.0))
        balls = ctx.balls
        bank = ctx.b_bank
        norms = np.array([campanato_p(e.field, 1.0, psi, balls).value for e in bank])
        means = family_means([e.field.flat() for e in bank], balls)
        h = ctx.window.h

        by_integral, by_log = Worst(), Worst()
        for j1, _, j2, _ in _rung_pairs(balls, gap=2):
            r, s = h * 2.0**j1, h * 2.0**j2
            integral = window_integral(psi, r, s)
            log_scale = math.log2(s / r) * float(psi(s))
            diff = np.abs(means[j1] - means[j2])
            for k, entry in enumerate(bank):
                if norms[k] == 0.0:
                    continue

                def witness(i: int, entry: BankEntry = entry) -> Dict[str, object]:
                    center = balls.ball(j1, balls.center_indices[i]).center
                    return {"field": entry.name, "center": list(center), "r": r, "s": s}

                by_integral.update_array(diff[:, k] / (integral * norms[k]), witness)
                by_log.update_array(diff[:, k] / (log_scale * norms[k]), witness)

        worst = by_integral if by_integral.value >= by_log.value else by_log
        return worst.outcome(
            ctx.cap, {"integral_constant": by_integral.value, "log_constant": by_log.value}
        )
