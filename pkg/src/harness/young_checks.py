"""Grid-independent identities of the Young calculus and the power-θ identity."""

import logging
import math
from typing import List, Tuple

import numpy as np

from src.core.growth import PowerNeg
from src.core.norms import om_norm
from src.core.young import (
    ExpMinusOne,
    LinearCap,
    PiecewiseLinearConvex,
    Power,
    PowerLog,
    Scaled,
    YoungFunction,
    complementary,
    power_compose,
)
from src.harness.base import CheckOutcome, PropertyCheck, PropertyContext, Worst, register

logger = logging.getLogger(__name__)


def sandwich_families() -> List[YoungFunction]:
    return [
        Power(1.0),
        Power(2.0),
        Power(3.5),
        PowerLog(2.0, 1.0),
        ExpMinusOne(),
        LinearCap(),
        Scaled(Power(2.0), 0.5),
        PiecewiseLinearConvex(((0.0, 0.0), (1.0, 0.0), (2.0, 3.0))),
    ]


def complementary_families() -> List[YoungFunction]:
    # ExpMinusOne is left out: its conjugate is a tabulated hull cut off at e^700
    return [
        Power(1.5),
        Power(2.0),
        Power(3.0),
        Scaled(Power(2.0), 1.0 / math.sqrt(2.0)),
        PowerLog(2.0, 1.0),
        LinearCap(),
        PiecewiseLinearConvex(((0.0, 0.0), (1.0, 1.0), (2.0, 3.0))),
    ]


def _scan_points(ctx: PropertyContext) -> int:
    return int(ctx.setting("grids", "inverse_scan_points", 1000))


def _ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """num/den with x/∞ = 0, 0/0 = 0 and x/0 = ∞."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.isinf(den), 0.0, num / den)
    out = np.where((num == 0) & (den == 0), 0.0, out)
    return np.where(np.isnan(out), np.inf, out)


@register
class InverseSandwich(PropertyCheck):
    name = "INVERSE_SANDWICH"
    description = "Φ(Φ⁻¹(u)) <= u <= Φ⁻¹(Φ(u)) and Φ⁻¹(2u) <= 2Φ⁻¹(u) for every family"
    refine = False

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        points = _scan_points(ctx)
        u = np.concatenate([[0.0], np.geomspace(2.0**-20, 2.0**20, points - 1)])
        positive = u[1:]
        worst = Worst()
        for phi in sandwich_families():
            inv = phi.inverse(positive)
            below = _ratio(phi.evaluate(np.where(np.isfinite(inv), inv, 0.0)), positive)
            below = np.where(np.isfinite(inv), below, 0.0)
            # u <= Φ⁻¹(Φ(u)) only where Φ(u) < ∞
            phi_u = phi.evaluate(positive)
            above = np.where(np.isfinite(phi_u), _ratio(positive, phi.inverse(phi_u)), 0.0)
            doubling = _ratio(phi.inverse(2.0 * positive), 2.0 * inv)

            checks = (
                ("Phi(inv(u)) <= u", below),
                ("u <= inv(Phi(u))", above),
                ("inv(2u) <= 2 inv(u)", doubling),
            )
            for label, ratios in checks:
                worst.update_array(
                    ratios,
                    lambda i, label=label, phi=phi: {
                        "family": phi.to_dict(),
                        "u": float(positive[i]),
                        "inequality": label,
                    },
                )
            if phi.inverse(np.array([0.0]))[0] != phi.a_phi:
                worst.update(math.inf, {"family": phi.to_dict(), "u": 0.0, "inequality": "inv(0) = a(Phi)"})

        bound = 1.0 + ctx.tolerances.exact
        return worst.outcome(bound, {"u_points": int(u.size), "families": len(sandwich_families())})


@register
class ComplementaryProduct(PropertyCheck):
    name = "COMPL_PRODUCT"
    description = "t <= Φ⁻¹(t)Φ̃⁻¹(t) <= 2t for complementary pairs"
    refine = False

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        t = np.geomspace(2.0**-20, 2.0**20, _scan_points(ctx))
        worst = Worst()
        for phi in complementary_families():
            conj = complementary(phi)
            product = phi.inverse(t) * conj.inverse(t)
            for label, ratios in (("lower", t / product), ("upper", product / (2.0 * t))):
                worst.update_array(
                    ratios,
                    lambda i, label=label, phi=phi, conj=conj: {
                        "family": phi.to_dict(),
                        "complementary": conj.to_dict(),
                        "t": float(t[i]),
                        "side": label,
                    },
                )
        return worst.outcome(1.0 + ctx.tolerances.exact, {"t_points": int(t.size)})


@register
class ThetaIdentity(PropertyCheck):
    name = "THETA_IDENTITY"
    description = "‖|g|^θ‖ under Φ equals (‖g‖ under Φ((·)^θ))^θ"
    exact = True

    def check(self, ctx: PropertyContext) -> CheckOutcome:
        phi = ctx.young("Phi", Power(4.0))
        vp = ctx.growth("vp", PowerNeg(1.0))
        theta = float(ctx.param("theta", 0.5))
        composed = power_compose(phi, theta)
        tol = float(ctx.setting("tolerances", "chi_norm", 1e-8))

        worst = Worst()
        for entry in ctx.bank:
            powered = entry.field.with_values(np.abs(entry.field.values) ** theta)
            lhs = om_norm(powered, phi, vp, ctx.balls).value
            rhs = om_norm(entry.field, composed, vp, ctx.balls).value ** theta
            if lhs == 0.0 and rhs == 0.0:
                continue
            error = abs(lhs - rhs) / max(abs(rhs), 1e-300)
            worst.update(error, {"field": entry.name, "lhs": lhs, "rhs": rhs})
        return worst.outcome(tol, {"theta": theta, "composed": composed.to_dict()})


def pairs_for(families: List[YoungFunction]) -> List[Tuple[YoungFunction, YoungFunction]]:
    return [(phi, complementary(phi)) for phi in families]
