"""Growth functions φ, ψ, ρ, θ, ω on (0, ∞) and the hypotheses built from them."""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, ClassVar, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.quadrature import (
    TRUNCATION_OCTAVES,
    NonConvergenceError,
    integral_from_zero,
    integral_to_infinity,
    log_integral,
)
from src.core.reports import ClassReport, ConditionReport, FlagResult, geometric_grid_info
from src.core.young import YoungFunction

logger = logging.getLogger(__name__)

DEFAULT_R_GRID = 2.0 ** np.arange(-20, 21)
PAIRING_CAP = 1e6
# A flag holds when its constant does not grow as the scan doubles in log-extent
STABILITY_REL = 1e-6
HOLDER_GRID_SIZE = 41

ArrayLike = Union[float, Sequence[float], np.ndarray]


class GrowthFunction(ABC):
    family: ClassVar[str] = ""

    @abstractmethod
    def _eval(self, r: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        pass

    def power_law(self) -> Optional[Tuple[float, float]]:
        """(c, e) with g(r) = c·r^e, or None."""
        return None

    def evaluate(self, r: ArrayLike) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("Growth functions are defined for r > 0")
        return self._eval(r)

    def __call__(self, r: ArrayLike) -> Union[float, np.ndarray]:
        out = self.evaluate(r)
        return float(out) if np.ndim(r) == 0 else out


@dataclass(frozen=True)
class PowerNeg(GrowthFunction):
    lam: float
    c: float = 1.0
    family: ClassVar[str] = "PowerNeg"

    def _eval(self, r: np.ndarray) -> np.ndarray:
        return self.c * r ** (-self.lam)

    def power_law(self) -> Optional[Tuple[float, float]]:
        return self.c, -self.lam

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"lam": self.lam, "c": self.c}}


@dataclass(frozen=True)
class PowerPos(GrowthFunction):
    alpha: float
    c: float = 1.0
    family: ClassVar[str] = "PowerPos"

    def _eval(self, r: np.ndarray) -> np.ndarray:
        return self.c * r**self.alpha

    def power_law(self) -> Optional[Tuple[float, float]]:
        return self.c, self.alpha

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"alpha": self.alpha, "c": self.c}}


@dataclass(frozen=True)
class PowerLogG(GrowthFunction):
    """r^a (1 + |log r|)^b."""

    a: float
    b: float
    c: float = 1.0
    family: ClassVar[str] = "PowerLogG"

    def _eval(self, r: np.ndarray) -> np.ndarray:
        return self.c * r**self.a * (1.0 + np.abs(np.log(r))) ** self.b

    def power_law(self) -> Optional[Tuple[float, float]]:
        return (self.c, self.a) if self.b == 0 else None

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"a": self.a, "b": self.b, "c": self.c}}


@dataclass(frozen=True)
class Constant(GrowthFunction):
    c: float = 1.0
    family: ClassVar[str] = "Constant"

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ValueError(f"Constant growth function must be positive, got {self.c}")

    def _eval(self, r: np.ndarray) -> np.ndarray:
        return np.full(r.shape, self.c)

    def power_law(self) -> Optional[Tuple[float, float]]:
        return self.c, 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"family": self.family, "params": {"c": self.c}}


@dataclass(frozen=True)
class Tabulated(GrowthFunction):
    """Log-linear interpolation through (r_i, g_i); constant beyond the table."""

    nodes: Tuple[float, ...]
    values: Tuple[float, ...]
    family: ClassVar[str] = "Tabulated"

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(float(x) for x in self.nodes))
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))
        if len(self.nodes) != len(self.values) or len(self.nodes) < 2:
            raise ValueError("Tabulated needs matching node/value lists of length >= 2")
        if any(x <= 0 for x in self.nodes) or any(v <= 0 for v in self.values):
            raise ValueError("Tabulated nodes and values must be strictly positive")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("Tabulated nodes must be strictly ascending")

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], nodes: ArrayLike) -> "Tabulated":
        nodes = np.asarray(nodes, dtype=float)
        return cls(tuple(nodes), tuple(np.asarray(fn(nodes), dtype=float)))

    def _eval(self, r: np.ndarray) -> np.ndarray:
        log_nodes = np.log(self.nodes)
        log_values = np.log(self.values)
        return np.exp(np.interp(np.log(r), log_nodes, log_values))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "params": {"nodes": list(self.nodes), "values": list(self.values)},
        }


GROWTH_FAMILIES = {
    "PowerNeg": lambda params: PowerNeg(float(params["lam"]), float(params.get("c", 1.0))),
    "PowerPos": lambda params: PowerPos(float(params["alpha"]), float(params.get("c", 1.0))),
    "PowerLogG": lambda params: PowerLogG(
        float(params["a"]), float(params["b"]), float(params.get("c", 1.0))
    ),
    "Constant": lambda params: Constant(float(params.get("c", 1.0))),
    "Tabulated": lambda params: Tabulated(tuple(params["nodes"]), tuple(params["values"])),
}


def growth_from_dict(data: Dict[str, Any]) -> GrowthFunction:
    family = data.get("family")
    if family not in GROWTH_FAMILIES:
        raise ValueError(f"Unknown growth family: {family}")
    try:
        return GROWTH_FAMILIES[family](data.get("params") or {})
    except KeyError as e:
        raise ValueError(f"Missing parameter {e} for growth family {family}") from e


def eval_growth(g: GrowthFunction, r: ArrayLike) -> Union[float, np.ndarray]:
    return g(r)


def _scalar(g: GrowthFunction) -> Callable[[float], float]:
    return lambda t: float(g.evaluate(np.asarray(t)))


def decay_integral(g: GrowthFunction, r: float) -> float:
    """∫_r^∞ g(t)/t dt."""
    law = g.power_law()
    if law is not None:
        c, e = law
        if e >= 0:
            raise NonConvergenceError(f"∫ g(t)/t dt diverges at infinity for exponent {e}")
        return c * r**e / (-e)
    return integral_to_infinity(_scalar(g), r)[0]


def head_integral(g: GrowthFunction, r: float) -> float:
    """∫_0^r g(t)/t dt."""
    law = g.power_law()
    if law is not None:
        c, e = law
        if e <= 0:
            raise NonConvergenceError(f"∫ g(t)/t dt diverges at zero for exponent {e}")
        return c * r**e / e
    return integral_from_zero(_scalar(g), r)[0]


def window_integral(g: GrowthFunction, lo: float, hi: float) -> float:
    """∫_lo^hi g(t)/t dt."""
    law = g.power_law()
    if law is not None:
        c, e = law
        if e == 0:
            return c * math.log(hi / lo)
        return c * (hi**e - lo**e) / e
    return log_integral(_scalar(g), lo, hi)


def rho_star(rho: GrowthFunction, r: float) -> float:
    """ρ*(r) = ∫_0^r ρ(t)/t dt."""
    if r <= 0:
        return 0.0
    return head_integral(rho, r)


def rho_star_array(rho: GrowthFunction, r: ArrayLike) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    law = rho.power_law()
    if law is not None and law[1] > 0:
        c, e = law
        return c * np.maximum(r, 0.0) ** e / e
    flat = [rho_star(rho, float(x)) for x in r.ravel()]
    return np.asarray(flat).reshape(r.shape)


def _grid(r_grid: Optional[ArrayLike]) -> np.ndarray:
    grid = DEFAULT_R_GRID if r_grid is None else np.asarray(r_grid, dtype=float)
    if grid.size < 2 or np.any(np.diff(grid) <= 0) or np.any(grid <= 0):
        raise ValueError("r_grid must be an ascending grid of positive radii")
    return grid


def _almost_decreasing_constant(values: np.ndarray) -> float:
    """max_{i<j} v_j / v_i (at least 1)."""
    running_min = np.minimum.accumulate(values)
    return float(max(1.0, np.max(values[1:] / running_min[:-1])))


def _almost_increasing_constant(values: np.ndarray) -> float:
    """max_{i<j} v_i / v_j (at least 1)."""
    running_min = np.minimum.accumulate(values[::-1])[::-1]
    return float(max(1.0, np.max(values[:-1] / running_min[1:])))


def _stable_flag(constant_fn: Callable[[np.ndarray], float], grid: np.ndarray, cap: float) -> FlagResult:
    full = constant_fn(grid)
    quarter = len(grid) // 4
    inner = grid[quarter : len(grid) - quarter] if len(grid) >= 8 else grid
    half = constant_fn(inner)
    holds = math.isfinite(full) and full <= cap and full <= half * (1.0 + STABILITY_REL)
    return FlagResult(holds=bool(holds), constant=full)


def classify_growth(
    g: GrowthFunction,
    n: int,
    r_grid: Optional[ArrayLike] = None,
    cap: float = PAIRING_CAP,
) -> ClassReport:
    """Class membership by pairwise ratio scans; a flag holds when its constant
    is finite and does not grow when the grid is widened."""
    grid = _grid(r_grid)

    def dec(rs: np.ndarray) -> float:
        return _almost_decreasing_constant(g.evaluate(rs))

    def inc(rs: np.ndarray) -> float:
        return _almost_increasing_constant(g.evaluate(rs))

    def rn_inc(rs: np.ndarray) -> float:
        return _almost_increasing_constant(g.evaluate(rs) * rs**n)

    def over_r_dec(rs: np.ndarray) -> float:
        return _almost_decreasing_constant(g.evaluate(rs) / rs)

    def doubling(rs: np.ndarray) -> float:
        steps = 2.0 ** (np.arange(-8, 9) / 8.0)
        base = g.evaluate(rs)[:, None]
        shifted = g.evaluate(rs[:, None] * steps[None, :])
        return float(np.max(np.maximum(shifted / base, base / shifted)))

    almost_dec = _stable_flag(dec, grid, cap)
    almost_inc = _stable_flag(inc, grid, cap)
    rn = _stable_flag(rn_inc, grid, cap)
    over_r = _stable_flag(over_r_dec, grid, cap)
    doubling_flag = _stable_flag(doubling, grid, cap)

    in_gdec = FlagResult(almost_dec.holds and rn.holds, max(almost_dec.constant, rn.constant))
    in_ginc = FlagResult(almost_inc.holds and over_r.holds, max(almost_inc.constant, over_r.constant))
    return ClassReport(
        in_Gdec=in_gdec,
        in_Ginc=in_ginc,
        doubling=doubling_flag,
        almost_increasing=almost_inc,
        almost_decreasing=almost_dec,
        grid=geometric_grid_info(grid.tolist()),
    )


def _ratio_report(
    lhs: np.ndarray,
    rhs: np.ndarray,
    grid: np.ndarray,
    cap: float,
    details: Optional[Dict[str, Any]] = None,
) -> ConditionReport:
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
    ratio = np.where(np.isnan(ratio), np.inf, ratio)
    idx = int(np.argmax(ratio))
    best = float(ratio[idx])
    return ConditionReport(
        holds=bool(math.isfinite(best) and best <= cap),
        best_constant=best,
        witness=float(grid[idx]),
        grid=geometric_grid_info(grid.tolist()),
        details={"cap": cap, **(details or {})},
    )


def _diverged(grid: np.ndarray, error: Exception, details: Optional[Dict[str, Any]] = None) -> ConditionReport:
    logger.warning("Condition diverged: %s", error)
    return ConditionReport(
        holds=False,
        best_constant=math.inf,
        witness=None,
        grid=geometric_grid_info(grid.tolist()),
        details={"error": str(error), **(details or {})},
    )


def check_decay_integral(
    phi: GrowthFunction,
    r_grid: Optional[ArrayLike] = None,
    r_max: Optional[float] = None,
    cap: float = PAIRING_CAP,
) -> ConditionReport:
    """max_r ∫_r^∞ φ(t)/t dt / φ(r)."""
    grid = _grid(r_grid)
    details: Dict[str, Any] = {"tail": "analytic" if phi.power_law() else "quadrature"}
    try:
        if phi.power_law() is not None:
            lhs = np.array([decay_integral(phi, r) for r in grid])
        else:
            scalar = _scalar(phi)
            lhs = []
            for r in grid:
                value, _ = integral_to_infinity(scalar, r, r_max=r_max)
                lhs.append(value)
            details["truncation"] = r_max if r_max is not None else f"r*2^{TRUNCATION_OCTAVES}"
            lhs = np.asarray(lhs)
    except NonConvergenceError as e:
        return _diverged(grid, e, details)
    return _ratio_report(lhs, phi.evaluate(grid), grid, cap, details)


def check_rho_admissible(
    rho: GrowthFunction,
    n: int,
    eps: float,
    r_grid: Optional[ArrayLike] = None,
    k1: float = 0.5,
    k2: float = 2.0,
    cap: float = PAIRING_CAP,
) -> Dict[str, ConditionReport]:
    """The four admissibility conditions on ρ keyed by
    int_rho, sup_rho, rho_rn and rho_conti."""
    if not 0.0 < eps < n:
        raise ValueError(f"eps must lie in (0, {n}), got {eps}")
    if not 0.0 < k1 < k2:
        raise ValueError(f"Need 0 < K1 < K2, got K1={k1}, K2={k2}")
    grid = _grid(r_grid)
    reports: Dict[str, ConditionReport] = {}

    try:
        value = head_integral(rho, 1.0)
        reports["int_rho"] = ConditionReport(
            holds=True,
            best_constant=value,
            witness=1.0,
            grid={"variable": "r", "kind": "point", "min": 1.0, "max": 1.0, "size": 1},
        )
    except NonConvergenceError as e:
        reports["int_rho"] = _diverged(grid, e)

    sub = 2.0 ** (np.arange(0, 17) / 16.0)
    sup_lhs = np.array([np.max(rho.evaluate(r * sub)) for r in grid])
    sup_rhs = np.array([window_integral(rho, k1 * r, k2 * r) for r in grid])
    reports["sup_rho"] = _ratio_report(sup_lhs, sup_rhs, grid, cap, {"K1": k1, "K2": k2})

    def rn_constant(rs: np.ndarray) -> float:
        return _almost_decreasing_constant(rho.evaluate(rs) / rs ** (n - eps))

    flag = _stable_flag(rn_constant, grid, cap)
    reports["rho_rn"] = ConditionReport(
        holds=flag.holds,
        best_constant=flag.constant,
        witness=None,
        grid=geometric_grid_info(grid.tolist()),
        details={"eps": eps},
    )

    if reports["int_rho"].holds:
        steps = 2.0 ** (np.arange(-8, 9) / 8.0)
        steps = steps[steps != 1.0]
        conti = []
        for r in grid:
            s = r * steps
            lhs = np.abs(rho.evaluate(r) / r**n - rho.evaluate(s) / s**n)
            rhs = np.abs(r - s) / r ** (n + 1) * rho_star(rho, r)
            conti.append(np.max(lhs / rhs))
        conti = np.asarray(conti)
        reports["rho_conti"] = _ratio_report(conti, np.ones_like(conti), grid, cap)
    else:
        reports["rho_conti"] = _diverged(grid, NonConvergenceError("rho* undefined"))
    return reports


def dini_integral(omega: GrowthFunction, log_weight: bool = False) -> float:
    """∫_0^1 ω(t)/t dt, or with the extra log(1/t) factor."""
    law = omega.power_law()
    if law is not None:
        c, e = law
        if e <= 0:
            raise NonConvergenceError(f"Dini integral diverges for exponent {e}")
        return c / e**2 if log_weight else c / e
    if log_weight:
        return integral_from_zero(lambda t: float(omega(t)) * math.log(1.0 / t), 1.0)[0]
    return integral_from_zero(_scalar(omega), 1.0)[0]


PAIRING_KINDS = ("CZ", "CZ_NEC", "FRACT", "MAXIMAL", "HOLDER", "IPVP", "IR_BOUNDED")


def check_pairing(
    kind: str,
    phi_Y: YoungFunction,
    psi_Y: Optional[YoungFunction] = None,
    aux: Optional[Dict[str, YoungFunction]] = None,
    vp: Optional[GrowthFunction] = None,
    psi: Optional[GrowthFunction] = None,
    theta_g: Optional[GrowthFunction] = None,
    rho: Optional[GrowthFunction] = None,
    r_grid: Optional[ArrayLike] = None,
    t_grid: Optional[ArrayLike] = None,
    cap: float = PAIRING_CAP,
) -> ConditionReport:
    """sup over the grid of LHS/RHS for the hypothesis named by kind."""
    if kind not in PAIRING_KINDS:
        raise ValueError(f"Unknown pairing kind: {kind}")
    aux = aux or {}
    grid = _grid(r_grid)

    def need(name: str, value: Any) -> Any:
        if value is None:
            raise ValueError(f"Pairing {kind} requires {name}")
        return value

    if kind != "HOLDER":
        vp = need("vp", vp)
        inv_phi = phi_Y.inverse(vp.evaluate(grid))

    try:
        if kind == "CZ":
            psi = need("psi", psi)
            lhs = psi.evaluate(grid) * inv_phi
            rhs = need("psi_Y", psi_Y).inverse(vp.evaluate(grid))
            return _ratio_report(lhs, rhs, grid, cap)

        if kind == "CZ_NEC":
            psi = need("psi", psi)
            lhs = need("psi_Y", psi_Y).inverse(vp.evaluate(grid))
            rhs = psi.evaluate(grid) * inv_phi
            return _ratio_report(lhs, rhs, grid, cap)

        if kind == "MAXIMAL":
            rho = need("rho", rho)
            sup_rho = _running_sup(rho, grid)
            lhs = sup_rho * inv_phi
            rhs = need("psi_Y", psi_Y).inverse(vp.evaluate(grid))
            return _ratio_report(lhs, rhs, grid, cap)

        if kind == "IPVP":
            lhs = np.array([tail_of_inverse(phi_Y, vp, r) for r in grid])
            return _ratio_report(lhs, inv_phi, grid, cap)

        if kind in ("FRACT", "IR_BOUNDED"):
            rho = need("rho", rho)
            lhs = np.array(
                [rho_star(rho, r) * inv_phi[i] + tail_of_inverse(phi_Y, vp, r, rho) for i, r in enumerate(grid)]
            )
            if kind == "IR_BOUNDED":
                rhs = need("psi_Y", psi_Y).inverse(vp.evaluate(grid))
                return _ratio_report(lhs, rhs, grid, cap)
            theta_Y = need("Theta", aux.get("Theta"))
            first = _ratio_report(lhs, theta_Y.inverse(vp.evaluate(grid)), grid, cap)
            psi = need("psi", psi)
            second = _ratio_report(
                psi.evaluate(grid) * theta_Y.inverse(vp.evaluate(grid)),
                need("psi_Y", psi_Y).inverse(vp.evaluate(grid)),
                grid,
                cap,
            )
            worst = first if first.best_constant >= second.best_constant else second
            return ConditionReport(
                holds=first.holds and second.holds,
                best_constant=max(first.best_constant, second.best_constant),
                witness=worst.witness,
                grid=first.grid,
                details={"cap": cap, "C0": first.best_constant, "C1": second.best_constant},
            )

        # HOLDER: Φ₀⁻¹(tψ(r)) Φ⁻¹(tφ(r)) <= C Ψ⁻¹(tθ(r)) on a two-variable grid
        vp = need("vp", vp)
        psi = need("psi", psi)
        theta_g = need("theta_g", theta_g)
        phi0 = need("Phi0", aux.get("Phi0"))
        psi_Y = need("psi_Y", psi_Y)
        rs = np.geomspace(grid[0], grid[-1], HOLDER_GRID_SIZE)
        ts = (
            np.geomspace(2.0**-20, 2.0**20, HOLDER_GRID_SIZE)
            if t_grid is None
            else np.asarray(t_grid, dtype=float)
        )
        R, T = np.meshgrid(rs, ts, indexing="ij")
        lhs = phi0.inverse(T * psi.evaluate(R)) * phi_Y.inverse(T * vp.evaluate(R))
        rhs = psi_Y.inverse(T * theta_g.evaluate(R))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs > 0, np.inf, 0.0))
        ratio = np.where(np.isnan(ratio), np.inf, ratio)
        i, j = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
        best = float(ratio[i, j])
        return ConditionReport(
            holds=bool(math.isfinite(best) and best <= cap),
            best_constant=best,
            witness={"r": float(rs[i]), "t": float(ts[j])},
            grid={
                "r": geometric_grid_info(rs.tolist()),
                "t": geometric_grid_info(ts.tolist(), "t"),
            },
            details={"cap": cap},
        )
    except NonConvergenceError as e:
        return _diverged(grid, e)


def _running_sup(rho: GrowthFunction, grid: np.ndarray) -> np.ndarray:
    """sup_{0<t<=r} ρ(t) on the grid, with the part below the grid sampled down to 2^-60·r."""
    below = np.geomspace(grid[0] * 2.0**-60, grid[0], 121)
    head = float(np.max(rho.evaluate(below)))
    fine = np.geomspace(grid[0], grid[-1], 16 * (len(grid) - 1) + 1)
    sup_fine = np.maximum.accumulate(np.maximum(rho.evaluate(fine), head))
    return np.interp(np.log(grid), np.log(fine), sup_fine)


def tail_of_inverse(
    phi_Y: YoungFunction,
    vp: GrowthFunction,
    r: float,
    rho: Optional[GrowthFunction] = None,
) -> float:
    """∫_r^∞ ρ(t)Φ⁻¹(φ(t))/t dt (ρ ≡ 1 when omitted), closed form for pure powers."""
    hom = phi_Y.homogeneity()
    vp_law = vp.power_law()
    rho_law = (1.0, 0.0) if rho is None else rho.power_law()
    if hom is not None and vp_law is not None and rho_law is not None:
        k, p = hom
        c_vp, e_vp = vp_law
        c_rho, e_rho = rho_law
        coef = c_rho * (c_vp ** (1.0 / p)) / k
        e = e_rho + e_vp / p
        if e >= 0:
            raise NonConvergenceError(f"Tail integral diverges (exponent {e})")
        return coef * r**e / (-e)

    def integrand(t: float) -> float:
        weight = 1.0 if rho is None else float(rho(t))
        return weight * float(phi_Y.inverse(vp.evaluate(np.asarray(t))))

    return integral_to_infinity(integrand, r)[0]


def psi_weighted_tail(
    phi_Y: YoungFunction,
    vp: GrowthFunction,
    psi: GrowthFunction,
    r: float,
    rho: Optional[GrowthFunction] = None,
) -> float:
    """∫_r^∞ ψ(t)/t (∫_t^∞ ρ(u)Φ⁻¹(φ(u))/u du) dt."""
    hom = phi_Y.homogeneity()
    vp_law = vp.power_law()
    psi_law = psi.power_law()
    rho_law = (1.0, 0.0) if rho is None else rho.power_law()
    if None not in (hom, vp_law, psi_law, rho_law):
        k, p = hom
        inner_coef = rho_law[0] * vp_law[0] ** (1.0 / p) / k
        inner_e = rho_law[1] + vp_law[1] / p
        if inner_e >= 0:
            raise NonConvergenceError(f"Inner tail diverges (exponent {inner_e})")
        e = psi_law[1] + inner_e
        if e >= 0:
            raise NonConvergenceError(f"Outer tail diverges (exponent {e})")
        return psi_law[0] * inner_coef / (-inner_e) * r**e / (-e)

    def integrand(t: float) -> float:
        return float(psi(t)) * tail_of_inverse(phi_Y, vp, t, rho)

    return integral_to_infinity(integrand, r, rel_tol=1e-7)[0]


def check_standard_kernel_dini(omega: GrowthFunction) -> Dict[str, Any]:
    """Dini and log-Dini flags of a modulus of continuity."""
    flags: Dict[str, Any] = {}
    for name, log_weight in (("dini", False), ("log_dini", True)):
        try:
            flags[name] = {"holds": True, "value": dini_integral(omega, log_weight)}
        except NonConvergenceError as e:
            flags[name] = {"holds": False, "value": math.inf, "error": str(e)}
    return flags

