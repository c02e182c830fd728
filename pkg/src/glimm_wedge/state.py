"""Flow states, the Bernoulli closure, eigen-structure and Riemann invariants.

A state is the pair ``U = (rho, v)`` of scaled density and transverse
velocity.  The longitudinal perturbation ``u`` is slaved to it by Bernoulli's
law,

    t(rho, v) = 2 h(rho) + v^2,      h(rho) = (rho^(gamma-1) - 1) / ((gamma-1) a_inf^2),
    u = (sqrt(1 - t tau^2) - 1) / tau^2 = -t / (1 + sqrt(1 - t tau^2)),

and the conservation law marched in ``x`` is ``W(U)_x + F(U)_y = 0`` with
``W = (rho (1 + tau^2 u), v)`` and ``F = (rho v, -u)``.

Riemann invariants
------------------
For ``tau = 0`` the invariants have the closed form

    w_minus = a_inf v + Lambda(rho),  w_plus = -a_inf v + Lambda(rho),
    Lambda(rho) = 2 (rho^((gamma-1)/2) - 1) / (gamma - 1).

For ``tau > 0`` the physical flow is irrotational and isentropic, so the
invariants are the flow angle ``theta = arctan(tau v / S)`` plus or minus the
Prandtl-Meyer function of the local Mach number ``M(rho)``:

    w_minus = (a_inf / tau) (theta + N(rho)),  w_plus = (a_inf / tau) (-theta + N(rho)),
    N(rho) = nu(M_inf) - nu(M(rho)).

Both are normalised so that ``w(1, 0) = 0`` and ``N / tau -> Lambda / a_inf``
as ``tau -> 0``.  ``w_plus`` is constant along family-1 (``lambda_plus``)
simple waves and ``w_minus`` along family-2 (``lambda_minus``) ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize

from .errors import SonicDefectExceeded, VacuumReached
from .params import GasParams


@dataclass(frozen=True, slots=True)
class FlowState:
    """Scaled density and transverse velocity."""

    rho: float
    v: float

    def __iter__(self):
        yield self.rho
        yield self.v

    def distance(self, other: "FlowState") -> float:
        return abs(self.rho - other.rho) + abs(self.v - other.v)


class InvariantPair(NamedTuple):
    w_minus: float
    w_plus: float


class ConservedFlux(NamedTuple):
    w: tuple[float, float]
    f: tuple[float, float]


# ---------------------------------------------------------------------------
# scalar building blocks
# ---------------------------------------------------------------------------


def pow_m1(rho: float, exponent: float) -> float:
    """``(rho**exponent - 1) / exponent`` with its logarithmic limit at ``exponent -> 0``."""
    lr = math.log(rho)
    if abs(exponent) < 1e-10:
        return lr * (1.0 + 0.5 * exponent * lr)
    return math.expm1(exponent * lr) / exponent


def enthalpy(rho: float, p: GasParams) -> float:
    """``h(rho) = (rho^(gamma-1) - 1) / ((gamma-1) a_inf^2)``."""
    return pow_m1(rho, p.gamma - 1.0) / (p.a_inf * p.a_inf)


def sound2(rho: float, p: GasParams) -> float:
    """Squared scaled sound speed ``rho^(gamma-1) / a_inf^2``."""
    return rho ** (p.gamma - 1.0) / (p.a_inf * p.a_inf)


def lam_tau0(rho: float, p: GasParams) -> float:
    """``Lambda(rho) = 2 (rho^((gamma-1)/2) - 1) / (gamma - 1)``."""
    return pow_m1(rho, 0.5 * (p.gamma - 1.0))


def _check_rho(rho: float, p: GasParams) -> None:
    if not rho > p.rho_floor:
        raise VacuumReached(f"density {rho!r} at or below floor {p.rho_floor}")


def _bernoulli_t(rho: float, v: float, p: GasParams) -> float:
    return 2.0 * enthalpy(rho, p) + v * v


def _root_s(t: float, p: GasParams) -> float:
    """``S = sqrt(1 - t tau^2)``, guarded."""
    arg = 1.0 - t * p.tau * p.tau
    if arg <= 0.0:
        raise SonicDefectExceeded(f"1 - t tau^2 = {arg:.3e} <= 0")
    return math.sqrt(arg)


def _u_bar(rho: float, v: float, p: GasParams) -> float:
    t = _bernoulli_t(rho, v, p)
    return -t / (1.0 + _root_s(t, p))


def bernoulli_t(state: FlowState, params: GasParams) -> float:
    """The Bernoulli combination ``t``."""
    return _bernoulli_t(state.rho, state.v, params)


def bernoulli_u(state: FlowState, params: GasParams) -> float:
    """Longitudinal perturbation ``u`` from Bernoulli's law (``-t/2`` at ``tau = 0``)."""
    return _u_bar(state.rho, state.v, params)


def u_from_t(t: float, params: GasParams) -> float:
    return -t / (1.0 + _root_s(t, params))


def conserved_and_flux(state: FlowState, params: GasParams) -> ConservedFlux:
    rho, v = state.rho, state.v
    u = _u_bar(rho, v, params)
    tau2 = params.tau * params.tau
    return ConservedFlux((rho * (1.0 + tau2 * u), v), (rho * v, -u))


# ---------------------------------------------------------------------------
# eigen-structure
# ---------------------------------------------------------------------------


def _radicand(rho: float, p: GasParams) -> float:
    """``1 - tau^2 (2 h + c^2)``, equal to ``tau^2 c^2 (M^2 - 1)``."""
    tau2 = p.tau * p.tau
    return 1.0 - tau2 * (2.0 * enthalpy(rho, p) + sound2(rho, p))


def _eigenvalues(rho: float, v: float, p: GasParams) -> tuple[float, float]:
    if p.tau == 0.0:
        c = rho ** (0.5 * (p.gamma - 1.0)) / p.a_inf
        return v - c, v + c
    tau2 = p.tau * p.tau
    t = _bernoulli_t(rho, v, p)
    s = _root_s(t, p)
    c2 = sound2(rho, p)
    rad = _radicand(rho, p)
    den = rad - tau2 * v * v
    if den <= 0.0 or rad <= 0.0:
        raise SonicDefectExceeded(f"flow is not supersonic at rho={rho}, v={v}")
    root = math.sqrt(c2 * rad)
    return (v * s - root) / den, (v * s + root) / den


def eigenvalues_array(rho: np.ndarray, v: np.ndarray, params: GasParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`eigenvalues` over arrays of densities and velocities."""
    p = params
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    g1 = p.gamma - 1.0
    a2 = p.a_inf * p.a_inf
    c2 = rho**g1 / a2
    if p.tau == 0.0:
        c = np.sqrt(c2)
        return v - c, v + c
    tau2 = p.tau * p.tau
    lr = np.log(rho)
    pm1 = lr if abs(g1) < 1e-10 else np.expm1(g1 * lr) / g1
    h = pm1 / a2
    arg = 1.0 - tau2 * (2.0 * h + v * v)
    rad = 1.0 - tau2 * (2.0 * h + c2)
    den = rad - tau2 * v * v
    if np.any(arg <= 0.0) or np.any(den <= 0.0):
        raise SonicDefectExceeded("flow is not supersonic somewhere in the array")
    s = np.sqrt(arg)
    root = np.sqrt(c2 * rad)
    return (v * s - root) / den, (v * s + root) / den


def eigenvalues(state: FlowState, params: GasParams) -> tuple[float, float]:
    """Characteristic slopes ``(lambda_minus, lambda_plus)`` in the ``(x, y)`` plane."""
    return _eigenvalues(state.rho, state.v, params)


def u_partials(state: FlowState, params: GasParams) -> tuple[float, float]:
    """``(du/drho, du/dv)`` of the Bernoulli closure."""
    rho, v = state.rho, state.v
    s = _root_s(_bernoulli_t(rho, v, params), params)
    return -(rho ** (params.gamma - 2.0)) / (params.a_inf**2 * s), -v / s


def eigenvectors(state: FlowState, params: GasParams) -> tuple[tuple[float, float], tuple[float, float]]:
    """Right eigenvectors ``(r_minus, r_plus)`` of ``(dW)^-1 dF`` (unnormalised)."""
    lm, lp = eigenvalues(state, params)
    u_rho, u_v = u_partials(state, params)
    return (-(lm + u_v), u_rho), (-(lp + u_v), u_rho)


# ---------------------------------------------------------------------------
# Riemann invariants
# ---------------------------------------------------------------------------


def _pm_k2(p: GasParams) -> float:
    """``k^2 = (gamma+1)/(gamma-1)``; infinite in the isothermal limit."""
    if p.isothermal:
        return math.inf
    return (p.gamma + 1.0) / (p.gamma - 1.0)


def _pm_offset(rho: float, p: GasParams) -> float:
    """``N(rho) = nu(M_inf) - nu(M(rho))`` computed without cancellation."""
    tau = p.tau
    a2 = p.a_inf * p.a_inf
    rad = _radicand(rho, p)
    if rad <= 0.0:
        raise SonicDefectExceeded(f"local Mach number <= 1 at rho={rho}")
    c = math.sqrt(sound2(rho, p))
    x = math.sqrt(rad) / (tau * c)
    x_ref = math.sqrt(a2 - tau * tau) / tau
    # x_ref^2 - x^2 = M_inf^2 - M^2, written to avoid subtracting large numbers
    inv = rho ** (1.0 - p.gamma)
    one_minus_inv = -math.expm1((1.0 - p.gamma) * math.log(rho))
    dm2 = (a2 / (tau * tau)) * one_minus_inv + 2.0 * enthalpy(rho, p) * a2 * inv
    d = dm2 / (x_ref + x)
    prod = x_ref * x
    k2 = _pm_k2(p)
    if math.isinf(k2):
        first = d
    else:
        k = math.sqrt(k2)
        first = k * math.atan(k * d / (k2 + prod))
    return first - math.atan(d / (1.0 + prod))


def _pm_offset_prime(rho: float, p: GasParams) -> float:
    tau = p.tau
    a2 = p.a_inf * p.a_inf
    c2 = sound2(rho, p)
    x2 = _radicand(rho, p) / (tau * tau * c2)
    x = math.sqrt(x2)
    g1 = p.gamma - 1.0
    dnu_dx = 2.0 * x2 / (((p.gamma + 1.0) + g1 * x2) * (1.0 + x2))
    dx2 = -(rho ** (p.gamma - 2.0) / (a2 * c2 * c2)) * (g1 / (tau * tau) + 2.0 / a2)
    return -dnu_dx * dx2 / (2.0 * x)


def _flow_angle(rho: float, v: float, p: GasParams) -> float:
    s = _root_s(_bernoulli_t(rho, v, p), p)
    return math.atan2(p.tau * v, s)


def _invariants(rho: float, v: float, p: GasParams) -> tuple[float, float]:
    if p.tau == 0.0:
        lam = lam_tau0(rho, p)
        av = p.a_inf * v
        return av + lam, -av + lam
    scale = p.a_inf / p.tau
    theta = _flow_angle(rho, v, p)
    n = _pm_offset(rho, p)
    return scale * (theta + n), scale * (n - theta)


def invariants_of(state: FlowState, params: GasParams, method: str = "closed") -> InvariantPair:
    """Riemann invariants ``(w_minus, w_plus)`` of a state, normalised by ``w(1, 0) = 0``.

    ``method="quadrature"`` integrates :func:`invariant_gradient` along the
    path ``(1, 0) -> (rho, 0) -> (rho, v)`` instead of using the closed form;
    it exists to cross-check the chart.
    """
    _check_rho(state.rho, params)
    if method == "closed":
        return InvariantPair(*_invariants(state.rho, state.v, params))
    if method == "quadrature":
        return _invariants_by_quadrature(state, params, v_first=False)
    if method == "quadrature_v_first":
        return _invariants_by_quadrature(state, params, v_first=True)
    raise ValueError(f"unknown method {method!r}")


def invariant_gradient(state: FlowState, params: GasParams) -> tuple[tuple[float, float], tuple[float, float]]:
    """Exact gradients ``(grad w_minus, grad w_plus)`` with respect to ``(rho, v)``."""
    rho, v = state.rho, state.v
    p = params
    if p.tau == 0.0:
        d_rho = rho ** (0.5 * (p.gamma - 3.0))
        return (d_rho, p.a_inf), (d_rho, -p.a_inf)
    tau = p.tau
    s = _root_s(_bernoulli_t(rho, v, p), p)
    one_m = 1.0 - 2.0 * tau * tau * enthalpy(rho, p)
    h_prime = rho ** (p.gamma - 2.0) / (p.a_inf * p.a_inf)
    theta_rho = tau**3 * v * h_prime / (s * one_m)
    theta_v = tau / s
    n_rho = _pm_offset_prime(rho, p)
    scale = p.a_inf / tau
    return (
        (scale * (theta_rho + n_rho), scale * theta_v),
        (scale * (n_rho - theta_rho), -scale * theta_v),
    )


def _invariants_by_quadrature(state: FlowState, p: GasParams, v_first: bool) -> InvariantPair:
    rho, v = state.rho, state.v
    opts = dict(epsabs=p.tol_quad * 1e-2, epsrel=1e-13, limit=200)

    def leg_rho(v_fixed: float, idx: int) -> float:
        if rho == 1.0:
            return 0.0
        f = lambda r: invariant_gradient(FlowState(r, v_fixed), p)[idx][0]
        return integrate.quad(f, 1.0, rho, **opts)[0]

    def leg_v(rho_fixed: float, idx: int) -> float:
        if v == 0.0:
            return 0.0
        f = lambda vv: invariant_gradient(FlowState(rho_fixed, vv), p)[idx][1]
        return integrate.quad(f, 0.0, v, **opts)[0]

    def leg_v_from_ref(idx: int) -> float:
        if v == 0.0:
            return 0.0
        f = lambda vv: invariant_gradient(FlowState(1.0, vv), p)[idx][1]
        return integrate.quad(f, 0.0, v, **opts)[0]

    out = []
    for idx in (0, 1):
        if v_first:
            out.append(leg_v_from_ref(idx) + leg_rho(v, idx))
        else:
            out.append(leg_rho(0.0, idx) + leg_v(rho, idx))
    return InvariantPair(out[0], out[1])


def sonic_density(params: GasParams) -> float:
    """Density at which the flow turns sonic (``inf`` at ``tau = 0``)."""
    p = params
    if p.tau == 0.0:
        return math.inf
    ratio = p.a_inf**2 / p.tau**2
    if p.isothermal:
        log_rho = 0.5 * (ratio - 1.0)
        return math.exp(log_rho) if log_rho < 700.0 else math.inf
    val = ((p.gamma - 1.0) * ratio + 2.0) / (p.gamma + 1.0)
    log_rho = math.log(val) / (p.gamma - 1.0)
    return math.exp(log_rho) if log_rho < 700.0 else math.inf


def _velocity_from_angle(rho: float, theta: float, p: GasParams) -> float:
    """Transverse velocity with flow angle ``theta`` at density ``rho`` (``tau > 0``)."""
    if abs(theta) >= 0.5 * math.pi:
        raise SonicDefectExceeded(f"flow angle {theta} outside (-pi/2, pi/2)")
    q2 = 1.0 - 2.0 * p.tau * p.tau * enthalpy(rho, p)
    if q2 <= 0.0:
        raise SonicDefectExceeded("Bernoulli speed vanished")
    return math.sin(theta) * math.sqrt(q2) / p.tau


def velocity_on_invariant(rho: float, value: float, which: str, params: GasParams) -> float:
    """The ``v`` with ``w_which(rho, v) = value`` (``which`` is ``"minus"`` or ``"plus"``)."""
    p = params
    sign = 1.0 if which == "minus" else -1.0
    if p.tau == 0.0:
        return sign * (value - lam_tau0(rho, p)) / p.a_inf
    n = _pm_offset(rho, p)
    theta = sign * (p.tau * value / p.a_inf - n)
    return _velocity_from_angle(rho, theta, p)


def _rho_from_offset(target: float, p: GasParams) -> float:
    """Invert ``N(rho) = target`` (``N`` is increasing in ``rho``)."""
    lo = math.log(p.rho_floor)
    rho_s = sonic_density(p)
    if math.isfinite(rho_s):
        hi = min(math.log(rho_s) - 1e-12 * max(1.0, abs(math.log(rho_s))), 200.0)
    else:
        hi = 200.0
    f = lambda s: _pm_offset(math.exp(s), p) - target
    f_lo = f(lo)
    if f_lo >= 0.0:
        raise VacuumReached("invariants lie beyond the vacuum boundary of the chart")
    try:
        f_hi = f(hi)
    except SonicDefectExceeded:
        f_hi = math.inf
    if f_hi <= 0.0:
        raise SonicDefectExceeded("invariants lie beyond the sonic boundary of the chart")
    # Newton from the tau=0 seed, falling back to a bracketed solve.
    seed_lam = target * p.a_inf / p.tau
    base = 1.0 + 0.25 * (p.gamma - 1.0) * 2.0 * seed_lam
    if p.isothermal:
        s = seed_lam
    elif base > 0.0:
        s = 2.0 * math.log(base) / (p.gamma - 1.0)
    else:
        s = 0.5 * (lo + hi)
    s = min(max(s, lo), hi)
    for _ in range(30):
        try:
            val = f(s)
            der = _pm_offset_prime(math.exp(s), p) * math.exp(s)
        except (SonicDefectExceeded, OverflowError, ValueError):
            break
        step = val / der
        s_new = s - step
        if not lo < s_new < hi:
            break
        s = s_new
        if abs(step) < 1e-15 * max(1.0, abs(s)):
            return math.exp(s)
    s = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * 2.23e-16, maxiter=400)
    return math.exp(s)


def state_of_invariants(inv: InvariantPair | tuple[float, float], params: GasParams) -> FlowState:
    """Inverse chart: the unique state with the given invariants."""
    wm, wp = inv
    p = params
    if p.tau == 0.0:
        lam = 0.5 * (wm + wp)
        v = (wm - wp) / (2.0 * p.a_inf)
        if p.isothermal:
            if lam > 700.0:
                raise SonicDefectExceeded("density overflow")
            rho = math.exp(lam)
        else:
            base = 1.0 + 0.5 * (p.gamma - 1.0) * lam
            if base <= 0.0:
                raise VacuumReached(f"w_minus + w_plus = {wm + wp} at or below the vacuum bound")
            rho = base ** (2.0 / (p.gamma - 1.0))
        if not rho > p.rho_floor:
            raise VacuumReached(f"implied density {rho} below floor")
        return FlowState(rho, v)
    scale = p.tau / p.a_inf
    theta = 0.5 * scale * (wm - wp)
    n = 0.5 * scale * (wm + wp)
    rho = _rho_from_offset(n, p)
    return FlowState(rho, _velocity_from_angle(rho, theta, p))


def check_state(state: FlowState, params: GasParams) -> None:
    """Raise if ``state`` violates the vacuum or sonic guards."""
    _check_rho(state.rho, params)
    if params.tau > 0.0:
        _eigenvalues(state.rho, state.v, params)


def speed_bound(states, params: GasParams) -> float:
    """``max |lambda|`` over a collection of states."""
    best = 0.0
    for s in states:
        lm, lp = _eigenvalues(s.rho, s.v, params)
        best = max(best, abs(lm), abs(lp))
    return best

