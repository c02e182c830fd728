"""Elementary wave curves: Hugoniot locus, shock speeds, shock-curve maps, rarefactions.

Orientation
-----------
``y`` plays the role of space and ``x`` of time.  A wave separates a *left*
state (smaller ``y``) from a *right* state (larger ``y``).  Family 1 belongs to
``lambda_plus`` and family 2 to ``lambda_minus``.  For shocks the left state is
the reference ``U0`` of the Hugoniot locus and ``alpha = rho_right / rho_left``:

* S1: ``alpha <= 1``, ``v <= v0``;  S2: ``alpha >= 1``, ``v <= v0``.

Strengths are increments of the invariants measured from the left state,
``beta_minus = w_minus(left) - w_minus(right)`` and
``beta_plus = w_plus(left) - w_plus(right)``.  A family-1 wave is labelled by
``z1 = beta_minus`` (positive for S1, negative for R1) and a family-2 wave by
``z2 = beta_plus`` (negative for S2, positive for R2).  Along a shock curve the
other invariant moves by ``phi1(z1)`` or ``phi2(z2)`` respectively.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy import optimize

from .errors import InconsistentRH, NoConvergence, RangeExceeded, SonicDefectExceeded, VacuumReached
from .params import GasParams
from .state import (
    FlowState,
    _bernoulli_t,
    _eigenvalues,
    _invariants,
    _root_s,
    _u_bar,
    invariants_of,
    pow_m1,
    state_of_invariants,
)


class WaveKind(str, enum.Enum):
    S1 = "S1"
    S2 = "S2"
    R1 = "R1"
    R2 = "R2"

    @property
    def family(self) -> int:
        return 1 if self in (WaveKind.S1, WaveKind.R1) else 2

    @property
    def is_shock(self) -> bool:
        return self in (WaveKind.S1, WaveKind.S2)


@dataclass(frozen=True)
class Wave:
    """One elementary wave between ``left`` (below) and ``right`` (above).

    A zero-strength wave is stored as a rarefaction of its family with equal
    side states; ``is_trivial`` reports it.
    """

    kind: WaveKind
    strength: float
    left: FlowState
    right: FlowState
    speed_lo: float
    speed_hi: float

    @property
    def family(self) -> int:
        return self.kind.family

    @property
    def is_shock(self) -> bool:
        return self.kind.is_shock

    @property
    def is_trivial(self) -> bool:
        return self.strength == 0.0 and self.left == self.right

    @property
    def speed(self) -> float:
        return 0.5 * (self.speed_lo + self.speed_hi)


@dataclass(frozen=True)
class HugoniotPoint:
    alpha: float
    v: float
    sigma: float


# ---------------------------------------------------------------------------
# Hugoniot locus
# ---------------------------------------------------------------------------


class _HugoniotBase:
    """Quantities of the reference state reused across the locus."""

    __slots__ = ("p", "rho0", "v0", "t0", "s0", "u0", "r0g")

    def __init__(self, u0: FlowState, p: GasParams):
        self.p = p
        self.rho0 = u0.rho
        self.v0 = u0.v
        self.t0 = _bernoulli_t(u0.rho, u0.v, p)
        self.s0 = _root_s(self.t0, p)
        self.u0 = -self.t0 / (1.0 + self.s0)
        self.r0g = u0.rho ** (p.gamma - 1.0)

    def dh(self, alpha: float) -> float:
        """``h(rho0 alpha) - h(rho0)``."""
        return self.r0g * pow_m1(alpha, self.p.gamma - 1.0) / (self.p.a_inf**2)

    def jump_u(self, alpha: float, d: float) -> tuple[float, float]:
        """``D = u0 - u(rho0 alpha, v0 + d)`` and ``dD/dd``."""
        p = self.p
        tau2 = p.tau * p.tau
        dt = 2.0 * self.dh(alpha) + d * (2.0 * self.v0 + d)
        t = self.t0 + dt
        s = _root_s(t, p)
        big_d = dt * ((1.0 + self.s0) + tau2 * self.t0 / (s + self.s0)) / ((1.0 + s) * (1.0 + self.s0))
        return big_d, (self.v0 + d) / s

    def residual(self, alpha: float, d: float) -> tuple[float, float]:
        """Hugoniot function (divided by ``rho0``) and its ``d``-derivative."""
        tau2 = self.p.tau**2
        big_d, big_d1 = self.jump_u(alpha, d)
        am1 = alpha - 1.0
        k = 1.0 + tau2 * self.u0
        f = am1 * (self.v0 * d - k * big_d) + alpha * d * d + tau2 * alpha * big_d * big_d
        df = am1 * (self.v0 - k * big_d1) + 2.0 * alpha * d + 2.0 * tau2 * alpha * big_d * big_d1
        return f, df

    def tau0_jump(self, alpha: float) -> float:
        """``|v - v0|`` on the ``tau = 0`` locus."""
        am1 = alpha - 1.0
        return math.sqrt(max(2.0 * am1 * self.dh(alpha) / (alpha + 1.0), 0.0))

    def sigma(self, alpha: float, d: float) -> float:
        tau2 = self.p.tau**2
        big_d, _ = self.jump_u(alpha, d)
        num = alpha * d + (alpha - 1.0) * self.v0
        den = (alpha - 1.0) * (1.0 + tau2 * self.u0) - tau2 * alpha * big_d
        if den == 0.0:
            return big_d / d if d != 0.0 else math.nan
        return num / den


def _solve_jump(base: _HugoniotBase, alpha: float, branch: int) -> float:
    """Velocity jump ``d = v - v0`` on the locus branch with ``sign(d) = branch``."""
    if alpha == 1.0:
        return 0.0
    d0 = branch * base.tau0_jump(alpha)
    if base.p.tau == 0.0:
        return d0
    d = d0
    ok = False
    for _ in range(60):
        try:
            f, df = base.residual(alpha, d)
        except SonicDefectExceeded:
            break
        if df == 0.0:
            break
        step = f / df
        d_new = d - step
        if d_new * branch <= 0.0:
            d_new = 0.5 * d
        d = d_new
        if abs(step) <= 4e-16 * abs(d):
            ok = True
            break
    if ok:
        return d
    # Bracketed fallback: F(0) and F(far) have opposite signs on each branch.
    f = lambda dd: base.residual(alpha, dd)[0]
    near = branch * 1e-300
    far = 2.0 * d0 if d0 != 0.0 else branch * 1e-8
    for _ in range(80):
        try:
            if f(far) * f(near) < 0.0:
                return optimize.brentq(f, min(near, far), max(near, far), xtol=1e-300, rtol=4 * 2.23e-16, maxiter=500)
        except SonicDefectExceeded:
            far *= 0.7
            continue
        far *= 1.5
    raise NoConvergence(f"Hugoniot root not found for alpha={alpha}")


def hugoniot_jump(alpha: float, u0: FlowState, params: GasParams, branch: int = -1) -> float:
    """``v - v0`` on the Hugoniot locus of ``u0`` at density ratio ``alpha``.

    ``branch=-1`` is the admissible branch ``v < v0`` for a left state
    ``u0``; ``branch=+1`` is the same locus seen from its right state.
    """
    if not alpha > 0.0:
        raise VacuumReached(f"density ratio {alpha} must be positive")
    return _solve_jump(_HugoniotBase(u0, params), alpha, branch)


def hugoniot_v(alpha: float, u0: FlowState, params: GasParams) -> float:
    """Transverse velocity on the admissible Hugoniot branch through ``u0``."""
    return u0.v + hugoniot_jump(alpha, u0, params, -1)


def hugoniot_point(alpha: float, u0: FlowState, params: GasParams, branch: int = -1) -> HugoniotPoint:
    base = _HugoniotBase(u0, params)
    d = _solve_jump(base, alpha, branch)
    sigma = base.sigma(alpha, d) if alpha != 1.0 else math.nan
    return HugoniotPoint(alpha, u0.v + d, sigma)


def rh_residual(u0: FlowState, u1: FlowState, params: GasParams) -> tuple[float, float]:
    """Relative mismatch of the two jump conditions between ``u0`` and ``u1``.

    Each component uses the shock speed implied by the other component, so
    both vanish exactly when the states lie on a common Hugoniot locus.
    """
    p = params
    tau2 = p.tau * p.tau
    ua = _u_bar(u0.rho, u0.v, p)
    ub = _u_bar(u1.rho, u1.v, p)
    w1 = u1.rho * (1.0 + tau2 * ub) - u0.rho * (1.0 + tau2 * ua)
    f1 = u1.rho * u1.v - u0.rho * u0.v
    w2 = u1.v - u0.v
    f2 = ua - ub
    sig1 = f1 / w1
    sig2 = f2 / w2
    r1 = abs(sig2 * w1 - f1) / (abs(sig2 * w1) + abs(f1))
    r2 = abs(sig1 * w2 - f2) / (abs(sig1 * w2) + abs(f2))
    return r1, r2


def shock_speed(u0: FlowState, u1: FlowState, params: GasParams, tol: float | None = None) -> float:
    """Shock slope ``sigma`` from the first jump condition, checked against the second."""
    if u0 == u1:
        raise InconsistentRH("shock speed of a zero jump is undefined")
    base = _HugoniotBase(u0, params)
    alpha = u1.rho / u0.rho
    d = u1.v - u0.v
    sigma = base.sigma(alpha, d)
    big_d, _ = base.jump_u(alpha, d)
    tol = params.tol_root if tol is None else tol
    mismatch = abs(sigma * d - big_d)
    if mismatch > tol * max(1.0, abs(big_d)):
        raise InconsistentRH(f"second jump condition off by {mismatch:.3e}")
    return sigma


# ---------------------------------------------------------------------------
# shock curves in invariant coordinates
# ---------------------------------------------------------------------------


def shock_state(alpha: float, u0: FlowState, params: GasParams) -> FlowState:
    """Right state of the admissible shock with density ratio ``alpha``."""
    return FlowState(u0.rho * alpha, hugoniot_v(alpha, u0, params))


def shock_strengths(alpha: float, u0: FlowState, params: GasParams) -> tuple[float, float]:
    """``(beta_minus, beta_plus)`` of the shock with density ratio ``alpha``."""
    w0 = _invariants(u0.rho, u0.v, params)
    u1 = shock_state(alpha, u0, params)
    w1 = _invariants(u1.rho, u1.v, params)
    return w0[0] - w1[0], w0[1] - w1[1]


_ALPHA_S1 = (1e-6, 1.0)
_ALPHA_S2 = (1.0, 1e6)


def _usable_end(f, start: float, toward: float) -> float:
    """Walk ``log(alpha)`` from ``start`` toward ``toward`` until ``f`` evaluates."""
    a = start
    for _ in range(200):
        try:
            f(a)
            return a
        except (SonicDefectExceeded, NoConvergence, VacuumReached, OverflowError):
            a = 0.9 * a + 0.1 * toward
    raise RangeExceeded("no admissible end of the shock curve")


def alpha_for_strength(strength: float, family: int, u0: FlowState, params: GasParams) -> float:
    """Density ratio of the admissible shock of ``family`` with the given strength.

    ``strength`` is ``beta_minus > 0`` for family 1 and ``beta_plus < 0`` for
    family 2.  Monotonicity of the strengths in ``alpha`` makes the map
    invertible; it is evaluated by a bracketed root-find in ``log(alpha)``.
    """
    if strength == 0.0:
        return 1.0
    if family == 1:
        if strength < 0.0:
            raise ValueError("family-1 shock strength must be positive")
        g = lambda s: shock_strengths(math.exp(s), u0, params)[0] - strength
        lo = _usable_end(g, math.log(_ALPHA_S1[0]), 0.0)
        hi = 0.0
        if g(lo) < 0.0:
            raise RangeExceeded(f"beta_minus={strength} beyond the shock curve")
    else:
        if strength > 0.0:
            raise ValueError("family-2 shock strength must be negative")
        g = lambda s: shock_strengths(math.exp(s), u0, params)[1] - strength
        lo = 0.0
        hi = _usable_end(g, math.log(_ALPHA_S2[1]), 0.0)
        if g(hi) > 0.0:
            raise RangeExceeded(f"beta_plus={strength} beyond the shock curve")
    s = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * 2.23e-16, maxiter=500)
    return math.exp(s)


def phi1(beta_minus: float, u0: FlowState, params: GasParams) -> float:
    """``beta_plus`` along the S1 curve of ``u0`` as a function of ``beta_minus >= 0``."""
    if beta_minus == 0.0:
        return 0.0
    alpha = alpha_for_strength(beta_minus, 1, u0, params)
    return shock_strengths(alpha, u0, params)[1]


def phi2(beta_plus: float, u0: FlowState, params: GasParams) -> float:
    """``beta_minus`` along the S2 curve of ``u0`` as a function of ``beta_plus <= 0``."""
    if beta_plus == 0.0:
        return 0.0
    alpha = alpha_for_strength(beta_plus, 2, u0, params)
    return shock_strengths(alpha, u0, params)[0]


# ---------------------------------------------------------------------------
# rarefaction curves and wave checks
# ---------------------------------------------------------------------------


def rarefaction_state(z: float, family: int, u0: FlowState, params: GasParams) -> FlowState:
    """State reached from ``u0`` along the family's rarefaction curve.

    Family 1 holds ``w_plus`` and sets ``w_minus = w_minus0 - z`` (``z < 0``
    for an admissible R1); family 2 holds ``w_minus`` and sets
    ``w_plus = w_plus0 - z`` (``z > 0`` for an admissible R2).
    """
    if z == 0.0:
        return u0
    wm, wp = invariants_of(u0, params)
    if family == 1:
        return state_of_invariants((wm - z, wp), params)
    return state_of_invariants((wm, wp - z), params)


def family_speed(state: FlowState, family: int, params: GasParams) -> float:
    lm, lp = _eigenvalues(state.rho, state.v, params)
    return lp if family == 1 else lm


def lax_check(wave: Wave, params: GasParams) -> bool:
    """Strict Lax inequalities ``lambda(right) < sigma < lambda(left)`` for the wave's family."""
    if not wave.is_shock or wave.left == wave.right or wave.strength == 0.0:
        return False
    sigma = wave.speed_lo
    lam_l = family_speed(wave.left, wave.family, params)
    lam_r = family_speed(wave.right, wave.family, params)
    tol = params.tol_root
    return (sigma - lam_r > -tol) and (lam_l - sigma > -tol) and lam_l > lam_r
