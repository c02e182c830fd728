"""Exact interior and boundary Riemann solvers and self-similar fan sampling.

Interior problem: a family-2 wave leaves the lower state ``left`` and a
family-1 wave arrives at the upper state ``right``.  The middle density is
found by a bracketed solve of

    V2(rho) = V1(rho),

where ``V2`` is the family-2 wave curve issuing from ``left`` (shock for
``rho > rho_left``, rarefaction otherwise) and ``V1`` is the family-1 curve
ending at ``right``.  ``V2`` decreases and ``V1`` increases in ``rho``, so the
root is unique and bracketing is robust for large data.  The wave strengths
``z = (z1, z2)`` are then read off the invariants of the three states.

Boundary problem: a single family-2 wave from ``left`` up to the wedge, whose
top state satisfies the slip condition ``v = (1 + tau^2 u) b0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import optimize

from .errors import NoConvergence, OutOfDomain, SonicDefectExceeded, VacuumReached
from .params import GasParams
from .state import (
    FlowState,
    InvariantPair,
    _bernoulli_t,
    _eigenvalues,
    _invariants,
    _root_s,
    sonic_density,
    velocity_on_invariant,
)
from .waves import (
    Wave,
    WaveKind,
    _HugoniotBase,
    _solve_jump,
    phi1,
    phi2,
)

_SNAP = 1e-13


@dataclass(frozen=True)
class RiemannFan:
    """Solution of an interior Riemann problem, states listed bottom to top."""

    left: FlowState
    middle: FlowState
    right: FlowState
    wave2: Wave
    wave1: Wave
    z: tuple[float, float]

    @property
    def waves(self) -> list[Wave]:
        return [w for w in (self.wave2, self.wave1) if not w.is_trivial]

    @property
    def is_trivial(self) -> bool:
        return self.left == self.right

    @property
    def speed_range(self) -> tuple[float, float]:
        return self.wave2.speed_lo, self.wave1.speed_hi


@dataclass(frozen=True)
class BoundaryFan:
    """Solution of the boundary Riemann problem below the wedge surface."""

    left: FlowState
    top: FlowState
    wave2: Wave
    z2: float

    @property
    def waves(self) -> list[Wave]:
        return [] if self.wave2.is_trivial else [self.wave2]

    @property
    def is_trivial(self) -> bool:
        return self.left == self.top

    @property
    def right(self) -> FlowState:
        return self.top

    @property
    def speed_range(self) -> tuple[float, float]:
        return self.wave2.speed_lo, self.wave2.speed_hi


# ---------------------------------------------------------------------------
# wave-curve composition in invariant coordinates
# ---------------------------------------------------------------------------


def wave_endpoint(z: float, family: int, omega_left: InvariantPair | tuple[float, float], params: GasParams) -> InvariantPair:
    """Invariants reached from ``omega_left`` by a family wave of strength ``z``."""
    from .state import state_of_invariants

    wm, wp = omega_left
    if z == 0.0:
        return InvariantPair(wm, wp)
    if family == 1:
        if z < 0.0:
            return InvariantPair(wm - z, wp)
        base = state_of_invariants((wm, wp), params)
        return InvariantPair(wm - z, wp - phi1(z, base, params))
    if z > 0.0:
        return InvariantPair(wm, wp - z)
    base = state_of_invariants((wm, wp), params)
    return InvariantPair(wm - phi2(z, base, params), wp - z)


def compose(z: tuple[float, float], omega_left: InvariantPair | tuple[float, float], params: GasParams) -> InvariantPair:
    """Family-2 wave ``z[1]`` from ``omega_left`` followed by family-1 wave ``z[0]``."""
    z1, z2 = z
    return wave_endpoint(z1, 1, wave_endpoint(z2, 2, omega_left, params), params)


# ---------------------------------------------------------------------------
# wave curves as functions of the middle density
# ---------------------------------------------------------------------------


class _Curve:
    """A wave curve ``rho -> v`` through an end state.

    ``family=2`` issues from ``end`` (the lower state); ``family=1`` ends at
    ``end`` (the upper state).
    """

    def __init__(self, end: FlowState, family: int, params: GasParams):
        self.end = end
        self.family = family
        self.p = params
        self.w = _invariants(end.rho, end.v, params)
        self.base = _HugoniotBase(end, params)

    def velocity(self, rho: float) -> float:
        end, p = self.end, self.p
        if rho == end.rho:
            return end.v
        if self.family == 2:
            if rho > end.rho:
                return end.v + _solve_jump(self.base, rho / end.rho, -1)
            return velocity_on_invariant(rho, self.w[0], "minus", p)
        if rho > end.rho:
            return end.v + _solve_jump(self.base, rho / end.rho, +1)
        return velocity_on_invariant(rho, self.w[1], "plus", p)


def _bracket_decreasing(f: Callable[[float], float], lo: float, hi: float, s_min: float, s_max: float) -> tuple[float, float]:
    """Expand ``[lo, hi]`` in log-density until the decreasing ``f`` changes sign."""
    step = 0.5
    while True:
        try:
            f_lo = f(lo)
        except SonicDefectExceeded:
            f_lo = -math.inf
        if f_lo >= 0.0:
            break
        if lo <= s_min:
            raise VacuumReached("wave curves do not meet above the vacuum floor")
        hi = lo
        lo = max(lo - step, s_min)
        step *= 2.0
    step = 0.5
    while True:
        try:
            f_hi = f(hi)
        except SonicDefectExceeded:
            f_hi = math.inf
        if f_hi <= 0.0:
            break
        if hi >= s_max:
            raise SonicDefectExceeded("wave curves do not meet below the sonic density")
        lo = hi
        hi = min(hi + step, s_max)
        step *= 2.0
    return lo, hi


def _solve_density(f: Callable[[float], float], rho_a: float, rho_b: float, params: GasParams) -> float:
    s_min = math.log(params.rho_floor)
    rho_s = sonic_density(params)
    s_max = min(math.log(rho_s) if math.isfinite(rho_s) else 700.0, 700.0)
    s_max -= 1e-9 * max(1.0, abs(s_max))
    lo, hi = sorted((math.log(rho_a), math.log(rho_b)))
    if lo == hi:
        lo, hi = lo - 1e-3, hi + 1e-3
    lo, hi = _bracket_decreasing(f, lo, hi, s_min, s_max)
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return math.exp(lo)
    if f_hi == 0.0:
        return math.exp(hi)
    try:
        s = optimize.brentq(f, lo, hi, xtol=1e-16, rtol=4 * 2.23e-16, maxiter=500)
    except (RuntimeError, ValueError) as exc:
        raise NoConvergence(f"middle-density solve failed: {exc}") from exc
    return math.exp(s)


def _close(a: FlowState, b: FlowState) -> bool:
    return abs(a.rho - b.rho) <= _SNAP * max(a.rho, b.rho) and abs(a.v - b.v) <= _SNAP * (1.0 + abs(a.v))


def _lam(state: FlowState, family: int, p: GasParams) -> float:
    lm, lp = _eigenvalues(state.rho, state.v, p)
    return lp if family == 1 else lm


def _make_wave(family: int, lo: FlowState, hi: FlowState, w_lo, w_hi, p: GasParams) -> Wave:
    """Wave of ``family`` from ``lo`` (below) to ``hi`` (above)."""
    if lo == hi:
        lam = _lam(lo, family, p)
        kind = WaveKind.R1 if family == 1 else WaveKind.R2
        return Wave(kind, 0.0, lo, hi, lam, lam)
    if family == 1:
        strength = w_lo[0] - w_hi[0]
        shock = hi.rho < lo.rho
        kind = WaveKind.S1 if shock else WaveKind.R1
    else:
        strength = w_lo[1] - w_hi[1]
        shock = hi.rho > lo.rho
        kind = WaveKind.S2 if shock else WaveKind.R2
    if shock:
        base = _HugoniotBase(lo, p)
        sigma = base.sigma(hi.rho / lo.rho, hi.v - lo.v)
        return Wave(kind, strength, lo, hi, sigma, sigma)
    return Wave(kind, strength, lo, hi, _lam(lo, family, p), _lam(hi, family, p))


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------


def solve_interior(left: FlowState, right: FlowState, params: GasParams) -> RiemannFan:
    """Exact solution of the interior Riemann problem ``left`` (below) / ``right`` (above)."""
    p = params
    w_l = _invariants(left.rho, left.v, p)
    w_r = _invariants(right.rho, right.v, p)
    if left == right:
        trivial2 = _make_wave(2, left, left, w_l, w_l, p)
        trivial1 = _make_wave(1, right, right, w_r, w_r, p)
        return RiemannFan(left, left, right, trivial2, trivial1, (0.0, 0.0))
    c2 = _Curve(left, 2, p)
    c1 = _Curve(right, 1, p)
    f = lambda s: c2.velocity(math.exp(s)) - c1.velocity(math.exp(s))
    rho_m = _solve_density(f, left.rho, right.rho, p)
    middle = FlowState(rho_m, c2.velocity(rho_m))
    if _close(middle, left):
        middle = left
    elif _close(middle, right):
        middle = right
    if middle == left:
        w_m = w_l
    elif middle == right:
        w_m = w_r
    else:
        w_m = _invariants(middle.rho, middle.v, p)
        # rarefaction branches hold one invariant exactly
        if middle.rho < left.rho:
            w_m = (w_l[0], w_m[1])
        if middle.rho < right.rho:
            w_m = (w_m[0], w_r[1])
    wave2 = _make_wave(2, left, middle, w_l, w_m, p)
    wave1 = _make_wave(1, middle, right, w_m, w_r, p)
    return RiemannFan(left, middle, right, wave2, wave1, (wave1.strength, wave2.strength))


def boundary_velocity(state: FlowState, params: GasParams) -> float:
    """The transverse velocity the slip condition demands at ``state``'s density and speed."""
    s = _root_s(_bernoulli_t(state.rho, state.v, params), params)
    return s * params.b0


def solve_boundary(left: FlowState, params: GasParams) -> BoundaryFan:
    """Exact solution of the boundary Riemann problem with incoming state ``left``."""
    p = params
    w_l = _invariants(left.rho, left.v, p)
    c2 = _Curve(left, 2, p)

    def g_rho(rho: float) -> float:
        v = c2.velocity(rho)
        s = _root_s(_bernoulli_t(rho, v, p), p)
        return v - s * p.b0

    if g_rho(left.rho) == 0.0:
        top = left
    else:
        rho_t = _solve_density(lambda s: g_rho(math.exp(s)), left.rho, left.rho, p)
        top = FlowState(rho_t, c2.velocity(rho_t))
        if _close(top, left):
            top = left
    w_t = w_l if top == left else _invariants(top.rho, top.v, p)
    if top != left and top.rho < left.rho:
        w_t = (w_l[0], w_t[1])
    wave2 = _make_wave(2, left, top, w_l, w_t, p)
    return BoundaryFan(left, top, wave2, wave2.strength)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def _rarefaction_interior(wave: Wave, xi: float, p: GasParams) -> FlowState:
    """State inside a rarefaction whose family eigenvalue equals ``xi``."""
    family = wave.family
    if family == 2:
        held = _invariants(wave.left.rho, wave.left.v, p)[0]
        which = "minus"
    else:
        held = _invariants(wave.right.rho, wave.right.v, p)[1]
        which = "plus"

    def state_at(s: float) -> FlowState:
        rho = math.exp(s)
        return FlowState(rho, velocity_on_invariant(rho, held, which, p))

    f = lambda s: _lam(state_at(s), family, p) - xi
    a, b = math.log(wave.left.rho), math.log(wave.right.rho)
    fa, fb = f(a), f(b)
    if fa * fb > 0.0:
        return wave.left if abs(fa) < abs(fb) else wave.right
    s = optimize.brentq(f, min(a, b), max(a, b), xtol=1e-15, rtol=4 * 2.23e-16, maxiter=300)
    return state_at(s)


def _sample_wave(wave: Wave, xi: float, p: GasParams) -> FlowState | None:
    """State at slope ``xi`` if it lies inside or before ``wave``; ``None`` if beyond it."""
    if wave.is_trivial:
        return None
    if wave.is_shock:
        return wave.left if xi < wave.speed_lo else None
    if xi <= wave.speed_lo:
        return wave.left
    if xi >= wave.speed_hi:
        return None
    return _rarefaction_interior(wave, xi, p)


def sample_fan(fan: RiemannFan | BoundaryFan, xi: float, params: GasParams) -> FlowState:
    """State of the self-similar fan at slope ``xi = dy/dx`` from its origin."""
    if fan.is_trivial:
        return fan.left
    if isinstance(fan, BoundaryFan):
        got = _sample_wave(fan.wave2, xi, params)
        return fan.top if got is None else got
    got = _sample_wave(fan.wave2, xi, params)
    if got is not None:
        return got
    got = _sample_wave(fan.wave1, xi, params)
    if got is not None:
        return fan.middle if got is fan.wave1.left else got
    return fan.right


def fan_residual(fan: RiemannFan, params: GasParams) -> float:
    """``|w(right) - H(z, w(left))|`` for an interior fan."""
    w_l = _invariants(fan.left.rho, fan.left.v, params)
    w_r = _invariants(fan.right.rho, fan.right.v, params)
    got = compose(fan.z, w_l, params)
    return max(abs(got[0] - w_r[0]), abs(got[1] - w_r[1]))


def require_inside(x: float, y: float, b0: float) -> None:
    if x < 0.0 or y > b0 * x:
        raise OutOfDomain(f"point ({x}, {y}) lies outside the flow region")
