"""Interaction-estimate probes.

Each probe draws admissible incoming wave configurations, solves the
outgoing Riemann problem (interior or at the wedge surface) and records the
statistic that the corresponding estimate constrains: an exact identity, a
damping constant or a growth constant normalised by ``gamma - 1 + tau^2``.

Strength conventions follow :mod:`glimm_wedge.waves`: family-1 waves carry
``z1`` (S1 positive, R1 negative), family-2 waves carry ``z2`` (S2 negative,
R2 positive).  Incoming configurations are listed from bottom to top.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ConfigError, GlimmWedgeError, UnsupportedTau
from .params import GasParams
from .riemann import solve_boundary, solve_interior
from .state import FlowState, _root_s, _bernoulli_t, invariants_of, state_of_invariants
from .waves import alpha_for_strength, family_speed, phi1, phi2, rarefaction_state, shock_speed, shock_state

EXACT_TOL = 1e-10
# reflected waves weaker than this are indistinguishable from round-off
_REFLECTED_FLOOR = 1e-12

_FAMILY = {"S1": 1, "R1": 1, "S2": 2, "R2": 2}
_SIGN = {"S1": 1.0, "R1": -1.0, "S2": -1.0, "R2": 1.0}


@dataclass(frozen=True)
class ProbeCase:
    """One interaction pattern and the statistic recorded for it.

    ``incoming`` lists wave kinds bottom to top; ``boundary`` means the top
    state lies on the wedge surface and the outgoing problem is the boundary
    one.  ``statistic`` is one of ``"pair_max"``, ``"growth_max"``,
    ``"damping_min"``, ``"ratio_max"``, ``"exact"`` or ``"slope"``.
    """

    case_id: str
    incoming: tuple[str, ...]
    boundary: bool
    statistic: str
    summary: str
    tau0_only: bool = False


CASES: dict[str, ProbeCase] = {
    c.case_id: c
    for c in (
        ProbeCase("L3.1", ("S1",), False, "pair_max", "same-strength S1 curves from states differing in w_plus", True),
        ProbeCase("L3.2", ("S2",), False, "pair_max", "same-strength S2 curves from states differing in w_minus", True),
        ProbeCase("L3.3", ("S1",), False, "pair_max", "L3.1 comparison for tau >= 0"),
        ProbeCase("L3.4", ("S2",), False, "pair_max", "L3.2 comparison for tau >= 0"),
        ProbeCase("L3.5.1", ("S1", "S2"), False, "growth_max", "S1 below S2, growth beyond |beta| + |nu|"),
        ProbeCase("L3.5.2", ("R1", "S2"), False, "exact", "R1 below S2 keeps |beta|"),
        ProbeCase("L3.5.3", ("S2", "S2"), False, "exact", "two S2 merge into |beta1| + |beta2|"),
        ProbeCase("L3.5.4", ("R2", "S2"), False, "growth_max", "R2 below S2, growth beyond |beta|"),
        ProbeCase("L3.5.5", ("S2", "R2"), False, "damping_min", "S2 below R2, damping of the reflected S1"),
        ProbeCase("L3.5.6", ("R1", "R2"), False, "exact", "R1 below R2 pass through unchanged"),
        ProbeCase("L3.5.7", ("R1", "S1"), False, "damping_min", "R1 below S1, damping of the reflected S2"),
        ProbeCase("L3.5.8", ("S1", "S1"), False, "exact", "two S1 merge into |nu1| + |nu2|"),
        ProbeCase("L3.6", ("S1",), True, "slope", "S1 reflected by the wedge surface"),
        ProbeCase("L3.7.1", ("S1", "S2"), True, "ratio_max", "S1 and S2 at the surface, (|beta'| - |beta|) / |nu|"),
        ProbeCase("L3.7.2", ("R1", "S2"), True, "damping_min", "R1 and S2 at the surface, (|beta| - |beta'|) / |o|"),
        ProbeCase("L3.7.3", ("S1", "R2"), True, "ratio_max", "S1 and R2 at the surface, |beta'| / |nu|"),
        ProbeCase("L3.7.4", ("R1", "R2"), True, "exact", "R1 and R2 at the surface give |o| + |pi|"),
    )
}


@dataclass(frozen=True)
class ProbeSampler:
    """Distribution of incoming configurations.

    Base density is log-uniform on ``base_rho``, velocity uniform on
    ``base_v`` (``boundary_v`` when the top state must lie on the wedge
    surface, whose slope is negative) and strengths log-uniform on
    ``strength``.  Configurations whose states leave ``rho_range`` are
    rejected, which is what bounds the strengths in practice.
    """

    seed: int = 0
    base_rho: tuple[float, float] = (0.5, 2.0)
    base_v: tuple[float, float] = (-0.4, 0.4)
    boundary_v: tuple[float, float] = (-1.0, -0.1)
    strength: tuple[float, float] = (1e-3, 2.0)
    rho_range: tuple[float, float] = (0.2, 5.0)

    def draws(self, n: int, n_strengths: int) -> np.ndarray:
        """``n`` rows of uniform variates, identical for every parameter set."""
        rng = np.random.default_rng(self.seed)
        return rng.random((n, 2 + n_strengths))

    def base_state(self, u: np.ndarray, boundary: bool = False) -> FlowState:
        lo, hi = self.base_rho
        rho = math.exp(math.log(lo) + u[0] * (math.log(hi) - math.log(lo)))
        v_lo, v_hi = self.boundary_v if boundary else self.base_v
        v = v_lo + u[1] * (v_hi - v_lo)
        return FlowState(rho, v)

    def magnitude(self, u: float) -> float:
        lo, hi = self.strength
        return math.exp(math.log(lo) + u * (math.log(hi) - math.log(lo)))


@dataclass
class ProbeReport:
    """Per-sample values of a probe and their summary."""

    case: ProbeCase
    params: GasParams
    n_requested: int
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    rejected: Counter = field(default_factory=Counter)
    patterns: Counter = field(default_factory=Counter)
    samples: list[dict] = field(default_factory=list)

    @property
    def n_used(self) -> int:
        return int(self.values.size)

    @property
    def fitted(self) -> float:
        """The case's fitted constant (or worst deviation for exact cases)."""
        if self.values.size == 0:
            return float("nan")
        stat = self.case.statistic
        if stat in ("pair_max", "growth_max"):
            # sharpest two-sided constant; the sign is reported by ``one_sided``
            return float(np.abs(self.values).max())
        if stat == "ratio_max":
            return float(self.values.max())
        if stat == "damping_min":
            return float(self.values.min())
        if stat == "exact":
            return float(np.abs(self.values).max())
        return float(np.mean(self.values))

    @property
    def one_sided(self) -> float:
        """Largest signed value: ``<= 0`` means the quantity never grew."""
        return float(self.values.max()) if self.values.size else float("nan")

    @property
    def n_exact(self) -> int:
        return int(np.sum(np.abs(self.values) <= EXACT_TOL))

    def summary(self) -> dict:
        v = self.values
        return {
            "case": self.case.case_id,
            "gamma": self.params.gamma,
            "tau": self.params.tau,
            "statistic": self.case.statistic,
            "requested": self.n_requested,
            "used": self.n_used,
            "rejected": dict(self.rejected),
            "patterns": dict(self.patterns),
            "fitted": self.fitted,
            "one_sided": self.one_sided,
            "min": float(v.min()) if v.size else None,
            "max": float(v.max()) if v.size else None,
            "mean": float(v.mean()) if v.size else None,
            "n_exact": self.n_exact if self.case.statistic == "exact" else None,
        }


class _Rejected(Exception):
    def __init__(self, reason: str, pattern: str | None = None):
        super().__init__(reason)
        self.pattern = pattern


def apply_wave(state: FlowState, kind: str, magnitude: float, params: GasParams) -> FlowState:
    """State above ``state`` across an elementary wave of the given kind and ``|z|``."""
    family = _FAMILY[kind]
    z = _SIGN[kind] * magnitude
    if kind[0] == "S":
        alpha = alpha_for_strength(z, family, state, params)
        return shock_state(alpha, state, params)
    return rarefaction_state(z, family, state, params)


def _edges(kind: str, lo: FlowState, hi: FlowState, params: GasParams) -> tuple[float, float]:
    family = _FAMILY[kind]
    if kind[0] == "S":
        s = shock_speed(lo, hi, params)
        return s, s
    return family_speed(lo, family, params), family_speed(hi, family, params)


def _kind_of(z: float, family: int) -> str:
    if z == 0.0:
        return "0"
    if family == 1:
        return "S1" if z > 0.0 else "R1"
    return "S2" if z < 0.0 else "R2"


def _chain(base: FlowState, kinds, mags, params: GasParams, rho_range) -> list[FlowState]:
    states = [base]
    for kind, m in zip(kinds, mags):
        states.append(apply_wave(states[-1], kind, m, params))
    for s in states:
        if not rho_range[0] <= s.rho <= rho_range[1]:
            raise _Rejected("density range")
    # consecutive waves must approach: the lower one is faster at the contact
    for a in range(len(kinds) - 1):
        _, top_a = _edges(kinds[a], states[a], states[a + 1], params)
        bot_b, _ = _edges(kinds[a + 1], states[a + 1], states[a + 2], params)
        if not top_a > bot_b:
            raise _Rejected("not approaching")
    return states


def _on_wall(params: GasParams, top: FlowState) -> GasParams:
    """Parameters whose wedge surface passes through ``top``."""
    s = _root_s(_bernoulli_t(top.rho, top.v, params), params)
    b0 = top.v / s
    if not b0 < 0.0:
        raise _Rejected("surface slope not negative")
    return replace(params, b0=b0)


def _pair_sample(case: ProbeCase, u: np.ndarray, sampler: ProbeSampler, p: GasParams) -> tuple[float, dict]:
    """Same-strength shock curves from two states that differ in the other invariant."""
    u0 = sampler.base_state(u[:2])
    gap = sampler.magnitude(u[2])
    strength = sampler.magnitude(u[3])
    wm, wp = invariants_of(u0, p)
    if case.incoming[0] == "S1":
        u1 = state_of_invariants((wm, wp + gap), p)
        f0, f1 = phi1(strength, u0, p), phi1(strength, u1, p)
        diff = f0 - f1
    else:
        u1 = state_of_invariants((wm - gap, wp), p)
        f0, f1 = phi2(-strength, u0, p), phi2(-strength, u1, p)
        diff = f1 - f0
    for s in (u0, u1):
        if not sampler.rho_range[0] <= s.rho <= sampler.rho_range[1]:
            raise _Rejected("density range")
    scale = p.smallness_scale
    value = diff / (scale * gap * strength) if scale > 0.0 else (0.0 if diff == 0.0 else math.copysign(math.inf, diff))
    return value, {"difference": diff, "gap": gap, "strength": strength}


def _interaction_sample(case: ProbeCase, u: np.ndarray, sampler: ProbeSampler, p: GasParams) -> tuple[float, dict]:
    base = sampler.base_state(u[:2], case.boundary)
    mags = [sampler.magnitude(x) for x in u[2 : 2 + len(case.incoming)]]
    states = _chain(base, case.incoming, mags, p, sampler.rho_range)
    left, right = states[0], states[-1]
    inc = dict(zip(_labels(case), mags))
    if case.boundary:
        q = _on_wall(p, right)
        fan = solve_boundary(left, q)
        z1o, z2o = 0.0, fan.z2
        top = fan.top
        if not sampler.rho_range[0] <= top.rho <= sampler.rho_range[1]:
            raise _Rejected("density range")
        pattern = _kind_of(z2o, 2)
    else:
        q = p
        fan = solve_interior(left, right, p)
        z1o, z2o = fan.z
        if not sampler.rho_range[0] <= fan.middle.rho <= sampler.rho_range[1]:
            raise _Rejected("density range")
        pattern = f"{_kind_of(z2o, 2)}+{_kind_of(z1o, 1)}"
    try:
        value = _statistic(case, inc, z1o, z2o, p.smallness_scale)
    except _Rejected as exc:
        raise _Rejected(str(exc), pattern) from None
    return value, {"incoming": inc, "z1_out": z1o, "z2_out": z2o, "pattern": pattern, "b0": q.b0}


def _labels(case: ProbeCase) -> list[str]:
    names = []
    seen = Counter()
    sym = {"S1": "nu", "R1": "o", "S2": "beta", "R2": "pi"}
    for k in case.incoming:
        seen[k] += 1
        names.append(sym[k] if case.incoming.count(k) == 1 else f"{sym[k]}{seen[k]}")
    return names


def _statistic(case: ProbeCase, inc: dict, z1o: float, z2o: float, scale: float) -> float:
    """Per-sample value of the case's statistic.

    Growth and ratio statistics count outgoing *shock* strengths only (the
    wave functional ignores rarefactions).  Damping statistics require the
    transmitted wave to keep its type and divide by the reflected magnitude,
    whatever its type.
    """
    cid = case.case_id
    s1 = max(z1o, 0.0)
    s2 = max(-z2o, 0.0)
    per = lambda x, *f: x / (scale * math.prod(f)) if scale > 0.0 else x
    if cid == "L3.5.1":
        return per(s1 + s2 - inc["beta"] - inc["nu"], inc["beta"], inc["nu"])
    if cid == "L3.5.2":
        return s2 - inc["beta"]
    if cid == "L3.5.3":
        return s2 - inc["beta1"] - inc["beta2"]
    if cid == "L3.5.4":
        return per(s1 + s2 - inc["beta"], inc["beta"], inc["pi"])
    if cid == "L3.5.5":
        if s2 == 0.0:
            raise _Rejected("transmitted wave is a rarefaction")
        if abs(z1o) <= _REFLECTED_FLOOR:
            raise _Rejected("no reflected wave")
        return (inc["beta"] - s2 - abs(z1o)) / abs(z1o)
    if cid == "L3.5.6":
        return inc["o"] + inc["pi"] - abs(z1o) - abs(z2o)
    if cid == "L3.5.7":
        if s1 == 0.0:
            raise _Rejected("transmitted wave is a rarefaction")
        if abs(z2o) <= _REFLECTED_FLOOR:
            raise _Rejected("no reflected wave")
        return (inc["nu"] - s1 - abs(z2o)) / abs(z2o)
    if cid == "L3.5.8":
        return s1 - inc["nu1"] - inc["nu2"]
    if cid == "L3.6":
        return z2o / inc["nu"]
    if cid == "L3.7.1":
        return (s2 - inc["beta"]) / inc["nu"]
    if cid == "L3.7.2":
        if s2 == 0.0:
            raise _Rejected("transmitted wave is a rarefaction")
        return (inc["beta"] - s2) / inc["o"]
    if cid == "L3.7.3":
        return s2 / inc["nu"]
    if cid == "L3.7.4":
        return inc["o"] + inc["pi"] - max(z2o, 0.0)
    raise ConfigError(f"no statistic for {cid}")


def interaction_probe(case_id: str, sampler: ProbeSampler, params: GasParams, n_samples: int, keep_samples: bool = False) -> ProbeReport:
    """Run one probe; failures of the solvers reject (and count) the sample.

    Returns a :class:`ProbeReport` whose ``values`` hold the per-sample
    statistic of the case.
    """
    if case_id not in CASES:
        raise ConfigError(f"unknown probe case {case_id!r}; expected one of {sorted(CASES)}")
    case = CASES[case_id]
    if case.tau0_only and params.tau != 0.0:
        raise UnsupportedTau(f"{case_id} compares shock curves at tau = 0 only")
    report = ProbeReport(case, params, n_samples)
    if n_samples <= 0:
        return report
    sample: Callable = _pair_sample if case.statistic == "pair_max" else _interaction_sample
    width = 2 if case.statistic == "pair_max" else len(case.incoming)
    values = []
    for u in sampler.draws(n_samples, width):
        try:
            value, info = sample(case, u, sampler, params)
        except _Rejected as exc:
            report.rejected[str(exc)] += 1
            if exc.pattern:
                report.patterns[exc.pattern] += 1
            continue
        except (GlimmWedgeError, ValueError) as exc:
            report.rejected[type(exc).__name__] += 1
            continue
        values.append(value)
        if "pattern" in info:
            report.patterns[info["pattern"]] += 1
        if keep_samples:
            report.samples.append(info)
    report.values = np.array(values, dtype=float)
    return report


def reflection_slope(params: GasParams, left: FlowState, nu: float) -> float:
    """``beta' / nu`` for an S1 of strength ``nu`` from ``left`` reflected at the surface."""
    top = apply_wave(left, "S1", nu, params)
    q = _on_wall(params, top)
    return solve_boundary(left, q).z2 / nu


def reflection_scaling(left: FlowState, nu: float, scale: float, path: str = "gamma", base: GasParams | None = None) -> float:
    """Ratio ``(K(s) + 1) / (K(s/2) + 1)`` of the reflection slope deviation.

    ``path`` selects whether the scale ``s = gamma - 1 + tau^2`` is carried by
    ``gamma`` (with ``tau = 0``) or by ``tau`` (with ``gamma = 1``).
    """
    base = base or GasParams(gamma=1.0, a_inf=1.0, tau=0.0, b0=-0.5)

    def at(s: float) -> GasParams:
        if path == "gamma":
            return replace(base, gamma=1.0 + s, tau=0.0)
        if path == "tau":
            return replace(base, gamma=1.0, tau=math.sqrt(s))
        raise ConfigError(f"unknown scaling path {path!r}")

    k_full = reflection_slope(at(scale), left, nu)
    k_half = reflection_slope(at(0.5 * scale), left, nu)
    return (k_full + 1.0) / (k_half + 1.0)


def stability_table(case_ids, sampler: ProbeSampler, gammas, taus, n_samples: int, a_inf: float = 1.0, b0: float = -0.5) -> dict[str, dict[tuple[float, float], float]]:
    """Fitted constants of each case over a ``gamma x tau`` grid."""
    table: dict[str, dict[tuple[float, float], float]] = {}
    for cid in case_ids:
        row = {}
        for g in gammas:
            for t in taus:
                if CASES[cid].tau0_only and t != 0.0:
                    continue
                p = GasParams(gamma=g, a_inf=a_inf, tau=t, b0=b0)
                row[(g, t)] = interaction_probe(cid, sampler, p, n_samples).fitted
        table[cid] = row
    return table


def spread(values) -> float:
    """``max / min`` of positive fitted constants (inf if any is nonpositive)."""
    v = np.asarray(list(values), dtype=float)
    if v.size == 0 or np.any(~np.isfinite(v)) or np.any(v <= 0.0):
        return math.inf
    return float(v.max() / v.min())
