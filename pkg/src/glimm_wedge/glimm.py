"""The random-choice (Glimm) scheme below a straight wedge surface.

Geometry
--------
The flow region is ``y < b0 x``.  All bookkeeping uses the distance below the
wall, ``eta = y - b0 x <= 0``.  Column ``k`` covers ``x_k <= x < x_{k+1}`` with
``x_k = k dx``; its cells are

    cell i:  -2 (i + 1) dy < eta < -2 i dy,     i = 0 .. N-1,

so cell ``i`` carries the exported index ``n = -1 - i``.  Interfaces sit at
``eta = -2 j dy``: ``j = 0`` is the wall, where a boundary Riemann problem is
solved with the state of cell 0, and ``j >= 1`` separates cell ``j - 1``
(above) from cell ``j`` (below).  Below the last cell the data are extended
constantly, so nothing enters through the truncation.

At ``x_{k+1}`` the new cell value is the old solution sampled at

    eta = (-2 i - 1 + theta_{k+1}) dy,

the random point of the cell.  The confinement condition
``|speed - b0| dx <= dy`` keeps each fan within half a cell of its interface,
so each sample lies in at most one fan.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CFLViolation, ConfigError, GlimmWedgeError, OutOfDomain
from .params import GasParams
from .riemann import BoundaryFan, RiemannFan, sample_fan, solve_boundary, solve_interior
from .state import FlowState, eigenvalues_array, speed_bound
from .waves import Wave

log = logging.getLogger(__name__)

Fan = RiemannFan | BoundaryFan


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantProfile:
    """Uniform incoming flow."""

    state: FlowState

    def __call__(self, y: float) -> FlowState:
        return self.state

    @property
    def support_depth(self) -> float:
        return 0.0

    def states(self) -> list[FlowState]:
        return [self.state]


@dataclass(frozen=True)
class StepProfile:
    """``above`` for ``y >= y_jump`` and ``below`` otherwise (``y_jump < 0``)."""

    y_jump: float
    above: FlowState
    below: FlowState

    def __call__(self, y: float) -> FlowState:
        return self.above if y >= self.y_jump else self.below

    @property
    def support_depth(self) -> float:
        return abs(self.y_jump)

    def states(self) -> list[FlowState]:
        return [self.above, self.below]


@dataclass(frozen=True)
class BumpProfile:
    """A smooth compactly supported perturbation of a base state.

    ``rho = base.rho (1 + amp_rho g)``, ``v = base.v + amp_v g`` with
    ``g(y) = cos^2(pi (y - center) / width)`` on ``|y - center| < width / 2``.
    """

    base: FlowState
    center: float
    width: float
    amp_rho: float = 0.0
    amp_v: float = 0.0

    def _g(self, y: float) -> float:
        s = (y - self.center) / self.width
        if abs(s) >= 0.5:
            return 0.0
        return math.cos(math.pi * s) ** 2

    def __call__(self, y: float) -> FlowState:
        g = self._g(y)
        if g == 0.0:
            return self.base
        return FlowState(self.base.rho * (1.0 + self.amp_rho * g), self.base.v + self.amp_v * g)

    @property
    def support_depth(self) -> float:
        return abs(self.center) + 0.5 * self.width

    def states(self) -> list[FlowState]:
        return [self.base, self(self.center)]


def profile_from_dict(data: dict) -> ConstantProfile | StepProfile | BumpProfile:
    """Build an incoming-flow profile from a JSON-style mapping."""
    kind = data.get("kind", "constant")
    try:
        if kind == "constant":
            return ConstantProfile(FlowState(*data["state"]))
        if kind == "step":
            return StepProfile(float(data["y_jump"]), FlowState(*data["above"]), FlowState(*data["below"]))
        if kind == "bump":
            return BumpProfile(
                FlowState(*data["base"]),
                float(data["center"]),
                float(data["width"]),
                float(data.get("amp_rho", 0.0)),
                float(data.get("amp_v", 0.0)),
            )
    except KeyError as exc:
        raise ConfigError(f"missing config key: profile.{exc.args[0]}") from exc
    raise ConfigError(f"unknown profile kind {kind!r}")


def profile_to_dict(profile) -> dict:
    if isinstance(profile, ConstantProfile):
        return {"kind": "constant", "state": list(profile.state)}
    if isinstance(profile, StepProfile):
        return {"kind": "step", "y_jump": profile.y_jump, "above": list(profile.above), "below": list(profile.below)}
    if isinstance(profile, BumpProfile):
        return {
            "kind": "bump",
            "base": list(profile.base),
            "center": profile.center,
            "width": profile.width,
            "amp_rho": profile.amp_rho,
            "amp_v": profile.amp_v,
        }
    return {"kind": "callable", "repr": repr(profile)}


# ---------------------------------------------------------------------------
# mesh and sampling sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mesh:
    """Uniform mesh attached to the wedge surface.

    Parameters
    ----------
    dx : float
        Column width.
    dy : float
        Half cell height; cells are ``2 dy`` tall.
    b0 : float
        Wall slope.
    k_max : int
        Number of marching steps; sampled columns are ``0 .. k_max``.
    y_depth : int
        Number of cells per column.
    """

    dx: float
    dy: float
    b0: float
    k_max: int
    y_depth: int

    def __post_init__(self) -> None:
        if not (self.dx > 0.0 and self.dy > 0.0):
            raise ConfigError("mesh steps must be positive")
        if self.k_max < 0 or self.y_depth < 1:
            raise ConfigError("k_max must be >= 0 and y_depth >= 1")

    @property
    def x_max(self) -> float:
        return self.k_max * self.dx

    @property
    def ratio(self) -> float:
        """``dy / dx``, the largest admissible ``|speed - b0|``."""
        return self.dy / self.dx

    @property
    def depth(self) -> float:
        """Distance below the wall covered by the cells."""
        return 2.0 * self.dy * self.y_depth

    def wall(self, k: int) -> float:
        return self.b0 * k * self.dx

    def sample_eta(self, theta: float) -> np.ndarray:
        """Sample offsets below the wall for all cells of a column."""
        i = np.arange(self.y_depth)
        return (-2.0 * i - 1.0 + theta) * self.dy

    def refined(self, factor: int = 2) -> "Mesh":
        return Mesh(self.dx / factor, self.dy / factor, self.b0, self.k_max * factor, self.y_depth * factor)

    def to_dict(self) -> dict:
        return {"dx": self.dx, "dy": self.dy, "b0": self.b0, "k_max": self.k_max, "y_depth": self.y_depth}

    @classmethod
    def build(
        cls,
        params: GasParams,
        x_max: float,
        k_max: int,
        profile,
        cfl_safety: float = 1.2,
        margin_cells: int = 8,
        extra_states: Iterable[FlowState] = (),
    ) -> "Mesh":
        """Mesh whose ``dy`` satisfies the CFL bound for the states the data can produce.

        The speed bound is taken over the profile's states, the boundary
        states they generate and ``extra_states``; ``cfl_safety`` leaves room
        for interaction states.  The depth covers the data support plus the
        distance a wave can travel away from the wall by ``x_max``.
        """
        if cfl_safety < 1.0:
            raise ConfigError("cfl_safety must be at least 1")
        if k_max < 1:
            raise ConfigError("Mesh.build needs k_max >= 1")
        states = list(profile.states()) + list(extra_states)
        states += [solve_boundary(s, params).top for s in list(states)]
        lam = speed_bound(states, params)
        dx = x_max / k_max
        rel = lam + abs(params.b0)
        dy = cfl_safety * dx * rel
        data_cells = math.ceil(profile.support_depth / (2.0 * dy))
        travel_cells = math.ceil(1.1 * rel * x_max / (2.0 * dy))
        return cls(dx, dy, params.b0, k_max, data_cells + travel_cells + margin_cells)


@dataclass(frozen=True)
class ThetaSequence:
    """Sampling offsets ``theta_k`` in ``(-1, 1)``, one per column."""

    values: np.ndarray
    generator: str
    seed: int

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or np.any(np.abs(v) >= 1.0):
            raise ConfigError("theta values must lie in (-1, 1)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> float:
        return float(self.values[k])

    @classmethod
    def van_der_corput(cls, n: int, seed: int = 0) -> "ThetaSequence":
        """Base-2 radical inverse of ``seed + 1, seed + 2, ...`` mapped to ``(-1, 1)``."""
        vals = np.empty(n)
        for k in range(n):
            idx = seed + k + 1
            u, denom = 0.0, 1.0
            while idx:
                idx, bit = divmod(idx, 2)
                denom *= 2.0
                u += bit / denom
            vals[k] = 2.0 * u - 1.0
        return cls(vals, "van_der_corput", seed)

    @classmethod
    def uniform(cls, n: int, seed: int = 0) -> "ThetaSequence":
        rng = np.random.default_rng(seed)
        vals = rng.uniform(-1.0, 1.0, size=n)
        while np.any(vals <= -1.0):
            bad = vals <= -1.0
            vals[bad] = rng.uniform(-1.0, 1.0, size=int(bad.sum()))
        return cls(vals, "uniform", seed)

    @classmethod
    def make(cls, generator: str, n: int, seed: int = 0) -> "ThetaSequence":
        if generator == "van_der_corput":
            return cls.van_der_corput(n, seed)
        if generator == "uniform":
            return cls.uniform(n, seed)
        raise ConfigError(f"unknown theta generator {generator!r}")


# ---------------------------------------------------------------------------
# solution container
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiamondRecord:
    """Waves entering and leaving one Riemann problem of column ``k``.

    ``n = 0`` is the boundary problem; ``n = -j`` the interior problem at
    interface ``j``.
    """

    k: int
    n: int
    incoming: tuple[Wave, ...]
    outgoing: tuple[Wave, ...]
    is_boundary: bool


@dataclass
class ApproxSolution:
    """Sampled cell states, Riemann fans and wave log of a Glimm run.

    ``rho[k, i]`` and ``v[k, i]`` hold the sampled constant of cell ``i`` in
    column ``k``; ``fans[k]`` maps interface ``j`` to its nontrivial fan.
    """

    params: GasParams
    mesh: Mesh
    theta: ThetaSequence
    rho: np.ndarray
    v: np.ndarray
    fans: list[dict[int, Fan]] = field(default_factory=list)
    diamonds: list[DiamondRecord] = field(default_factory=list)
    speed_sup: list[float] = field(default_factory=list)
    lost_waves: int = 0
    bottom_clean: bool = True
    profile: object = None

    @property
    def columns(self) -> int:
        """Number of sampled columns present."""
        return len(self.fans) + (1 if len(self.fans) < self.rho.shape[0] else 0)

    def state(self, k: int, i: int) -> FlowState:
        return FlowState(float(self.rho[k, i]), float(self.v[k, i]))

    def column_states(self, k: int) -> list[FlowState]:
        return [FlowState(float(r), float(v)) for r, v in zip(self.rho[k], self.v[k])]

    def waves(self, k: int) -> list[tuple[int, Wave]]:
        """Nontrivial outgoing waves of column ``k`` as ``(interface, wave)``, top to bottom."""
        out = []
        for j in sorted(self.fans[k]):
            fan = self.fans[k][j]
            # within a fan the family-1 wave lies above the family-2 wave
            for w in reversed(fan.waves):
                out.append((j, w))
        return out

    def wave_position(self, j: int, wave: Wave, s: float) -> float:
        """``eta`` of ``wave`` (middle of a rarefaction) a distance ``s`` past its column start."""
        return -2.0 * j * self.mesh.dy + (0.5 * (wave.speed_lo + wave.speed_hi) - self.mesh.b0) * s


# ---------------------------------------------------------------------------
# scheme
# ---------------------------------------------------------------------------


class _FanCache:
    """Memo of Riemann solutions keyed by the exact data (solvers are pure)."""

    def __init__(self, params: GasParams, limit: int = 200_000):
        self.p = params
        self.limit = limit
        self.interior: dict[tuple[float, float, float, float], RiemannFan] = {}
        self.boundary: dict[tuple[float, float], BoundaryFan] = {}

    def solve_interior(self, below: FlowState, above: FlowState) -> RiemannFan:
        key = (below.rho, below.v, above.rho, above.v)
        fan = self.interior.get(key)
        if fan is None:
            fan = solve_interior(below, above, self.p)
            if len(self.interior) < self.limit:
                self.interior[key] = fan
        return fan

    def solve_boundary(self, left: FlowState) -> BoundaryFan:
        key = (left.rho, left.v)
        fan = self.boundary.get(key)
        if fan is None:
            fan = solve_boundary(left, self.p)
            if len(self.boundary) < self.limit:
                self.boundary[key] = fan
        return fan


def _located(exc: GlimmWedgeError, k: int, n: int) -> GlimmWedgeError:
    new = type(exc)(f"column {k}, cell {n}: {exc}")
    new.__cause__ = exc
    return new


def init_column(profile: Callable[[float], FlowState], mesh: Mesh, theta: ThetaSequence) -> list[FlowState]:
    """Cell constants of column 0: the profile at the sample points ``y_{0,n}``."""
    etas = mesh.sample_eta(theta[0])
    return [profile(float(e)) for e in etas]


def _check_fan_cfl(fan: Fan, mesh: Mesh, k: int, n: int) -> None:
    lo, hi = fan.speed_range
    limit = mesh.ratio
    worst = max(abs(lo - mesh.b0), abs(hi - mesh.b0))
    if worst > limit:
        raise CFLViolation(
            f"column {k}, cell {n}: wave speed offset {worst:.6g} exceeds dy/dx = {limit:.6g}"
        )
    if isinstance(fan, BoundaryFan) and hi > mesh.b0:
        raise CFLViolation(f"column {k}: boundary wave leaves the flow region (speed {hi:.6g} > b0)")


def _solve_column(sol: ApproxSolution, k: int, cache: _FanCache) -> dict[int, Fan]:
    """Riemann fans at ``x_k`` for the sampled states of column ``k``."""
    mesh = sol.mesh
    rho, v = sol.rho[k], sol.v[k]
    fans: dict[int, Fan] = {}
    top = sol.state(k, 0)
    try:
        bfan = cache.solve_boundary(top)
    except GlimmWedgeError as exc:
        raise _located(exc, k, 0) from exc
    if not bfan.is_trivial:
        _check_fan_cfl(bfan, mesh, k, 0)
        fans[0] = bfan
    jumps = np.nonzero((rho[1:] != rho[:-1]) | (v[1:] != v[:-1]))[0] + 1
    for j in jumps:
        j = int(j)
        try:
            fan = cache.solve_interior(sol.state(k, j), sol.state(k, j - 1))
        except GlimmWedgeError as exc:
            raise _located(exc, k, -j) from exc
        if fan.is_trivial:
            continue
        _check_fan_cfl(fan, mesh, k, -j)
        fans[j] = fan
    return fans


def _sample_next(sol: ApproxSolution, k: int, fans: dict[int, Fan]) -> tuple[np.ndarray, np.ndarray]:
    """Cell constants of column ``k + 1`` sampled from the fans of column ``k``."""
    mesh = sol.mesh
    th = sol.theta[k + 1]
    rho = sol.rho[k].copy()
    v = sol.v[k].copy()
    n_cells = mesh.y_depth
    # theta >= 0 samples the upper half of cell i (nearest interface j = i),
    # otherwise the lower half (nearest interface j = i + 1).
    shift = 0 if th >= 0.0 else 1
    d_eta = (-1.0 + th) * mesh.dy if shift == 0 else (1.0 + th) * mesh.dy
    xi = mesh.b0 + d_eta / mesh.dx
    for j, fan in fans.items():
        i = j - shift
        if 0 <= i < n_cells:
            s = sample_fan(fan, xi, sol.params)
            rho[i], v[i] = s.rho, s.v
    return rho, v


def _incoming_records(sol: ApproxSolution, k: int, fans_prev: dict[int, Fan]) -> dict[int, list[Wave]]:
    """Attribute the waves of column ``k - 1`` to the diamonds of column ``k``."""
    mesh = sol.mesh
    th = sol.theta[k]
    out: dict[int, list[Wave]] = {}
    for j0 in sorted(fans_prev):
        for w in fans_prev[j0].waves:
            pos = sol.wave_position(j0, w, mesh.dx)
            q = pos / mesh.dy - th
            j = max(0, math.floor((1.0 - q) / 2.0))
            if j >= mesh.y_depth:
                sol.lost_waves += 1
                continue
            out.setdefault(j, []).append(w)
    return out


def advance_column(sol: ApproxSolution, k: int, cache: _FanCache | None = None, record: bool = True) -> ApproxSolution:
    """Solve the Riemann problems of column ``k`` and sample column ``k + 1``.

    Column ``k``'s cell states must be present.  Sampling is skipped for the
    last column (``k == k_max``) whose fans are never used.
    """
    cache = cache or _FanCache(sol.params)
    mesh = sol.mesh
    if len(sol.fans) != k:
        raise ValueError(f"columns before {k} must be complete")
    fans = _solve_column(sol, k, cache)
    sol.fans.append(fans)
    lam_m, lam_p = eigenvalues_array(sol.rho[k], sol.v[k], sol.params)
    sol.speed_sup.append(float(max(np.max(np.abs(lam_m)), np.max(np.abs(lam_p)))))
    if mesh.y_depth - 1 in fans:
        sol.bottom_clean = False
    if record:
        incoming = _incoming_records(sol, k, sol.fans[k - 1]) if k > 0 else {}
        for j in sorted(set(fans) | set(incoming)):
            out = tuple(fans[j].waves) if j in fans else ()
            inc = tuple(incoming.get(j, ()))
            sol.diamonds.append(DiamondRecord(k, -j, inc, out, j == 0))
    if k < mesh.k_max:
        rho, v = _sample_next(sol, k, fans)
        sol.rho[k + 1] = rho
        sol.v[k + 1] = v
    return sol


def run(
    params: GasParams,
    mesh: Mesh,
    theta: ThetaSequence,
    profile: Callable[[float], FlowState],
    record_diamonds: bool = True,
    progress: Callable[[int], None] | None = None,
) -> ApproxSolution:
    """March the scheme over all ``k_max`` columns.

    With ``k_max = 0`` only the initial column is sampled (no fans).
    """
    if mesh.b0 != params.b0:
        raise ConfigError(f"mesh slope {mesh.b0} differs from params.b0 {params.b0}")
    if len(theta) < mesh.k_max + 1:
        raise ConfigError(f"need {mesh.k_max + 1} theta values, got {len(theta)}")
    shape = (mesh.k_max + 1, mesh.y_depth)
    sol = ApproxSolution(params, mesh, theta, np.empty(shape), np.empty(shape), profile=profile)
    col0 = init_column(profile, mesh, theta)
    sol.rho[0] = [s.rho for s in col0]
    sol.v[0] = [s.v for s in col0]
    lam = speed_bound(set(col0), params)
    if lam + abs(mesh.b0) > mesh.ratio:
        raise CFLViolation(
            f"dy/dx = {mesh.ratio:.6g} is below max|lambda| + |b0| = {lam + abs(mesh.b0):.6g} for the initial data"
        )
    if mesh.k_max == 0:
        return sol
    cache = _FanCache(params)
    for k in range(mesh.k_max):
        advance_column(sol, k, cache, record=record_diamonds)
        if progress is not None:
            progress(k)
    if not sol.bottom_clean or sol.lost_waves:
        log.warning("waves reached the truncated bottom of the domain; increase y_depth")
    return sol


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _column_of(sol: ApproxSolution, x: float) -> tuple[int, float]:
    mesh = sol.mesh
    if x < 0.0 or x > mesh.x_max * (1.0 + 1e-14) + 1e-300:
        raise OutOfDomain(f"x = {x} outside [0, {mesh.x_max}]")
    k = min(int(math.floor(x / mesh.dx)), mesh.k_max)
    s = x - k * mesh.dx
    if k == mesh.k_max:
        s = 0.0
    return k, s


def evaluate(sol: ApproxSolution, x: float, y: float) -> FlowState:
    """The approximate solution at a point of the flow region (right limit at ``x_k``)."""
    mesh = sol.mesh
    k, s = _column_of(sol, x)
    eta = y - mesh.b0 * x
    if eta > 1e-12 * max(1.0, abs(y)) or eta < -mesh.depth:
        raise OutOfDomain(f"point ({x}, {y}) outside the computed region")
    eta = min(eta, 0.0)
    if s == 0.0 or k >= len(sol.fans):
        i = min(int(-eta // (2.0 * mesh.dy)), mesh.y_depth - 1)
        return sol.state(k, i)
    j = int(round(-eta / (2.0 * mesh.dy)))
    fan = sol.fans[k].get(j)
    if fan is None:
        i = min(int(-eta // (2.0 * mesh.dy)), mesh.y_depth - 1)
        return sol.state(k, i)
    d_eta = eta + 2.0 * j * mesh.dy
    return sample_fan(fan, mesh.b0 + d_eta / s, sol.params)


def column_profile(sol: ApproxSolution, x: float, eta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised evaluation along ``x = const`` at offsets ``eta <= 0`` below the wall."""
    mesh = sol.mesh
    k, s = _column_of(sol, x)
    eta = np.minimum(np.asarray(eta, dtype=float), 0.0)
    if np.any(eta < -mesh.depth):
        raise OutOfDomain("evaluation offsets below the computed region")
    i = np.minimum((-eta // (2.0 * mesh.dy)).astype(int), mesh.y_depth - 1)
    rho = sol.rho[k, i].copy()
    v = sol.v[k, i].copy()
    if s == 0.0 or k >= len(sol.fans) or not sol.fans[k]:
        return rho, v
    j_near = np.rint(-eta / (2.0 * mesh.dy)).astype(int)
    for j, fan in sol.fans[k].items():
        idx = np.nonzero(j_near == j)[0]
        if idx.size == 0:
            continue
        lo, hi = fan.speed_range
        d_eta = eta[idx] + 2.0 * j * mesh.dy
        xi = mesh.b0 + d_eta / s
        for m, xv in zip(idx, xi):
            if xv < lo:
                st = fan.left
            elif xv > hi:
                st = fan.right
            else:
                st = sample_fan(fan, float(xv), sol.params)
            rho[m], v[m] = st.rho, st.v
    return rho, v


def wave_log(sol: ApproxSolution) -> list[tuple[int, int, str, float, float]]:
    """Rows ``(k, n, kind, strength, speed)`` for every nontrivial outgoing wave."""
    rows = []
    for k in range(len(sol.fans)):
        for j, w in sol.waves(k):
            rows.append((k, -j, w.kind.value, w.strength, w.speed))
    return rows


def shock_front(sol: ApproxSolution, family: int = 2) -> list[tuple[int, float]]:
    """Lowest shock of ``family`` per column as ``(k, y)`` at ``x_k``."""
    out = []
    for k in range(len(sol.fans)):
        best = None
        for j, w in sol.waves(k):
            if w.is_shock and w.family == family:
                best = j if best is None else max(best, j)
        if best is not None:
            out.append((k, sol.mesh.wall(k) - 2.0 * best * sol.mesh.dy))
    return out
