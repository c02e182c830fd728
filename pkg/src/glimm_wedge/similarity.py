"""Slenderness family studies: run the scheme along ``tau -> 0`` at fixed
``(gamma, a_inf, b0)`` and measure convergence to the ``tau = 0`` solution.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .diagnostics import sup_norm, total_variation
from .errors import ConfigError, DomainMismatch, SonicDefectExceeded, UnsortedFamily
from .glimm import ApproxSolution, Mesh, ThetaSequence, column_profile, profile_from_dict, profile_to_dict, run, shock_front
from .params import GasParams, PhysicalSetup, scaled_from_physical
from .riemann import boundary_velocity, solve_boundary
from .state import FlowState, _bernoulli_t, u_from_t

log = logging.getLogger(__name__)


def reconstruct_u(sol: ApproxSolution) -> np.ndarray:
    """Per-cell ``u`` from the Bernoulli relation, same shape as ``sol.rho``."""
    p = sol.params
    out = np.empty_like(sol.rho)
    for k in range(sol.rho.shape[0]):
        for i in range(sol.rho.shape[1]):
            try:
                out[k, i] = u_from_t(_bernoulli_t(sol.rho[k, i], sol.v[k, i], p), p)
            except SonicDefectExceeded as exc:
                raise SonicDefectExceeded(f"{exc} at column {k}, cell {i}") from exc
    return out


def _require_compatible(sol_a: ApproxSolution, sol_b: ApproxSolution, radius: float) -> None:
    pa, pb = sol_a.params, sol_b.params
    for name in ("gamma", "a_inf", "b0"):
        if getattr(pa, name) != getattr(pb, name):
            raise DomainMismatch(f"solutions differ in {name}: {getattr(pa, name)} vs {getattr(pb, name)}")
    for sol in (sol_a, sol_b):
        covered_x = len(sol.fans) * sol.mesh.dx
        if covered_x < radius:
            raise DomainMismatch(f"solution reaches x = {covered_x:.6g} only, ball radius is {radius:.6g}")
        if sol.mesh.depth < radius:
            raise DomainMismatch(f"solution depth {sol.mesh.depth:.6g} does not cover the ball radius {radius:.6g}")


def l1_distance(sol_a: ApproxSolution, sol_b: ApproxSolution, radius: float, per_dy: int = 4) -> float:
    """``int |rho_a - rho_b| + |v_a - v_b|`` over the flow region inside the ball of ``radius``.

    Midpoint rule on a square lattice of spacing ``min(dy) / per_dy``.
    """
    _require_compatible(sol_a, sol_b, radius)
    b0 = sol_a.params.b0
    h = min(sol_a.mesh.dy, sol_b.mesh.dy) / per_dy
    nx = int(math.ceil(radius / h))
    total = 0.0
    for ix in range(nx):
        x = (ix + 0.5) * h
        if x >= radius:
            break
        y_top = b0 * x
        y_bot = -math.sqrt(radius * radius - x * x)
        if y_bot >= y_top:
            continue
        # lattice rows aligned with y = 0, clipped to the region
        j0 = math.floor(-y_top / h)
        j1 = math.ceil(-y_bot / h)
        ys = -(np.arange(j0, j1) + 0.5) * h
        ys = ys[(ys < y_top) & (ys > y_bot)]
        if ys.size == 0:
            continue
        eta = ys - b0 * x
        ra, va = column_profile(sol_a, x, eta)
        rb, vb = column_profile(sol_b, x, eta)
        total += float(np.sum(np.abs(ra - rb) + np.abs(va - vb)))
    return total * h * h


def quantization_error(sol: ApproxSolution, radius: float, per_dy: int = 4) -> float:
    """L1 change caused by moving every jump by one lattice step inside the ball."""
    h = sol.mesh.dy / per_dy
    tv = max(total_variation(sol, k) for k in range(len(sol.fans))) if sol.fans else 0.0
    return h * radius * tv


def shared_mesh(params_list: Sequence[GasParams], x_max: float, k_max: int, profile, cfl_safety: float = 1.2) -> Mesh:
    """One mesh satisfying the CFL bound and depth requirement of every member."""
    meshes = [Mesh.build(p, x_max, k_max, profile, cfl_safety=cfl_safety) for p in params_list]
    dy = max(m.dy for m in meshes)
    depth = max(m.depth for m in meshes)
    b0s = {m.b0 for m in meshes}
    if len(b0s) != 1:
        raise DomainMismatch(f"family members disagree on b0: {sorted(b0s)}")
    return Mesh(meshes[0].dx, dy, meshes[0].b0, k_max, int(math.ceil(depth / (2.0 * dy))))


def explicit_mesh(config: "StudyConfig") -> Mesh:
    """The single mesh named by ``config.meshes`` (one entry per tau, all equal)."""
    if len(config.meshes) != len(config.taus):
        raise DomainMismatch(f"{len(config.meshes)} meshes given for {len(config.taus)} taus")
    first = dict(config.meshes[0])
    for tau, m in zip(config.taus, config.meshes):
        if dict(m) != first:
            raise DomainMismatch(f"mesh for tau = {tau} differs from the first member: {dict(m)} vs {first}")
    try:
        mesh = Mesh(float(first["dx"]), float(first["dy"]), config.b0, int(first["k_max"]), int(first["y_depth"]))
    except KeyError as exc:
        raise ConfigError(f"missing config key: meshes.{exc.args[0]}") from exc
    return mesh


@dataclass(frozen=True)
class StudyConfig:
    """Inputs of a slenderness study; ``taus`` must decrease (``0`` is allowed last)."""

    gamma: float = 1.05
    a_inf: float = 1.0
    b0: float = -0.5
    taus: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025, 0.0)
    x_max: float = 1.0
    k_max: int = 400
    seed: int = 0
    generator: str = "van_der_corput"
    radius_fraction: float = 0.8
    per_dy: int = 4
    profile: dict = field(default_factory=lambda: {"kind": "constant", "state": [1.0, 0.0]})
    demo_machs: tuple[float, ...] = (10.0, 20.0)
    meshes: tuple[dict, ...] = ()

    def __post_init__(self) -> None:
        taus = tuple(float(t) for t in self.taus)
        object.__setattr__(self, "taus", taus)
        if not taus:
            raise ConfigError("a study needs at least one tau")
        if any(b >= a for a, b in zip(taus, taus[1:])):
            raise UnsortedFamily(f"taus must be strictly decreasing, got {list(taus)}")
        if not 0.0 < self.radius_fraction <= 1.0:
            raise ConfigError("radius_fraction must lie in (0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> "StudyConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown study keys: {sorted(unknown)}")
        kw = dict(data)
        for key in ("taus", "demo_machs", "meshes"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "a_inf": self.a_inf,
            "b0": self.b0,
            "taus": list(self.taus),
            "x_max": self.x_max,
            "k_max": self.k_max,
            "seed": self.seed,
            "generator": self.generator,
            "radius_fraction": self.radius_fraction,
            "per_dy": self.per_dy,
            "profile": dict(self.profile),
            "demo_machs": list(self.demo_machs),
            "meshes": [dict(m) for m in self.meshes],
        }

    def family(self) -> list[GasParams]:
        return [GasParams(gamma=self.gamma, a_inf=self.a_inf, tau=t, b0=self.b0) for t in self.taus]


@dataclass
class StudyReport:
    config: StudyConfig
    mesh: Mesh
    radius: float
    distances: list[dict]
    uniformity: list[dict]
    monotone: bool
    reversals: list[tuple[float, float, float]]
    boundary_residual: float | None
    demo: list[dict]
    solutions: dict[float, ApproxSolution] = field(default_factory=dict, repr=False)

    @property
    def final_ratio(self) -> float:
        """Last distance over first distance (nan with fewer than two)."""
        if len(self.distances) < 2 or self.distances[0]["distance"] == 0.0:
            return float("nan")
        return self.distances[-1]["distance"] / self.distances[0]["distance"]

    def spread(self, key: str) -> float:
        """Relative variation ``(max - min) / max`` of a uniformity column."""
        vals = [row[key] for row in self.uniformity]
        return (max(vals) - min(vals)) / max(vals) if vals and max(vals) > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "mesh": self.mesh.to_dict(),
            "radius": self.radius,
            "distances": self.distances,
            "uniformity": self.uniformity,
            "monotone": self.monotone,
            "reversals": [list(r) for r in self.reversals],
            "boundary_residual": self.boundary_residual,
            "final_ratio": self.final_ratio,
            "demo": self.demo,
        }


def _run_member(args) -> ApproxSolution:
    params, mesh, seed, generator, profile_dict = args
    profile = profile_from_dict(profile_dict)
    theta = ThetaSequence.make(generator, mesh.k_max + 1, seed)
    return run(params, mesh, theta, profile, record_diamonds=False)


def _boundary_residual(sol: ApproxSolution) -> float:
    """Largest violation of the slip condition over all boundary fans."""
    worst = 0.0
    for k, fans in enumerate(sol.fans):
        top = fans[0].top if 0 in fans else sol.state(k, 0)
        worst = max(worst, abs(top.v - boundary_velocity(top, sol.params)))
    return worst


def _front_slope(sol: ApproxSolution) -> float:
    """Least-squares slope of the family-2 shock front through the origin."""
    pts = shock_front(sol)
    if not pts:
        return float("nan")
    xs = np.array([k * sol.mesh.dx for k, _ in pts])
    ys = np.array([y for _, y in pts])
    return float(np.dot(xs, ys) / np.dot(xs, xs)) if np.any(xs) else float("nan")


def two_mach_demo(config: StudyConfig, solutions: dict[float, ApproxSolution]) -> list[dict]:
    """Physical shock angles of two free streams sharing the similarity parameter.

    Each Mach number fixes ``tau = a_inf / M_inf`` and the wedge angle
    ``theta = tau |b0|``, so both setups have ``K = M_inf theta = a_inf |b0|``.
    """
    rows = []
    upstream = FlowState(1.0, 0.0)  # the free stream in scaled variables
    for mach in config.demo_machs:
        tau = config.a_inf / mach
        theta = tau * abs(config.b0)
        setup = PhysicalSetup(mach_inf=mach, theta_wedge=theta)
        p = scaled_from_physical(setup, tau, gamma=config.gamma)
        sigma = solve_boundary(upstream, p).wave2.speed
        row = {
            "mach_inf": mach,
            "theta_wedge": theta,
            "K": setup.K,
            "tau": tau,
            "sigma_exact": sigma,
            "shock_angle": math.atan(tau * abs(sigma)),
            "angle_over_theta": math.atan(tau * abs(sigma)) / theta,
        }
        sol = solutions.get(tau)
        if sol is not None:
            slope = _front_slope(sol)
            row["sigma_scheme"] = slope
            row["shock_angle_scheme"] = math.atan(tau * abs(slope))
        rows.append(row)
    return rows


def similarity_study(
    config: StudyConfig,
    threads: int = 1,
    progress: Callable[[str], None] | None = None,
    keep_solutions: bool = False,
) -> StudyReport:
    """Run the family on one shared mesh and theta sequence and compare with ``tau = 0``."""
    family = config.family()
    profile = profile_from_dict(config.profile)
    mesh = explicit_mesh(config) if config.meshes else shared_mesh(family, config.x_max, config.k_max, profile)
    radius = config.radius_fraction * config.x_max
    jobs = [(p, mesh, config.seed, config.generator, profile_to_dict(profile)) for p in family]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            sols = list(pool.map(_run_member, jobs))
    else:
        sols = []
        for job in jobs:
            if progress:
                progress(f"running tau = {job[0].tau}")
            sols.append(_run_member(job))
    by_tau = {p.tau: s for p, s in zip(family, sols)}

    uniformity = []
    for p, s in zip(family, sols):
        ks = range(len(s.fans)) if s.fans else range(1)
        uniformity.append(
            {
                "tau": p.tau,
                "tv_sup": max(total_variation(s, k) for k in ks),
                "sup_norm": max(sup_norm(s, k) for k in ks),
            }
        )

    distances: list[dict] = []
    reversals: list[tuple[float, float, float]] = []
    monotone = True
    boundary_residual = None
    if 0.0 in by_tau:
        ref = by_tau[0.0]
        boundary_residual = _boundary_residual(ref)
        quant = 2.0 * quantization_error(ref, radius, config.per_dy)
        for p, s in zip(family, sols):
            if p.tau == 0.0:
                continue
            if progress:
                progress(f"distance for tau = {p.tau}")
            distances.append({"tau": p.tau, "distance": l1_distance(s, ref, radius, config.per_dy)})
        n_bad = 0
        for a, b in zip(distances, distances[1:]):
            if b["distance"] > a["distance"]:
                reversals.append((b["tau"], a["distance"], b["distance"]))
                if b["distance"] - a["distance"] > quant:
                    n_bad += 2  # a large reversal is never tolerated
                else:
                    n_bad += 1
        monotone = n_bad <= 1
    demo = two_mach_demo(config, by_tau)
    return StudyReport(
        config,
        mesh,
        radius,
        distances,
        uniformity,
        monotone,
        reversals,
        boundary_residual,
        demo,
        solutions=by_tau if keep_solutions else {},
    )
