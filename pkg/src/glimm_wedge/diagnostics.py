"""Measurements on Glimm solutions: wave functionals, BV bounds, L1 continuity
and the entropy inequality.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, UnsupportedTau
from .glimm import ApproxSolution, column_profile
from .params import GasParams
from .riemann import BoundaryFan, sample_fan
from .state import FlowState, pow_m1
from .waves import Wave, WaveKind

# ---------------------------------------------------------------------------
# Glimm functional
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionalWeights:
    """Weights of the functional ``F = k_b L1 + L2 + 4 c_star (gamma - 1 + tau^2) Q``."""

    k_b: float = 2.0
    c_star: float = 10.0

    def __post_init__(self) -> None:
        if not 1.0 < self.k_b < 4.0:
            raise ConfigError(f"k_b must lie in (1, 4), got {self.k_b}")
        if self.c_star < self.k_b:
            raise ConfigError(f"c_star must be at least k_b, got {self.c_star}")


@dataclass(frozen=True)
class FunctionalEntry:
    k: int
    L1: float
    L2: float
    L: float
    Q: float
    F: float
    tv: float
    sup: float


@dataclass
class FunctionalReport:
    weights: FunctionalWeights
    scale: float
    entries: list[FunctionalEntry] = field(default_factory=list)

    @property
    def F(self) -> np.ndarray:
        return np.array([e.F for e in self.entries])

    @property
    def tv(self) -> np.ndarray:
        return np.array([e.tv for e in self.entries])

    @property
    def smallness(self) -> float:
        """``(gamma - 1 + tau^2) F(0)``."""
        return self.scale * self.entries[0].F if self.entries else 0.0

    def rows(self) -> list[dict]:
        return [asdict(e) for e in self.entries]


def _shock_lists(sol: ApproxSolution, k: int) -> tuple[list[tuple[int, float]], list[tuple[int, float]]]:
    s1, s2 = [], []
    for j, w in sol.waves(k):
        if w.kind is WaveKind.S1:
            s1.append((j, abs(w.strength)))
        elif w.kind is WaveKind.S2:
            s2.append((j, abs(w.strength)))
    return s1, s2


def approaching_product(s1: Sequence[tuple[int, float]], s2: Sequence[tuple[int, float]]) -> float:
    """``sum |alpha| |beta|`` over S1/S2 pairs with the S1 strictly below the S2.

    Positions are interface indices (larger index = lower); two waves of the
    same fan are never approaching since the S2 lies below the S1 there.
    """
    if not s1 or not s2:
        return 0.0
    j2 = np.array([j for j, _ in s2])
    b2 = np.array([b for _, b in s2])
    order = np.argsort(j2)
    j2, b2 = j2[order], b2[order]
    cum = np.concatenate(([0.0], np.cumsum(b2)))
    total = 0.0
    for j, a in s1:
        # S2 waves strictly above the S1, i.e. at smaller interface index
        n_above = int(np.searchsorted(j2, j, side="left"))
        total += a * cum[n_above]
    return total


def total_variation(sol: ApproxSolution, k: int) -> float:
    """Total variation of ``(rho, v)`` along column ``k`` (sum of both components)."""
    if k < len(sol.fans):
        tv = 0.0
        for fan in sol.fans[k].values():
            for w in fan.waves:
                tv += abs(w.right.rho - w.left.rho) + abs(w.right.v - w.left.v)
        return tv
    rho, v = sol.rho[k], sol.v[k]
    return float(np.sum(np.abs(np.diff(rho))) + np.sum(np.abs(np.diff(v))))


def sup_norm(sol: ApproxSolution, k: int) -> float:
    """``max(|rho|, |v|)`` over column ``k``, including fan middle states."""
    best = float(max(np.max(np.abs(sol.rho[k])), np.max(np.abs(sol.v[k]))))
    if k < len(sol.fans):
        for fan in sol.fans[k].values():
            mid = getattr(fan, "middle", fan.right)
            best = max(best, abs(mid.rho), abs(mid.v))
    return best


def functional_on_column(sol: ApproxSolution, k: int, weights: FunctionalWeights | None = None) -> FunctionalEntry:
    """Wave-strength functional of the outgoing waves of column ``k``."""
    weights = weights or FunctionalWeights()
    s1, s2 = _shock_lists(sol, k)
    l1 = sum(a for _, a in s1)
    l2 = sum(b for _, b in s2)
    big_l = weights.k_b * l1 + l2
    q = approaching_product(s1, s2)
    scale = sol.params.smallness_scale
    f = big_l + 4.0 * weights.c_star * scale * q
    return FunctionalEntry(k, l1, l2, big_l, q, f, total_variation(sol, k), sup_norm(sol, k))


def functional_report(sol: ApproxSolution, weights: FunctionalWeights | None = None) -> FunctionalReport:
    weights = weights or FunctionalWeights()
    rep = FunctionalReport(weights, sol.params.smallness_scale)
    for k in range(len(sol.fans)):
        rep.entries.append(functional_on_column(sol, k, weights))
    return rep


@dataclass(frozen=True)
class MonotoneCheck:
    violations: list[tuple[int, float, float]]
    smallness: float
    hypothesis_ok: bool
    worst_increase: float


def check_f_monotone(report: FunctionalReport, tolerance: float = 1e-12, smallness_bound: float = 0.05) -> MonotoneCheck:
    """Columns where ``F`` grows by more than ``tolerance * max(F(0), F(k))``."""
    f = report.F
    violations = []
    worst = 0.0
    if f.size:
        ref = f[0]
        for k in range(f.size - 1):
            inc = f[k + 1] - f[k]
            worst = max(worst, inc)
            if inc > tolerance * max(ref, f[k]):
                violations.append((k, float(f[k]), float(f[k + 1])))
    sm = report.smallness
    return MonotoneCheck(violations, sm, sm <= smallness_bound, worst)


# ---------------------------------------------------------------------------
# L1 continuity in x
# ---------------------------------------------------------------------------


def _eta_lattice(sol: ApproxSolution, per_dy: int, depth: float | None = None) -> tuple[np.ndarray, float]:
    mesh = sol.mesh
    depth = mesh.depth if depth is None else min(depth, mesh.depth)
    n = max(1, int(math.ceil(depth / mesh.dy * per_dy)))
    h = depth / n
    return -(np.arange(n) + 0.5) * h, h


def l1_continuity(sol: ApproxSolution, x1: float, x2: float, per_dy: int = 4) -> float:
    """``int |U(x1, eta) - U(x2, eta)| d eta`` over the wall-aligned traces."""
    if x1 == x2:
        return 0.0
    eta, h = _eta_lattice(sol, per_dy)
    r1, v1 = column_profile(sol, x1, eta)
    r2, v2 = column_profile(sol, x2, eta)
    return float(np.sum(np.abs(r1 - r2) + np.abs(v1 - v2)) * h)


@dataclass(frozen=True)
class L1Fit:
    constant: float
    ratios: np.ndarray
    pairs: list[tuple[float, float]]


def fit_l1_constant(sol: ApproxSolution, gaps: Iterable[int] = (1, 2, 5, 10, 20), n_starts: int = 8, per_dy: int = 4) -> L1Fit:
    """Smallest ``C`` with ``||U(x1) - U(x2)||_1 <= C (dx + |x1 - x2|)`` over sampled pairs."""
    mesh = sol.mesh
    k_top = len(sol.fans)
    pairs, ratios = [], []
    for g in gaps:
        if g >= k_top:
            continue
        starts = np.linspace(0, k_top - 1 - g, n_starts).astype(int)
        for k1 in sorted(set(starts.tolist())):
            x1 = (k1 + 0.5) * mesh.dx
            x2 = x1 + g * mesh.dx
            d = l1_continuity(sol, x1, x2, per_dy)
            pairs.append((x1, x2))
            ratios.append(d / (mesh.dx + g * mesh.dx))
    ratios = np.array(ratios)
    return L1Fit(float(ratios.max()) if ratios.size else 0.0, ratios, pairs)


# ---------------------------------------------------------------------------
# entropy inequality at tau = 0
# ---------------------------------------------------------------------------


def entropy_pair(rho, v, params: GasParams):
    """Convex entropy pair of the ``tau = 0`` system.

    ``E = rho v^2 / 2 + (rho^gamma - rho) / (gamma (gamma - 1) a_inf^2)`` and
    ``Q = v (E + rho^gamma / (gamma a_inf^2))``.  The linear term in ``rho``
    does not change the inequality (density is conserved) and keeps the
    isothermal limit finite.
    """
    g = params.gamma
    a2 = params.a_inf**2
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    lr = np.log(rho)
    pm1 = lr if abs(g - 1.0) < 1e-10 else np.expm1((g - 1.0) * lr) / (g - 1.0)
    e = 0.5 * rho * v * v + rho * pm1 / (g * a2)
    q = v * (e + rho**g / (g * a2))
    return e, q


def shock_dissipation(left: FlowState, right: FlowState, speed: float, params: GasParams) -> float:
    """Entropy production ``sigma [E] - [Q]`` of a jump (``[.]`` = above minus below).

    Nonnegative for admissible shocks; a weak-form residual picks up this
    rate times the test function along the discontinuity.
    """
    el, ql = entropy_pair(left.rho, left.v, params)
    er, qr = entropy_pair(right.rho, right.v, params)
    return float(speed * (er - el) - (qr - ql))


def _bspline(s):
    """Cubic B-spline on ``[-2, 2]`` and its derivative."""
    s = np.asarray(s, dtype=float)
    a = np.abs(s)
    val = np.where(a < 1.0, 2.0 / 3.0 - a * a + 0.5 * a**3, np.where(a < 2.0, (2.0 - a) ** 3 / 6.0, 0.0))
    der = np.where(a < 1.0, -2.0 * a + 1.5 * a * a, np.where(a < 2.0, -0.5 * (2.0 - a) ** 2, 0.0)) * np.sign(s)
    return val, der


def _bspline_integral(s):
    """``int_{-2}^{s} B``, the antiderivative of :func:`_bspline` (0 at -2, 1 at 2)."""
    s = np.clip(np.asarray(s, dtype=float), -2.0, 2.0)
    a = np.abs(s)
    inner = 2.0 / 3.0 * a - a**3 / 3.0 + a**4 / 8.0
    outer = 0.5 - (2.0 - a) ** 4 / 24.0
    half = np.where(a < 1.0, inner, outer)
    return 0.5 + np.sign(s) * half


@dataclass(frozen=True)
class Bump:
    """Nonnegative test function ``B((x - xc) / hx) B((y - yc) / hy)``."""

    xc: float
    yc: float
    hx: float
    hy: float

    def __call__(self, x, y):
        bx, _ = _bspline((np.asarray(x) - self.xc) / self.hx)
        by, _ = _bspline((np.asarray(y) - self.yc) / self.hy)
        return bx * by

    def grad(self, x, y):
        bx, dbx = _bspline((np.asarray(x) - self.xc) / self.hx)
        by, dby = _bspline((np.asarray(y) - self.yc) / self.hy)
        return dbx * by / self.hx, bx * dby / self.hy

    def y_integral(self, x: float, y_lo, y_hi):
        """``int phi(x, y) dy`` over ``[y_lo, y_hi]`` (vectorised in the limits)."""
        bx, _ = _bspline((x - self.xc) / self.hx)
        lo = _bspline_integral((np.asarray(y_lo) - self.yc) / self.hy)
        hi = _bspline_integral((np.asarray(y_hi) - self.yc) / self.hy)
        return bx * self.hy * (hi - lo)

    @property
    def x_range(self) -> tuple[float, float]:
        return self.xc - 2.0 * self.hx, self.xc + 2.0 * self.hx

    @property
    def y_range(self) -> tuple[float, float]:
        return self.yc - 2.0 * self.hy, self.yc + 2.0 * self.hy


def bump_basket(sol: ApproxSolution, n: int = 50, seed: int = 0, on_shock: Sequence[tuple[float, float]] = ()) -> list[Bump]:
    """Bumps supported inside the computed region, a few centred at given points."""
    mesh = sol.mesh
    rng = np.random.default_rng(seed)
    x_max = mesh.x_max
    bumps = []
    for xc, yc in on_shock:
        h = 0.08 * x_max
        bumps.append(Bump(xc, yc, h, h))
    while len(bumps) < n:
        hx = rng.uniform(0.03, 0.12) * x_max
        hy = rng.uniform(0.03, 0.12) * x_max
        xc = rng.uniform(2.0 * hx, x_max - 2.0 * hx)
        top = mesh.b0 * (xc + 2.0 * hx) - 2.0 * hy  # keep the support below the wall
        bottom = mesh.b0 * (xc - 2.0 * hx) - mesh.depth + 2.0 * hy
        if top <= bottom:
            continue
        yc = rng.uniform(bottom, top)
        bumps.append(Bump(xc, yc, hx, hy))
    return bumps[:n] if n >= len(on_shock) else bumps


def _fan_pieces(fan, origin_eta: float, s: float, b0: float):
    """Piecewise description of a fan a distance ``s`` past its origin.

    Returns a list of ``(eta_lo, eta_hi, kind, payload)`` from bottom to top,
    where ``kind`` is ``"const"`` (payload: state) or ``"fan"`` (payload: wave).
    Only the part between the lowest and highest wave edge is returned.
    """
    pieces = []
    waves = [w for w in ([fan.wave2] if isinstance(fan, BoundaryFan) else [fan.wave2, fan.wave1]) if not w.is_trivial]
    pos = lambda c: origin_eta + (c - b0) * s
    prev_hi = None
    for w in waves:
        lo, hi = pos(w.speed_lo), pos(w.speed_hi)
        if prev_hi is not None and lo > prev_hi:
            pieces.append((prev_hi, lo, "const", w.left))
        if not w.is_shock:
            pieces.append((lo, hi, "fan", w))
        prev_hi = hi
    return waves, pieces


def entropy_residual_exact(sol: ApproxSolution, bump: Bump, n_gauss: int = 8, e_grid: np.ndarray | None = None) -> dict:
    """Weak-form entropy residual ``int (E phi_x + Q phi_y)`` evaluated strip by strip.

    Inside a column strip the scheme's solution is an exact entropy solution,
    so the integral reduces to (i) the dissipation ``sigma [E] - [Q]`` along
    every shock segment and (ii) the jumps of ``int E phi dy`` caused by the
    re-sampling at each ``x_k``.  Piecewise-constant parts are integrated with
    the exact antiderivative of the bump, rarefaction parts with Gauss-Legendre.
    """
    p = sol.params
    mesh = sol.mesh
    x_lo, x_hi = bump.x_range
    k_lo = max(0, int(math.floor(x_lo / mesh.dx)))
    k_hi = min(len(sol.fans) - 1, int(math.ceil(x_hi / mesh.dx)))
    gx, gw = np.polynomial.legendre.leggauss(n_gauss)
    if e_grid is None:
        e_grid = entropy_pair(sol.rho, sol.v, p)[0]
    dissipation = 0.0
    sampling = 0.0
    for k in range(k_lo, k_hi + 1):
        xk = k * mesh.dx
        wall = mesh.b0 * xk
        # (i) shock dissipation inside strip k
        for j, fan in sol.fans[k].items():
            for w in fan.waves:
                if not w.is_shock:
                    continue
                rate = shock_dissipation(w.left, w.right, w.speed, p)
                xs = xk + 0.5 * mesh.dx * (gx + 1.0)
                ys = wall - 2.0 * j * mesh.dy + w.speed * (xs - xk)
                dissipation += float(rate * np.sum(gw * bump(xs, ys)) * 0.5 * mesh.dx)
        # (ii) sampling jump at x_{k+1}: int phi (E(x-) - E(x+)) dy
        if k + 1 > mesh.k_max:
            continue
        x1 = (k + 1) * mesh.dx
        bx, _ = _bspline((x1 - bump.xc) / bump.hx)
        if bx == 0.0:
            continue
        sampling += _sampling_jump(sol, k, bump, x1, gx, gw, e_grid)
    return {"residual": float(dissipation + sampling), "dissipation": float(dissipation), "sampling": float(sampling)}


def _sampling_jump(sol: ApproxSolution, k: int, bump: Bump, x1: float, gx: np.ndarray, gw: np.ndarray, e_grid: np.ndarray) -> float:
    """``int phi(x1, y) (E(x1-, y) - E(x1+, y)) dy`` across the re-sampling at ``x1``.

    ``E(x1-)`` equals the column-``k`` cell values except within one half cell
    of a nontrivial fan, so the cell difference is integrated first and each
    fan contributes a local correction.
    """
    p = sol.params
    mesh = sol.mesh
    wall1 = mesh.b0 * x1
    y_lo, y_hi = bump.y_range
    eta_hi = min(0.0, y_hi - wall1)
    eta_lo = max(-mesh.depth, y_lo - wall1)
    if eta_hi <= eta_lo:
        return 0.0
    i_top = max(0, int(math.floor(-eta_hi / (2.0 * mesh.dy))))
    i_bot = min(mesh.y_depth - 1, int(math.ceil(-eta_lo / (2.0 * mesh.dy))))
    cells = np.arange(i_top, i_bot + 1)
    c_hi = np.minimum(-2.0 * cells * mesh.dy, eta_hi)
    c_lo = np.maximum(-2.0 * (cells + 1) * mesh.dy, eta_lo)
    weight = np.where(c_hi > c_lo, bump.y_integral(x1, wall1 + c_lo, wall1 + c_hi), 0.0)
    total = float(np.sum((e_grid[k, cells] - e_grid[k + 1, cells]) * weight))
    ent = lambda st: float(entropy_pair(st.rho, st.v, p)[0])
    for j, fan in sol.fans[k].items():
        origin = -2.0 * j * mesh.dy
        a0, b0_ = max(origin - mesh.dy, eta_lo), min(origin + mesh.dy, eta_hi)
        if b0_ <= a0:
            continue
        waves, inner = _fan_pieces(fan, origin, mesh.dx, mesh.b0)
        e_lo = origin + (waves[0].speed_lo - mesh.b0) * mesh.dx
        e_hi = origin + (waves[-1].speed_hi - mesh.b0) * mesh.dx
        pieces = [(origin - mesh.dy, e_lo, "const", fan.left), *inner, (e_hi, origin + mesh.dy, "const", fan.right)]
        # remove the cell values counted above on this span
        below = e_grid[k, min(j, mesh.y_depth - 1)]
        above = e_grid[k, j - 1] if j > 0 else below
        for a, b, e_cell in ((origin - mesh.dy, origin, below), (origin, origin + mesh.dy, above)):
            a, b = max(a, a0), min(b, b0_)
            if b > a:
                total -= e_cell * float(bump.y_integral(x1, wall1 + a, wall1 + b))
        for a, b, kind, payload in pieces:
            a, b = max(a, a0), min(b, b0_)
            if b <= a:
                continue
            if kind == "const":
                total += ent(payload) * float(bump.y_integral(x1, wall1 + a, wall1 + b))
            else:
                etas = 0.5 * (b - a) * gx + 0.5 * (b + a)
                xis = mesh.b0 + (etas - origin) / mesh.dx
                vals = np.array([ent(sample_fan(fan, float(xi), p)) for xi in xis])
                total += float(np.sum(gw * vals * bump(x1, wall1 + etas)) * 0.5 * (b - a))
    return total


def entropy_residual_midpoint(sol: ApproxSolution, bump: Bump, per_dx: int = 4, per_dy: int = 4) -> float:
    """Midpoint-rule evaluation of ``int (E phi_x + Q phi_y)`` on a lattice."""
    p = sol.params
    mesh = sol.mesh
    x_lo, x_hi = bump.x_range
    x_hi = min(x_hi, len(sol.fans) * mesh.dx)
    nx = max(1, int(math.ceil((x_hi - x_lo) / mesh.dx * per_dx)))
    hx = (x_hi - x_lo) / nx
    y_lo, y_hi = bump.y_range
    ny = max(1, int(math.ceil((y_hi - y_lo) / mesh.dy * per_dy)))
    hy = (y_hi - y_lo) / ny
    ys = y_lo + (np.arange(ny) + 0.5) * hy
    total = 0.0
    for ix in range(nx):
        x = x_lo + (ix + 0.5) * hx
        eta = ys - mesh.b0 * x
        rho, v = column_profile(sol, x, eta)
        e, q = entropy_pair(rho, v, p)
        px, py = bump.grad(x, ys)
        total += float(np.sum(e * px + q * py))
    return total * hx * hy


def entropy_residual(sol: ApproxSolution, bumps: Sequence[Bump], params: GasParams | None = None, method: str = "exact") -> dict:
    """Worst signed weak residual of the entropy inequality over ``bumps``.

    Only defined at ``tau = 0``, where the entropy pair is explicit.
    """
    params = params or sol.params
    if params.tau != 0.0:
        raise UnsupportedTau("the explicit entropy pair is only available at tau = 0")
    values = []
    details = []
    e_grid = entropy_pair(sol.rho, sol.v, params)[0]
    for b in bumps:
        if method == "exact":
            d = entropy_residual_exact(sol, b, e_grid=e_grid)
            values.append(d["residual"])
            details.append(d)
        elif method == "midpoint":
            r = entropy_residual_midpoint(sol, b)
            values.append(r)
            details.append({"residual": r})
        else:
            raise ConfigError(f"unknown entropy quadrature {method!r}")
    values = np.array(values)
    return {
        "min": float(values.min()) if values.size else 0.0,
        "values": values,
        "details": details,
    }
