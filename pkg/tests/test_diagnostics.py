import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import wedge_params, wedge_run
from glimm_wedge.diagnostics import (
    Bump,
    FunctionalEntry,
    FunctionalReport,
    FunctionalWeights,
    approaching_product,
    bump_basket,
    check_f_monotone,
    entropy_pair,
    entropy_residual,
    entropy_residual_exact,
    entropy_residual_midpoint,
    fit_l1_constant,
    functional_report,
    l1_continuity,
    shock_dissipation,
)
from glimm_wedge.errors import ConfigError, UnsupportedTau
from glimm_wedge.riemann import solve_boundary
from glimm_wedge.state import FlowState
from glimm_wedge.waves import shock_speed, shock_state


def test_weights_are_validated():
    FunctionalWeights(2.0, 10.0)
    for k_b, c_star in ((1.0, 10.0), (4.0, 10.0), (2.0, 1.5)):
        with pytest.raises(ConfigError):
            FunctionalWeights(k_b, c_star)


waves = st.lists(st.tuples(st.integers(0, 30), st.floats(0.0, 1.0)), max_size=8)


@settings(max_examples=200, deadline=None)
@given(s1=waves, s2=waves)
def test_approaching_product_matches_pairwise_sum(s1, s2):
    # an S1 at interface j1 approaches an S2 at j2 when it lies strictly lower
    brute = sum(a * b for (j1, a), (j2, b) in itertools.product(s1, s2) if j1 > j2)
    assert approaching_product(s1, s2) == pytest.approx(brute, rel=1e-12, abs=1e-15)


def test_wedge_functional_is_the_boundary_shock_strength():
    sol = wedge_run(40)
    z2 = abs(solve_boundary(FlowState(1.0, 0.0), sol.params).z2)
    rep = functional_report(sol)
    assert len(rep.entries) == 40
    assert np.allclose(rep.F, z2, rtol=1e-12)
    assert all(e.L1 == 0.0 and e.Q == 0.0 for e in rep.entries)
    assert rep.smallness == pytest.approx(0.1 * z2)
    assert check_f_monotone(rep).violations == []


def test_monotone_check_flags_increases():
    w = FunctionalWeights()
    entries = [FunctionalEntry(k, 0, 0, 0, 0, f, 0, 0) for k, f in enumerate([1.0, 0.9, 0.95, 0.95])]
    chk = check_f_monotone(FunctionalReport(w, 0.1, entries))
    assert [v[0] for v in chk.violations] == [1]
    assert chk.worst_increase == pytest.approx(0.05)
    assert chk.smallness == pytest.approx(0.1)
    assert not chk.hypothesis_ok
    empty = check_f_monotone(FunctionalReport(w, 0.1, []))
    assert empty.violations == [] and empty.smallness == 0.0


def _symbolic_pair():
    rho, v, g, a = sp.symbols("rho v gamma a", positive=True)
    E = rho * v**2 / 2 + (rho**g - rho) / (g * (g - 1) * a**2)
    Q = v * (E + rho**g / (g * a**2))
    return rho, v, g, a, E, Q


def test_entropy_pair_is_compatible_with_the_flux():
    rho, v, g, a, E, Q = _symbolic_pair()
    h = (rho ** (g - 1) - 1) / ((g - 1) * a**2)
    F = sp.Matrix([rho * v, v**2 / 2 + h])
    X = sp.Matrix([rho, v])
    gradE = sp.Matrix([E]).jacobian(X)
    gradQ = sp.Matrix([Q]).jacobian(X)
    mismatch = sp.simplify(gradQ - gradE * F.jacobian(X))
    assert mismatch == sp.zeros(1, 2)
    hess = sp.hessian(E, X)
    det = sp.simplify(hess.det())
    f = sp.lambdify((rho, v, g, a), [hess[0, 0], det])
    for vals in itertools.product((0.3, 1.0, 3.0), (-0.5, 0.5), (1.05, 1.4), (1.0,)):
        h00, d = f(*vals)
        assert h00 > 0 and d > 0


def test_entropy_pair_matches_symbolic_form():
    rho, v, g, a, E, Q = _symbolic_pair()
    fe = sp.lambdify((rho, v, g, a), E)
    fq = sp.lambdify((rho, v, g, a), Q)
    p = wedge_params(gamma=1.3)
    for r, vv in ((0.5, 0.1), (1.0, 0.0), (2.0, -0.4)):
        e, q = entropy_pair(r, vv, p)
        assert e == pytest.approx(fe(r, vv, 1.3, 1.0), rel=1e-13, abs=1e-15)
        assert q == pytest.approx(fq(r, vv, 1.3, 1.0), rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("alpha", [0.5, 0.9, 1.1, 2.0])
def test_admissible_shocks_dissipate_entropy(alpha):
    p = wedge_params(gamma=1.3)
    left = FlowState(1.0, 0.1)
    right = shock_state(alpha, left, p)
    sigma = shock_speed(left, right, p)
    assert shock_dissipation(left, right, sigma, p) > 0.0
    # the same jump read the other way round produces entropy
    assert shock_dissipation(right, left, sigma, p) < 0.0


def test_bump_integral_and_gradient():
    b = Bump(0.5, -0.4, 0.1, 0.07)
    x = 0.53
    ref, _ = integrate.quad(lambda y: float(b(x, y)), -0.5, -0.35, epsabs=1e-14)
    assert b.y_integral(x, -0.5, -0.35) == pytest.approx(ref, rel=1e-10)
    total, _ = integrate.quad(lambda y: float(b(x, y)), *b.y_range, epsabs=1e-14)
    assert b.y_integral(x, *b.y_range) == pytest.approx(total, rel=1e-10)
    h = 1e-6
    gx, gy = b.grad(x, -0.42)
    assert gx == pytest.approx((b(x + h, -0.42) - b(x - h, -0.42)) / (2 * h), rel=1e-6)
    assert gy == pytest.approx((b(x, -0.42 + h) - b(x, -0.42 - h)) / (2 * h), rel=1e-6)
    assert b(0.75, -0.4) == 0.0


def test_basket_stays_inside_the_region():
    sol = wedge_run(40)
    for b in bump_basket(sol, n=30, seed=4):
        x_lo, x_hi = b.x_range
        assert 0.0 <= x_lo and x_hi <= sol.mesh.x_max
        assert b.y_range[1] <= sol.mesh.b0 * x_hi


def test_exact_and_lattice_residuals_agree():
    sol = wedge_run(100)
    for b in bump_basket(sol, n=4, seed=1):
        exact = entropy_residual_exact(sol, b)["residual"]
        lattice = entropy_residual_midpoint(sol, b, per_dx=8, per_dy=8)
        assert lattice == pytest.approx(exact, abs=2e-3 * b.hx * b.hy + 1e-6)


def test_entropy_residual_needs_tau_zero():
    sol = wedge_run(10, tau=0.05)
    with pytest.raises(UnsupportedTau):
        entropy_residual(sol, [])
    with pytest.raises(ConfigError):
        entropy_residual(wedge_run(10), bump_basket(wedge_run(10), n=1), method="simpson")


def test_l1_continuity_conventions():
    sol = wedge_run(40)
    assert l1_continuity(sol, 0.3, 0.3) == 0.0
    assert l1_continuity(sol, 0.3, 0.6) > 0.0
    fit = fit_l1_constant(sol)
    assert fit.constant == pytest.approx(fit.ratios.max())
    assert len(fit.pairs) == fit.ratios.size
