import numpy as np
import pytest

from conftest import wedge_params, wedge_run
from glimm_wedge.errors import CFLViolation, ConfigError, OutOfDomain
from glimm_wedge.glimm import (
    BumpProfile,
    ConstantProfile,
    Mesh,
    StepProfile,
    ThetaSequence,
    column_profile,
    evaluate,
    profile_from_dict,
    profile_to_dict,
    run,
    shock_front,
    wave_log,
)
from glimm_wedge.riemann import solve_boundary, solve_interior
from glimm_wedge.state import FlowState
from glimm_wedge.waves import shock_state


def test_van_der_corput_values():
    th = ThetaSequence.van_der_corput(4, 0)
    assert list(th.values) == [0.0, -0.5, 0.5, -0.75]
    assert list(ThetaSequence.van_der_corput(2, 2).values) == [0.5, -0.75]


def test_theta_generators():
    u = ThetaSequence.uniform(1000, 3)
    assert np.all(np.abs(u.values) < 1.0)
    assert np.array_equal(u.values, ThetaSequence.make("uniform", 1000, 3).values)
    with pytest.raises(ConfigError):
        ThetaSequence.make("sobol", 3)
    with pytest.raises(ConfigError):
        ThetaSequence(np.array([1.0]), "manual", 0)


def test_mesh_validation_and_refinement():
    with pytest.raises(ConfigError):
        Mesh(0.0, 0.1, -0.5, 10, 10)
    with pytest.raises(ConfigError):
        Mesh(0.1, 0.1, -0.5, -1, 10)
    m = Mesh(0.1, 0.2, -0.5, 10, 7)
    r = m.refined()
    assert (r.dx, r.dy, r.k_max, r.y_depth) == (0.05, 0.1, 20, 14)
    assert r.x_max == pytest.approx(m.x_max)
    assert m.sample_eta(0.0)[:2] == pytest.approx([-0.2, -0.6])


def test_profiles_round_trip_through_dicts():
    for prof in (
        ConstantProfile(FlowState(1.0, 0.0)),
        StepProfile(-0.3, FlowState(1.2, 0.1), FlowState(1.0, 0.0)),
        BumpProfile(FlowState(1.0, 0.0), -0.3, 0.4, 0.2, 0.1),
    ):
        assert profile_from_dict(profile_to_dict(prof)) == prof
    with pytest.raises(ConfigError, match="profile.state"):
        profile_from_dict({"kind": "constant"})
    with pytest.raises(ConfigError):
        profile_from_dict({"kind": "wave"})


def test_bump_profile_is_compactly_supported():
    b = BumpProfile(FlowState(1.0, 0.0), -0.3, 0.4, 0.2, 0.1)
    assert b(-0.3) == FlowState(1.2, 0.1)
    assert b(-0.5) == FlowState(1.0, 0.0)
    assert b(0.0) == FlowState(1.0, 0.0)
    assert b.support_depth == pytest.approx(0.5)


def test_aligned_free_stream_stays_constant():
    p = wedge_params(b0=-0.3)
    prof = ConstantProfile(FlowState(1.0, -0.3))
    mesh = Mesh.build(p, 1.0, 40, prof)
    sol = run(p, mesh, ThetaSequence.van_der_corput(41), prof)
    assert np.all(sol.rho == 1.0)
    assert np.all(sol.v == -0.3)
    assert all(not f for f in sol.fans)
    assert wave_log(sol) == []


def test_first_column_has_only_the_boundary_shock():
    sol = wedge_run(20)
    assert list(sol.fans[0]) == [0]
    expected = solve_boundary(FlowState(1.0, 0.0), sol.params).top
    # the top cell holds either the free stream or exactly the state behind the shock
    tops = {sol.state(k, 0) for k in range(sol.rho.shape[0])}
    assert tops == {FlowState(1.0, 0.0), expected}
    for k in range(len(sol.fans)):
        kinds = [w.kind.value for _, w in sol.waves(k)]
        assert kinds == ["S2"]
    assert sol.bottom_clean
    assert sol.lost_waves == 0


def test_cfl_violation_is_reported():
    p = wedge_params()
    prof = ConstantProfile(FlowState(1.0, 0.0))
    with pytest.raises(CFLViolation):
        run(p, Mesh(0.1, 0.01, p.b0, 5, 10), ThetaSequence.van_der_corput(6), prof)


def test_mesh_and_params_must_agree():
    p = wedge_params()
    prof = ConstantProfile(FlowState(1.0, 0.0))
    with pytest.raises(ConfigError):
        run(p, Mesh(0.1, 0.2, -0.1, 5, 10), ThetaSequence.van_der_corput(6), prof)
    with pytest.raises(ConfigError):
        run(p, Mesh(0.1, 0.2, p.b0, 5, 10), ThetaSequence.van_der_corput(3), prof)
    with pytest.raises(ConfigError):
        Mesh.build(p, 1.0, 0, prof)


def test_zero_steps_samples_initial_column_only():
    p = wedge_params()
    prof = StepProfile(-0.25, FlowState(1.2, 0.0), FlowState(1.0, 0.0))
    mesh = Mesh(0.01, 0.02, p.b0, 0, 20)
    sol = run(p, mesh, ThetaSequence.van_der_corput(1), prof)
    assert sol.rho.shape == (1, 20)
    assert sol.fans == []
    # samples at (-2i - 1) dy: cells 0..5 lie above the jump
    assert list(sol.rho[0, :7]) == [1.2] * 6 + [1.0]


def test_runs_are_deterministic():
    a = wedge_run(30)
    b = wedge_run(30)
    assert np.array_equal(a.rho, b.rho) and np.array_equal(a.v, b.v)
    assert wave_log(a) == wave_log(b)


def test_single_shock_is_transported_without_new_waves():
    p = wedge_params(b0=-0.3)
    # at tau = 0 the Hugoniot velocity jump does not depend on v, so the lower
    # state can be shifted until the upper one is aligned with the wall
    jump = shock_state(0.8, FlowState(1.25, 0.0), p).v
    below = FlowState(1.25, -0.3 - jump)
    above = shock_state(0.8, below, p)
    assert above.v == pytest.approx(-0.3, abs=1e-15)
    above = FlowState(above.rho, -0.3)
    fan = solve_interior(below, above, p)
    assert [w.kind.value for w in fan.waves] == ["S1"]
    prof = StepProfile(-1.0, above, below)
    mesh = Mesh.build(p, 0.5, 50, prof)
    sol = run(p, mesh, ThetaSequence.van_der_corput(51), prof)
    # every column holds exactly the two constants
    values = set(zip(sol.rho.ravel().tolist(), sol.v.ravel().tolist()))
    assert values == {(above.rho, above.v), (below.rho, below.v)}
    for k in range(len(sol.fans)):
        assert [w.kind.value for _, w in sol.waves(k)] == ["S1"]


def test_evaluate_conventions():
    sol = wedge_run(20)
    mesh = sol.mesh
    assert evaluate(sol, 0.0, -mesh.dy) == FlowState(1.0, 0.0)
    x = 5.5 * mesh.dx
    wall = mesh.b0 * x
    top = solve_boundary(FlowState(1.0, 0.0), sol.params).top
    assert evaluate(sol, x, wall) == top
    assert evaluate(sol, x, wall - 0.5 * mesh.depth) == FlowState(1.0, 0.0)
    eta = np.array([0.0, -0.5 * mesh.depth])
    rho, v = column_profile(sol, x, eta)
    assert (rho[0], v[0]) == (top.rho, top.v)
    assert (rho[1], v[1]) == (1.0, 0.0)
    with pytest.raises(OutOfDomain):
        evaluate(sol, x, wall + 0.1)
    with pytest.raises(OutOfDomain):
        evaluate(sol, -0.1, -1.0)
    with pytest.raises(OutOfDomain):
        evaluate(sol, 2.0 * mesh.x_max, -1.0)
    with pytest.raises(OutOfDomain):
        column_profile(sol, x, np.array([-2.0 * mesh.depth]))


def test_shock_front_moves_below_the_wall():
    sol = wedge_run(40)
    front = shock_front(sol)
    assert len(front) == 40
    etas = [y - sol.mesh.wall(k) for k, y in front]
    assert etas[0] == 0.0
    assert etas[-1] < etas[0]
