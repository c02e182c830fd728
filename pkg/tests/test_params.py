import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glimm_wedge.errors import ConfigError, DegenerateScaling, UnsortedFamily
from glimm_wedge.params import (
    GasParams,
    PhysicalSetup,
    load_params,
    physical_fields,
    scaled_from_fields,
    scaled_from_physical,
    tau_family,
)


def test_defaults_and_smallness_scale():
    p = GasParams(gamma=1.4, a_inf=2.0, tau=0.1, b0=-0.5)
    assert p.tol_root == 1e-12 and p.tol_quad == 1e-10 and p.rho_floor == 1e-8
    assert p.smallness_scale == pytest.approx(0.4 + 0.01)
    assert not p.isothermal
    assert GasParams(gamma=1.0, a_inf=1.0, tau=0.0, b0=-0.1).isothermal


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(gamma=0.9, a_inf=1.0, tau=0.0, b0=-0.5),
        dict(gamma=2.5, a_inf=1.0, tau=0.0, b0=-0.5),
        dict(gamma=1.4, a_inf=0.0, tau=0.0, b0=-0.5),
        dict(gamma=1.4, a_inf=1.0, tau=-0.1, b0=-0.5),
        dict(gamma=1.4, a_inf=0.1, tau=0.2, b0=-0.5),
        dict(gamma=1.4, a_inf=1.0, tau=0.0, b0=0.0),
        dict(gamma=1.4, a_inf=1.0, tau=0.0, b0=-0.5, tol_root=0.0),
        dict(gamma=float("nan"), a_inf=1.0, tau=0.0, b0=-0.5),
    ],
)
def test_invalid_parameters_are_rejected(kwargs):
    with pytest.raises(ConfigError):
        GasParams(**kwargs)


def test_from_dict_names_the_missing_key():
    with pytest.raises(ConfigError, match="a_inf"):
        GasParams.from_dict({"gamma": 1.4, "tau": 0.0, "b0": -0.5})


def test_load_params_reads_json(tmp_path):
    path = tmp_path / "p.json"
    path.write_text('{"gamma": 1.2, "a_inf": 1.5, "tau": 0.05, "b0": -0.4, "tol_root": 1e-11}')
    p = load_params(path)
    assert (p.gamma, p.a_inf, p.tau, p.b0, p.tol_root) == (1.2, 1.5, 0.05, -0.4, 1e-11)
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_params(bad)


def test_tau_family():
    fam = tau_family(1.0, 1.01, -0.5, [0.2, 0.1, 0.0])
    assert [p.tau for p in fam] == [0.2, 0.1, 0.0]
    assert {(p.gamma, p.a_inf, p.b0) for p in fam} == {(1.01, 1.0, -0.5)}
    assert tau_family(1.0, 1.01, -0.5, []) == []
    with pytest.raises(UnsortedFamily):
        tau_family(1.0, 1.01, -0.5, [0.1, 0.2])


def test_physical_map_needs_positive_tau():
    setup = PhysicalSetup(mach_inf=10.0, theta_wedge=0.05)
    with pytest.raises(DegenerateScaling):
        scaled_from_physical(setup, 0.0)
    with pytest.raises(ConfigError):
        PhysicalSetup(mach_inf=0.9, theta_wedge=0.05)


@given(
    K=st.floats(0.1, 3.0),
    m1=st.floats(2.0, 50.0),
    m2=st.floats(2.0, 50.0),
    b0=st.floats(-2.0, -0.05),
    gamma=st.floats(1.0, 2.0),
)
def test_equal_similarity_parameter_gives_equal_scaled_constants(K, m1, m2, b0, gamma):
    # identify the slenderness through the wedge slope, tau = theta / |b0|
    params = []
    for m in (m1, m2):
        theta = K / m
        params.append(scaled_from_physical(PhysicalSetup(m, theta), theta / abs(b0), gamma=gamma))
    a, b = params
    assert a.gamma == b.gamma
    assert a.a_inf == pytest.approx(b.a_inf, rel=1e-12)
    assert a.b0 == pytest.approx(b.b0, rel=1e-12)


@settings(max_examples=200)
@given(
    rho=st.floats(0.05, 20.0),
    v=st.floats(-3.0, 3.0),
    u=st.floats(-3.0, 3.0),
    tau=st.floats(1e-3, 0.3),
)
def test_physical_round_trip(rho, v, u, tau):
    setup = PhysicalSetup(mach_inf=8.0, theta_wedge=0.1, u_inf=3.0, rho_inf=2.0)
    back = scaled_from_fields(*physical_fields(rho, v, u, setup, tau), setup, tau)
    assert back[0] == pytest.approx(rho, rel=1e-12)
    # u is stored as 1 + tau^2 u, so it can only come back to about eps / tau^2
    assert back[1] == pytest.approx(u, rel=1e-12, abs=8 * 2.3e-16 / tau**2)
    assert back[2] == pytest.approx(v, rel=1e-12, abs=1e-15)
    assert math.isfinite(back[1])
