import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sint, special
import warnings

from archimax import gen, radial, regvar
from archimax.errors import DomainError
from oracles import FROZEN

mk = gen.make_family


def test_forward_transform_examples():
    assert radial.forward_transform(radial.point_mass(1.0), 2, 0.3) == pytest.approx(0.7, abs=1e-15)
    for F in (radial.point_mass(2.0), radial.exponential(), radial.pareto(1.0)):
        assert radial.forward_transform(F, 3, 0.0) == 1.0
    F = radial.discrete([1.0, 2.0], [0.5, 0.5])
    assert radial.forward_transform(F, 2, 1.0) == pytest.approx(0.25, abs=1e-15)


def test_forward_transform_exponential_closed_form():
    F = radial.exponential()
    assert radial.forward_transform(F, 2, 1.0) == pytest.approx(FROZEN["exp_radial_psi_d2_1"], rel=1e-9)
    assert radial.forward_transform(F, 2, 5.0) == pytest.approx(FROZEN["exp_radial_psi_d2_5"], rel=1e-9)
    x = np.array([0.1, 2.0, 30.0])
    np.testing.assert_allclose(radial.forward_transform(F, 2, x),
                               np.exp(-x) - x * special.exp1(x), rtol=1e-9)


@pytest.mark.parametrize("F", [radial.exponential(), radial.halfnormal(), radial.pareto(2.0),
                               radial.uniform(0.0, 1.0)], ids=lambda F: F.name)
@pytest.mark.parametrize("d", [2, 3])
def test_forward_transform_against_scipy_quad(F, d):
    for x in (0.2, 0.9, 3.0):
        ref, _ = sint.quad(lambda r: (1 - x / r) ** (d - 1) * F.pdf(r), x, np.inf
                           if not np.isfinite(F.right_endpoint) else F.right_endpoint,
                           epsabs=1e-14, epsrel=1e-12, limit=200)
        assert radial.forward_transform(F, d, x) == pytest.approx(ref, rel=1e-8, abs=1e-14)


def test_log_eval_survives_underflow():
    g = radial.williamson_generator(radial.halfnormal(), 2)
    v = float(g.log_eval(1e4))
    assert np.isfinite(v) and v < -4e7


def test_inverse_transform_examples():
    C = mk("clayton", {"theta": 1.0})
    assert radial.inverse_transform(C, 2, 1.0) == pytest.approx(FROZEN["clayton1_radial_cdf_d2_1"], abs=1e-15)
    assert radial.inverse_transform(mk("independence"), 2, 1.0) == pytest.approx(
        FROZEN["indep_radial_cdf_d2_1"], rel=1e-14)
    for g in (C, mk("gumbel", {"theta": 2.0}), mk("countermonotone")):
        assert radial.inverse_transform(g, 2, 0.0) == 0.0


def test_inverse_transform_clamp_warns_for_invalid_dimension():
    g = mk("oscillating", {"a": 0.9}, d=3)
    with pytest.warns(RuntimeWarning, match="clamped"):
        F, mag = radial.inverse_transform(g, 3, np.geomspace(0.01, 1e4, 400), return_clamp=True)
    assert mag > 1e-2 and F.min() >= 0.0 and F.max() <= 1.0


def test_mixture_survival_mc_examples():
    est, se = radial.mixture_survival_mc(radial.point_mass(1.0), 2, 0.3, 10 ** 6, seed=1)
    assert abs(est - 0.7) <= 3 * se
    assert radial.mixture_survival_mc(radial.exponential(), 3, 0.0, 1000, seed=1) == (1.0, 0.0)
    est, se = radial.mixture_survival_mc(radial.discrete([1, 2], [0.5, 0.5]), 2, 1.0, 10 ** 6, seed=2)
    assert abs(est - 0.25) <= 3 * se
    with pytest.raises(DomainError):
        radial.mixture_survival_mc(radial.exponential(), 2, 1.0, 10, seed=0)


def test_beta_moment_examples():
    assert radial.beta_moment(4, 0) == 1.0
    assert radial.beta_moment(2, 1) == 0.5
    assert radial.beta_moment(3, 1) == pytest.approx(1 / 3, rel=1e-15)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("a", [0.5, 1.0, 2.5])
def test_beta_moment_integral(d, a):
    ref, _ = sint.quad(lambda s: s ** a * (d - 1) * (1 - s) ** (d - 2), 0, 1)
    assert radial.beta_moment(d, a) == pytest.approx(ref, rel=1e-10)


def test_radial_from_generator():
    Fi = radial.radial_from_generator(mk("independence"), 2)
    assert Fi.quantile(FROZEN["indep_radial_cdf_d2_1"]) == pytest.approx(1.0, abs=1e-10)
    Fc = radial.radial_from_generator(mk("clayton", {"theta": 1.0}), 2)
    assert Fc.cdf(1.0) == pytest.approx(0.25, abs=1e-15)
    assert Fc.cdf(0.0) == 0.0
    p = np.linspace(0.001, 0.999, 101)
    for F in (Fi, Fc, radial.radial_from_generator(mk("gumbel", {"theta": 2.0}), 3),
              radial.radial_from_generator(mk("clayton", {"theta": -0.25}, d=4), 4)):
        q = F.quantile(p)
        assert np.all(F.cdf(q) >= p - 1e-12)
        assert np.all(np.diff(q) >= 0)


def test_radial_from_generator_endpoint_atom():
    F = radial.radial_from_generator(mk("countermonotone"), 2)
    np.testing.assert_array_equal(F.quantile(np.array([0.2, 0.9])), [1.0, 1.0])


def test_radial_from_generator_dimension_check():
    with pytest.raises(DomainError):
        radial.radial_from_generator(mk("countermonotone"), 3)


def test_discrete_validation(tmp_path):
    with pytest.raises(DomainError):
        radial.discrete([1.0, 0.5], [0.5, 0.5])
    with pytest.raises(DomainError):
        radial.discrete([1.0, 2.0], [0.5, 0.6])
    with pytest.raises(DomainError):
        radial.discrete([0.0, 2.0], [0.5, 0.5])
    p = tmp_path / "atoms.csv"
    p.write_text("location,probability\n2.0,0.25\n0.5,0.75\n")
    F = radial.read_discrete_csv(p)
    assert F.atoms == [(0.5, 0.75), (2.0, 0.25)]
    p.write_text("loc,p\n1,1\n")
    with pytest.raises(DomainError):
        radial.read_discrete_csv(p)


@st.composite
def discrete_laws(draw):
    k = draw(st.integers(1, 6))
    loc = sorted(set(draw(st.lists(st.floats(0.5, 5.0), min_size=k, max_size=k))))
    w = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=len(loc), max_size=len(loc))))
    return radial.discrete(loc, w / w.sum())


@given(discrete_laws(), st.sampled_from([2, 3, 5]))
@settings(max_examples=60, deadline=None)
def test_roundtrip_property(F, d):
    x = np.linspace(0.0, 6.0, 200)
    back = radial.inverse_transform(radial.williamson_generator(F, d), d, x)
    assert np.max(np.abs(back - F.cdf(x))) <= 1e-6


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_rv_transfer_at_infinity(a):
    F = radial.pareto(a)
    g = radial.williamson_generator(F, 3)
    est = regvar.rv_index(g.log_eval, "infinity", log=True)
    assert est.converged and abs(est.index - a) <= 0.05
    x = np.array([1e2, 1e4, 1e6])
    ratio = g.eval(x) / F.sf(x)
    # the limit is beta_moment(d, a); see the decisions ledger
    np.testing.assert_allclose(ratio, FROZEN["pareto_ratio_d3"][a], rtol=0.02)
    assert radial.beta_moment(3, a) == pytest.approx(FROZEN["pareto_ratio_d3"][a], rel=1e-14)


@pytest.mark.parametrize("d", [2, 3])
def test_endpoint_transfer(d):
    F = radial.uniform(0.0, 1.0)
    a_F = regvar.rv_index(F.sf, "endpoint", endpoint=1.0)
    a_psi = regvar.rv_index(radial.williamson_generator(F, d).eval, "endpoint", endpoint=1.0)
    assert abs(a_F.index - 1.0) <= 0.05
    assert abs(a_psi.index - d) <= 0.05
