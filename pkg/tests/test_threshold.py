import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from archimax import gen, threshold
from archimax.copula import eval_copula
from archimax.errors import DomainError

mk = gen.make_family


def test_zero_threshold_returns_generator():
    g = mk("gumbel", {"theta": 2.0})
    assert threshold.lower_threshold_generator(g, 0.0) is g


def test_clayton_threshold_closed_form():
    g = threshold.lower_threshold_generator(mk("clayton", {"theta": 1.0}), 1.0)
    x = np.array([0.0, 0.5, 2.0, 100.0])
    np.testing.assert_allclose(g.eval(x), 2.0 / (2.0 + x), rtol=1e-14)
    np.testing.assert_allclose(g.pseudo_inverse(g.eval(x)), x, rtol=1e-12, atol=1e-14)


def test_countermonotone_threshold():
    g = threshold.lower_threshold_generator(mk("countermonotone"), 0.5)
    x = np.array([0.0, 0.1, 0.25, 0.5, 0.8])
    np.testing.assert_allclose(g.eval(x), np.maximum(1 - 2 * x, 0.0), atol=1e-15)
    assert g.right_endpoint == 0.5


def test_path_independence():
    base = mk("clayton", {"theta": 0.7})
    a = threshold.lower_threshold_generator(base, [0.3, 1.2])
    b = threshold.lower_threshold_generator(base, 1.5)
    x = np.geomspace(1e-3, 1e3, 9)
    np.testing.assert_allclose(a.eval(x), b.eval(x), rtol=1e-14)


@given(st.floats(0.01, 50.0), st.floats(0.01, 50.0))
@settings(max_examples=40, deadline=None)
def test_thresholds_compose(v, w):
    base = mk("gumbel", {"theta": 1.7})
    twice = threshold.lower_threshold_generator(threshold.lower_threshold_generator(base, v), w)
    once = threshold.lower_threshold_generator(base, v + w)
    x = np.array([0.1, 1.0, 5.0])
    np.testing.assert_allclose(twice.eval(x), once.eval(x), rtol=1e-10)


def test_threshold_beyond_endpoint():
    with pytest.raises(DomainError):
        threshold.lower_threshold_generator(mk("countermonotone"), 1.0)
    with pytest.raises(DomainError):
        threshold.lower_threshold_generator(mk("independence"), -1.0)


def test_threshold_survives_underflow():
    g = threshold.lower_threshold_generator(mk("independence"), 2000.0)
    np.testing.assert_allclose(g.eval(np.array([0.5, 3.0])), np.exp([-0.5, -3.0]), rtol=1e-12)


@pytest.mark.parametrize("fam,p,domain,theta", [
    ("clayton", {"theta": 1.0}, "frechet", 1.0),
    ("clayton", {"theta": 2.0}, "frechet", 2.0),
    ("independence", {}, "gumbel", 0.0),
    ("gumbel", {"theta": 2.0}, "gumbel", 0.0),
    ("countermonotone", {}, "weibull", -1.0),
])
def test_lltc_parameters(fam, p, domain, theta):
    rep = threshold.lltc_parameters(mk(fam, p))
    assert rep.domain == domain
    assert rep.theta_star == pytest.approx(theta, abs=1e-9)
    devs = [d for _, d in rep.trace]
    assert devs[-1] <= max(devs[0], 1e-12)


def test_lltc_clayton_fixed_point():
    rep = threshold.lltc_parameters(mk("clayton", {"theta": 3.0}))
    assert max(d for _, d in rep.trace) <= 1e-12


def test_lltc_undetermined():
    rep = threshold.lltc_parameters(mk("oscillating", d=2))
    assert rep.domain == "undetermined" and rep.theta_star is None and rep.notes


def test_weibull_beta():
    rep = threshold.lltc_parameters(mk("clayton", {"theta": -0.5}))
    assert rep.domain == "weibull" and rep.beta_at(1.5) == pytest.approx(0.5)


def test_upper_threshold_limit_values():
    H = threshold.upper_threshold_limit
    assert H(1.0, 1.0, 0.5) == pytest.approx(1.0, rel=1e-15)
    assert H(0.25, 0.25, 0.5) == pytest.approx(0.5, rel=1e-14)
    assert H(0.0, 0.7, 0.3) == 0.0
    with pytest.raises(DomainError):
        H(0.5, 0.5, 1.0)
    with pytest.raises(DomainError):
        H(1.5, 0.5, 0.5)


def test_upper_threshold_finite_converges():
    g = mk("gumbel", {"theta": 2.0})
    assert threshold.upper_threshold_finite(g, 0.3, 1.0, 1.0) == pytest.approx(1.0, rel=1e-14)
    ref = threshold.upper_threshold_limit(0.3, 0.6, 0.5)
    devs = [abs(threshold.upper_threshold_finite(g, v, 0.3, 0.6) - ref) for v in (1e-1, 1e-3, 1e-6)]
    assert devs[-1] < devs[0] and devs[-1] <= 1e-3


def test_upper_threshold_zero_denominator():
    with pytest.raises(DomainError):
        threshold.upper_threshold_finite(mk("countermonotone"), 0.25, 0.5, 0.5)
    with pytest.raises(DomainError):
        threshold.upper_threshold_finite(mk("gumbel", {"theta": 2.0}), 0.0, 0.5, 0.5)
