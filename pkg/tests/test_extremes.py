import math

import numpy as np
import pytest

from archimax import extremes, gen, radial, sampler
from archimax.copula import empirical_copula, empirical_copula_eval, eval_copula
from archimax.errors import DomainError
from oracles import FROZEN

mk = gen.make_family


def test_galambos_boundaries_and_value():
    assert extremes.galambos_eval(0.0, 0.4, 1.0) == 0.0
    assert extremes.galambos_eval(1.0, 0.4, 1.0) == 0.4
    assert extremes.galambos_eval(0.3, 1.0, 2.0) == 0.3
    assert extremes.galambos_eval(0.5, 0.5, 1.0) == pytest.approx(FROZEN["galambos_half_half_1"], rel=1e-14)
    with pytest.raises(DomainError):
        extremes.galambos_eval(0.5, 0.5, 0.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
@pytest.mark.parametrize("t", [0.5, 2.0, 7.0])
def test_galambos_max_stable(alpha, t):
    u = np.array([0.2, 0.5, 0.9])
    v = np.array([0.7, 0.3, 0.95])
    lhs = extremes.galambos_eval(u ** t, v ** t, alpha)
    rhs = extremes.galambos_eval(u, v, alpha) ** t
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12)


def test_exponent_measure_closed_form():
    spec = extremes.ExponentMeasureSpec(1.0)
    assert extremes.exponent_measure(spec, [1.0, 1.0]).value == pytest.approx(0.75, rel=1e-14)
    for a in (0.5, 1.0, 2.5):
        r = extremes.exponent_measure(extremes.ExponentMeasureSpec(a), [2.0, np.inf])
        assert abs(r.value - 2.0 ** -a / (1 + a)) <= 1e-9


@pytest.mark.parametrize("d", [2, 3])
def test_exponent_measure_homogeneity(d):
    spec = extremes.ExponentMeasureSpec(1.5, d)
    x = np.array([1.0, 2.0, 0.5][:d])
    a = extremes.exponent_measure(spec, x, n_mc=400_000, seed=1)
    b = extremes.exponent_measure(spec, 2 * x, n_mc=400_000, seed=2)
    lhs = b.value * 2.0 ** 1.5
    if d == 2:
        assert abs(lhs - a.value) <= 1e-10
    else:
        assert abs(lhs - a.value) <= 4 * math.hypot(a.stderr, 2.0 ** 1.5 * b.stderr)


def test_exponent_measure_validation():
    with pytest.raises(DomainError):
        extremes.ExponentMeasureSpec(0.0)
    with pytest.raises(DomainError):
        extremes.exponent_measure(extremes.ExponentMeasureSpec(1.0), [1.0, 0.0])


def test_normalizing_constants():
    F = radial.uniform()
    assert extremes.normalizing_constants(F, 10) == pytest.approx(0.1, rel=1e-12)
    assert extremes.normalizing_constants(F, 1) == pytest.approx(1.0, rel=1e-12)
    with pytest.warns(RuntimeWarning):
        assert extremes.normalizing_constants(radial.point_mass(1.0), 10) == 0.0
    with pytest.raises(DomainError):
        extremes.normalizing_constants(radial.exponential(), 10)


def test_ev_rescaled_copula():
    g = mk("clayton", {"theta": 1.0})
    u = np.array([[0.3, 0.6], [0.5, 0.5], [0.9, 0.2]])
    np.testing.assert_allclose(extremes.ev_rescaled_copula(g, 1, u), eval_copula(g, u), rtol=1e-14)
    v = extremes.ev_rescaled_copula(g, 1000, np.array([0.5, 0.5]))
    assert v == pytest.approx(FROZEN["clayton1_ev_half_half_n1000"], rel=1e-10)
    assert extremes.ev_rescaled_copula(g, 10, np.array([0.0, 0.5])) == 0.0


def test_ev_deviation_ladder():
    rep = extremes.gumbel_limit_theta(mk("clayton", {"theta": 1.0}))
    assert rep.converged and rep.theta == pytest.approx(1.0, abs=1e-6)
    for n, dev in rep.sup_deviation_by_n:
        assert dev == pytest.approx(FROZEN["clayton1_ev_dev"][n], rel=1e-6, abs=1e-13)
    assert rep.monotone


def test_gumbel_limit_theta_gumbel_fixed_point():
    g = mk("gumbel", {"theta": 2.0})
    rep = extremes.gumbel_limit_theta(g)
    assert rep.theta == pytest.approx(2.0, abs=1e-6)
    assert all(d <= 1e-12 for _, d in rep.sup_deviation_by_n)


def test_block_extrema():
    M = sampler.sample_copula(mk("clayton", {"theta": 1.0}), 2, 1000, seed=1)
    B = extremes.block_extrema(M, 1)
    assert np.array_equal(B.data, M.data)
    E1, E2 = empirical_copula(B), empirical_copula(M)
    pts = np.array([[0.3, 0.4], [0.8, 0.5], [1.0, 1.0]])
    np.testing.assert_array_equal(empirical_copula_eval(E1, pts), empirical_copula_eval(E2, pts))
    assert empirical_copula_eval(E1, np.array([1.0, 1.0])) == 1.0
    mn = extremes.block_extrema(M.data, 10, "min")
    assert mn.shape == (100, 2) and np.all(mn <= M.data[:1000:10])


def test_maxima_rapid_tail_degenerate():
    rep = extremes.maxima_ev_check(radial.exponential())
    assert rep.degenerate and rep.alpha == math.inf


def test_maxima_pareto_galambos():
    rep = extremes.maxima_ev_check(radial.pareto(1.0), block=200, n_blocks=4000, seed=2)
    assert not rep.degenerate
    for u1, u2, emp, ref, se in rep.rows:
        assert abs(emp - ref) <= 4 * se + 0.02


def test_minima_closure():
    g = mk("clayton", {"theta": 1.0})
    n_blocks, block = 200_000, 5
    U = sampler.sample_copula(g, 2, n_blocks * block, seed=11)
    # U = psi(X) for l1-norm symmetric X, so minima of X are phi(U) minima
    W = extremes.block_extrema(g.pseudo_inverse(U.data), block, "min")
    P = gen.power(g, block)
    V = P.eval(W)
    E = empirical_copula(V)
    pts = np.array([[0.5, 0.5], [0.3, 0.7], [0.2, 0.2], [0.8, 0.8]])
    emp = empirical_copula_eval(E, pts)
    ref = eval_copula(P, pts)
    assert np.max(np.abs(emp - ref)) <= 0.01
