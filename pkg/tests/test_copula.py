import itertools

import numpy as np
import pytest

from archimax import copula, gen, sampler
from archimax.errors import UnsupportedError

mk = gen.make_family


def grid(d, k=5):
    g = np.linspace(0.05, 0.95, k)
    return np.stack(np.meshgrid(*([g] * d), indexing="ij"), axis=-1).reshape(-1, d)


def families():
    return [(mk("clayton", {"theta": 1.0}), 3), (mk("clayton", {"theta": -0.3}), 3),
            (mk("gumbel", {"theta": 2.0}), 3), (mk("independence"), 4),
            (mk("countermonotone"), 2), (mk("log19", {"theta": 2.0}), 2)]


def test_eval_examples():
    for G, d in families():
        for j in range(d):
            u = np.ones(d)
            u[j] = 0.37
            assert copula.eval_copula(G, u) == pytest.approx(0.37, abs=1e-12)
    assert copula.eval_copula(mk("clayton", {"theta": 1.0}), [0.5, 0.5]) == pytest.approx(1 / 3, rel=1e-15)
    assert copula.eval_copula(mk("independence"), [0.5, 0.4, 0.2]) == pytest.approx(0.04, rel=1e-14)


def test_zero_set_exact():
    W = mk("countermonotone")
    assert copula.eval_copula(W, [0.5, 0.5]) == 0.0
    assert copula.eval_copula(W, [0.3, 0.6]) == 0.0
    C = mk("clayton", {"theta": -0.5})
    assert copula.eval_copula(C, [0.2, 0.3]) == 0.0


def test_survival_examples():
    assert copula.eval_survival(mk("gumbel", {"theta": 2.0}), [0.0, 0.0, 0.0]) == 1.0
    assert copula.eval_survival(mk("countermonotone"), [0.3, 0.4]) == pytest.approx(0.3, abs=1e-15)
    assert copula.eval_survival(mk("clayton", {"theta": 1.0}), [1.0, 1.0]) == pytest.approx(1 / 3, rel=1e-15)


def test_rectangle_mass_examples():
    for G, d in families():
        assert copula.rectangle_mass(G, np.zeros(d), np.ones(d)) == pytest.approx(1.0, abs=1e-12)
    assert copula.rectangle_mass(mk("countermonotone"), [0, 0], [0.5, 0.5]) == 0.0
    W3 = mk("countermonotone", d=3, validate=False)
    lo, hi, mass = copula.find_negative_rectangle(W3, 3, step=0.1)
    assert mass < -1e-6
    assert copula.rectangle_mass(W3, lo, hi) == mass
    with pytest.raises(UnsupportedError):
        copula.rectangle_mass(mk("independence"), np.zeros(13), np.ones(13))


def test_no_negative_cells_for_valid_generators():
    for G, d in families():
        assert copula.find_negative_rectangle(G, d, step=0.1) is None


@pytest.mark.parametrize("G,d", families(), ids=lambda v: str(v))
def test_scale_invariance(G, d):
    u = grid(d)
    ref = copula.eval_copula(G, u)
    for c in (0.5, 2.0, 10.0):
        assert np.max(np.abs(copula.eval_copula(gen.rescale(G, c), u) - ref)) <= 1e-12


@pytest.mark.parametrize("G,d", families(), ids=lambda v: str(v))
def test_frechet_bounds(G, d):
    u = grid(d)
    C = copula.eval_copula(G, u)
    assert np.all(C <= u.min(axis=1) + 1e-12)
    assert np.all(C >= np.maximum(u.sum(axis=1) - d + 1, 0) - 1e-12)


def test_marginal_closure():
    G = mk("clayton", {"theta": 2.0})
    u2 = grid(2)
    u4 = np.column_stack((u2, np.ones((len(u2), 2))))
    assert np.array_equal(copula.eval_copula(G, u4), copula.eval_copula(G, u2))


def test_empirical_copula():
    M = sampler.sample_copula(mk("clayton", {"theta": 1.0}), 2, 10 ** 6, seed=21)
    E = copula.empirical_copula(M)
    assert E.n == 10 ** 6 and E.ties == 0
    assert all(np.array_equal(np.sort(E.ranks[:, j]), np.arange(1, E.n + 1)) for j in range(2))
    assert copula.empirical_copula_eval(E, [1.0, 1.0]) == 1.0
    assert copula.empirical_copula_eval(E, [0.0, 0.7]) == 0.0
    assert abs(copula.empirical_copula_eval(E, [0.5, 0.5]) - 1 / 3) <= 0.002


def test_empirical_copula_ties_warn():
    with pytest.warns(RuntimeWarning, match="tied"):
        E = copula.empirical_copula(np.array([[0.1, 0.2], [0.1, 0.3], [0.5, 0.9]]))
    assert E.ties == 1
    np.testing.assert_array_equal(E.ranks[:, 0], [1, 2, 3])


def test_survival_transform():
    M = sampler.sample_copula(mk("countermonotone"), 2, 1000, seed=22)
    S = copula.survival_copula_transform(M)
    assert np.max(np.abs(S.data.sum(axis=1) - 1)) <= 1e-12
    assert np.array_equal(copula.survival_copula_transform(S).data, 1 - (1 - M.data))
    I = sampler.sample_copula(mk("independence"), 2, 10 ** 5, seed=23)
    E = copula.empirical_copula(copula.survival_copula_transform(I))
    for u in itertools.product((0.3, 0.7), repeat=2):
        assert abs(copula.empirical_copula_eval(E, list(u)) - u[0] * u[1]) <= 0.01
