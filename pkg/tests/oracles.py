"""Frozen reference values and the symbolic/high-precision recipes behind them.

Each constant in ``FROZEN`` is reproduced by ``derive()`` from sympy or
mpmath alone; ``test_oracles.py`` checks that the two agree, the other
tests only read ``FROZEN``.
"""

import mpmath as mp
import sympy as sp

FROZEN = {
    # clayton theta=1
    "clayton1_psi_1": 0.5,
    "clayton1_d1_1": -0.25,
    "clayton1_d2_0": 2.0,
    "clayton1_radial_cdf_d2_1": 0.25,
    "clayton1_C_half_half": 1.0 / 3.0,
    # independence
    "indep_d3_1": -0.36787944117144233,
    "indep_radial_cdf_d2_1": 0.26424111765711533,
    # oscillating generator
    "osc_c": (1.0, 1.4142135623730951, 3.1622776601683795, 10.0),
    "osc_phi": (0.0, -0.7853981633974483, -1.2490457723982544, -1.5707963267948966),
    "osc_a_d2": 0.7071067811865476,
    "osc_a_d3": 0.6324555320336759,
    # tail dependence
    "gumbel2_lambda_bar_lower": 0.41421356237309503,  # sqrt(2) - 1
    # Williamson transform of Exp(1) at d = 2: exp(-x) - x E1(x)
    "exp_radial_psi_d2_1": 0.14849550677592205,
    "exp_radial_psi_d2_5": 0.000996469042708838,
    # Gumbel theta=2 tail integral auxiliary: 2 + 2 sqrt(x)
    "gumbel2_aux_1e4": 202.0,
    # Galambos alpha=1 at (1/2, 1/2)
    "galambos_half_half_1": 0.3535533905932738,
    # sup over the 9x9 grid of |C^n(u^(1/n)) - u1 u2| for clayton theta=1
    "clayton1_ev_dev": {
        1: 0.09,
        10: 0.012799250105208458,
        100: 0.001336706714590728,
        1000: 0.00013426753101350504,
        10000: 1.3432752355312324e-05,
    },
    "clayton1_ev_half_half_n1000": 0.25012005887882693,
    # psi / F_bar for Pareto(alpha) radial, d = 3 (constant for x >= 1)
    "pareto_ratio_d3": {0.5: 0.5333333333333333, 1.0: 0.3333333333333333,
                        2.0: 0.16666666666666666},
}


def _clayton_ev_dev(n, dps=50):
    with mp.workdps(dps):
        g = [mp.mpf("0.1") * k for k in range(1, 10)]
        e = mp.mpf(1) / n
        return float(max(abs((u ** -e + v ** -e - 1) ** -n - u * v) for u in g for v in g))


def derive():
    """Recompute every frozen value independently of the package."""
    x, t, r = sp.symbols("x t r", positive=True)
    out = {}
    psi = 1 / (1 + x)
    out["clayton1_psi_1"] = float(psi.subs(x, 1))
    out["clayton1_d1_1"] = float(sp.diff(psi, x).subs(x, 1))
    out["clayton1_d2_0"] = float(sp.limit(sp.diff(psi, x, 2), x, 0))
    F = 1 - psi + x * sp.diff(psi, x)
    out["clayton1_radial_cdf_d2_1"] = float(F.subs(x, 1))
    phi = 1 / sp.Rational(1, 2) - 1
    out["clayton1_C_half_half"] = float(psi.subs(x, 2 * phi))

    e = sp.exp(-x)
    out["indep_d3_1"] = float(sp.diff(e, x, 3).subs(x, 1))
    out["indep_radial_cdf_d2_1"] = float((1 - e + x * sp.diff(e, x)).subs(x, 1))

    c, ph = [sp.Integer(1)], [sp.Integer(0)]
    for k in range(3):
        c.append(c[-1] * sp.sqrt(k * k + 2 * k + 2))
        ph.append(ph[-1] - sp.atan(sp.Rational(1, k + 1)))
    out["osc_c"] = tuple(float(v) for v in c)
    out["osc_phi"] = tuple(float(v) for v in ph)
    out["osc_a_d2"] = float(sp.factorial(1) / c[1])
    out["osc_a_d3"] = float(sp.factorial(2) / c[2])

    g = sp.exp(-sp.sqrt(t))
    out["gumbel2_lambda_bar_lower"] = float(
        sp.limit(2 * sp.log(g) / sp.log(g.subs(t, 2 * t)) - 1, t, sp.oo))

    W = sp.integrate((1 - x / r) * sp.exp(-r), (r, x, sp.oo))
    out["exp_radial_psi_d2_1"] = float(sp.N(W.subs(x, 1), 30).as_real_imag()[0])
    out["exp_radial_psi_d2_5"] = float(sp.N(W.subs(x, 5), 30).as_real_imag()[0])

    aux = sp.integrate(g, (t, x, sp.oo)) / g.subs(t, x)
    out["gumbel2_aux_1e4"] = float(sp.simplify(aux).subs(x, 10 ** 4))

    with mp.workdps(40):
        h = mp.mpf("0.5")
        s = 2 * (-mp.log(h)) ** -1
        out["galambos_half_half_1"] = float(h * h * mp.exp(1 / s))

    out["clayton1_ev_dev"] = {n: _clayton_ev_dev(n) for n in (1, 10, 100, 1000, 10000)}
    with mp.workdps(50):
        n = 1000
        out["clayton1_ev_half_half_n1000"] = float((2 * h ** (-mp.mpf(1) / n) - 1) ** -n)

    ratios = {}
    for a in (sp.Rational(1, 2), sp.Integer(1), sp.Integer(2)):
        a_ = sp.Symbol("a", positive=True)
        # W_3 F(x) / F_bar(x) for F_bar(r) = r^-a, any x >= 1
        tail = sp.integrate((1 - x / r) ** 2 * a_ * r ** (-a_ - 1), (r, x, sp.oo))
        ratios[float(a)] = float(sp.simplify(tail.subs(a_, a) / x ** -a))
    out["pareto_ratio_d3"] = ratios
    return out
