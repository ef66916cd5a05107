"""Vectorized adaptive Gauss-Kronrod quadrature.

``scipy.integrate.quad`` evaluates the integrand one point at a time, which
dominates runtime when the integrand is a numpy expression.  This routine
evaluates all active subintervals in a single call.
"""

import numpy as np

from .errors import NumericError

# 15-point Kronrod rule and its embedded 7-point Gauss rule on [-1, 1].
_XK = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])


def _rule(f, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * _XK[None, :]
    fv = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    k = half * (fv @ _WK)
    g = half * (fv[:, 1::2] @ _WG)
    return k, np.abs(k - g)


def integrate(f, a, b, points=(), epsabs=1e-10, epsrel=1e-10, limit=5000,
              accept_rel=0.0):
    """Integrate a vectorized callable over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Maps a 1-d array of nodes to integrand values.
    a, b : float
        Limits; ``b`` may be ``inf``.
    points : sequence of float
        Breakpoints inside ``(a, b)`` where the integrand is non-smooth or
        changes scale.
    epsabs, epsrel : float
        Stop once the summed error estimate is below
        ``max(epsabs, epsrel * |value|)``.
    limit : int
        Maximum number of subintervals.
    accept_rel : float
        When refinement stalls (interval limit or underflow), return anyway
        if the error is within ``accept_rel * |value|``; this covers
        integrands whose rounding noise sits above ``epsrel``.

    Returns
    -------
    value, abserr : float
    """
    a = float(a)
    b = float(b)
    if b == a:
        return 0.0, 0.0
    if np.isinf(b):
        g = f

        def f(s):  # noqa: F811
            s = np.asarray(s)
            return g(a + s / (1.0 - s)) / (1.0 - s) ** 2

        pts = np.asarray([p for p in points if a < p < np.inf], dtype=float)
        points = (pts - a) / (1.0 + pts - a)
        a, b = 0.0, 1.0
    edges = np.unique(np.concatenate(([a, b], [p for p in points if a < p < b])))
    lo, hi = edges[:-1], edges[1:]
    val, err = _rule(f, lo, hi)
    while True:
        total = float(np.sum(val))
        total_err = float(np.sum(err))
        tol = max(epsabs, epsrel * abs(total))
        if not np.isfinite(total):
            raise NumericError("integrand is not finite", total_err)
        if total_err <= tol:
            return total, total_err
        if lo.size >= limit:
            if total_err <= accept_rel * abs(total):
                return total, total_err
            raise NumericError(
                f"quadrature did not converge: error {total_err:.3g} > {tol:.3g}",
                total_err)
        # split every interval carrying more than its share of the budget
        split = err > tol / lo.size
        if not np.any(split):
            split = err >= err.max()
        mid = 0.5 * (lo[split] + hi[split])
        if np.any((mid <= lo[split]) | (mid >= hi[split])):
            if total_err <= accept_rel * abs(total):
                return total, total_err
            raise NumericError("quadrature interval underflow", total_err)
        new_lo = np.concatenate((lo[split], mid))
        new_hi = np.concatenate((mid, hi[split]))
        nv, ne = _rule(f, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate((lo[keep], new_lo))
        hi = np.concatenate((hi[keep], new_hi))
        val = np.concatenate((val[keep], nv))
        err = np.concatenate((err[keep], ne))


def geometric_points(lo, hi, ratio=2.0):
    """Breakpoints ``lo * ratio**k`` strictly inside ``(lo, hi)``."""
    if not (0 < lo < hi):
        return np.empty(0)
    n = int(np.floor(np.log(hi / lo) / np.log(ratio)))
    pts = lo * ratio ** np.arange(n + 1)
    return pts[(pts > lo) & (pts < hi)]
