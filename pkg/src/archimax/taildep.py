"""Coefficients of tail dependence of the first and second kind."""

from dataclasses import dataclass, field
import math

import numpy as np

from ._limits import assess
from ._quad import geometric_points, integrate
from .errors import DomainError
from .regvar import rv_index
from .sampler import SampleMatrix

__all__ = ["TailDepReport", "lambda_lower", "lambda_upper", "lambda_lower_mn",
           "lambda_bar_lower", "lambda_bar_upper", "TailCurve", "empirical_taildep"]

J_LOWER = 60
# 1 - psi is evaluated without cancellation, so the origin grid can run far
# past 2^-60; generators with 1 - psi(t) ~ t^(1/4) need it
J_UPPER = 200
# the direct joint exceedance 2s - G(2 phi(1 - s)) cancels to ~1e-16 / s;
# the second-derivative form does not
J_BAR_UPPER = 26
J_BAR_UPPER_SMOOTH = 60


@dataclass
class TailDepReport:
    """A tail-dependence limit with its trace.

    ``value`` is ``None`` unless the trace converged (see ``regvar``);
    ``reference_value`` is a closed-form comparison with its provenance in
    ``reference_source``.
    """

    value: object
    converged: bool
    method: str
    limit_trace: list = field(default_factory=list)
    reference_value: object = None
    reference_source: str = ""
    oscillation: float = float("nan")
    last_variation: float = float("nan")
    notes: list = field(default_factory=list)


def _limit(ts, vals, method, transform=None):
    res = assess(vals)
    value = res["limit"]
    if value is not None and transform is not None:
        value = transform(value)
    return TailDepReport(value=value, converged=res["converged"], method=method,
                         limit_trace=[(float(t), float(v)) for t, v in zip(ts, vals)],
                         oscillation=res["oscillation"],
                         last_variation=res["last_variation"])


def _exact(value, note):
    return TailDepReport(value=float(value), converged=True, method="closed-form",
                         notes=[note])


def _index(alpha, estimate):
    if alpha is not None:
        return float(alpha), "supplied index"
    est = estimate()
    if est.converged:
        return est.index, "estimated index"
    return None, ""


def lambda_lower(gen, alpha=None):
    """Lower tail-dependence coefficient ``lim psi(2t)/psi(t)``, ``t -> inf``.

    Parameters
    ----------
    gen : Generator
    alpha : float, optional
        Index of ``psi`` at infinity; estimated when omitted.  The report
        carries ``2^-alpha`` as reference.
    """
    if not gen.strict:
        return _exact(0.0, "non-strict generator: zero set contains a corner square")
    return lambda_lower_mn(gen, 1, 1, alpha=alpha)


def lambda_lower_mn(gen, m, n, alpha=None):
    """Multivariate lower coefficient ``lim psi((m+n)t)/psi(nt)``.

    The reference value is ``(m/n + 1)^-alpha``.
    """
    m, n = int(m), int(n)
    if m < 1 or n < 1:
        raise DomainError("lambda_lower_mn requires m, n >= 1")
    if not gen.strict:
        return _exact(0.0, "non-strict generator: zero set contains a corner square")
    t = 2.0 ** np.arange(J_LOWER + 1)
    with np.errstate(invalid="ignore"):
        vals = np.exp(gen.log_eval((m + n) * t) - gen.log_eval(n * t))
    rep = _limit(t, vals, "analytic-limit")
    a, src = _index(alpha, lambda: rv_index(gen.log_eval, "infinity", log=True))
    if a is not None:
        rep.reference_value = (m / n + 1.0) ** -a
        rep.reference_source = f"(m/n + 1)^-alpha with alpha from {src}"
    return rep


def lambda_upper(gen, alpha=None):
    """Upper coefficient ``2 - lim (1 - psi(2t))/(1 - psi(t))``, ``t -> 0``.

    The reference is ``2 - 2^min(alpha, 1)`` with ``alpha`` the origin index
    of ``1 - psi(1/x)``.
    """
    t = 2.0 ** -np.arange(J_UPPER + 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = gen.one_minus(2.0 * t) / gen.one_minus(t)
    rep = _limit(t, 2.0 - vals, "analytic-limit")
    a, src = _index(alpha, lambda: rv_index(gen.one_minus, "origin", j_max=J_UPPER))
    if a is not None:
        rep.reference_value = 2.0 - 2.0 ** min(a, 1.0)
        rep.reference_source = f"2 - 2^min(alpha, 1) with alpha from {src}"
    return rep


def lambda_bar_lower(gen):
    """Lower coefficient of the second kind.

    The limit of ``2 log psi(t) / log psi(2t) - 1`` converges like
    ``1/log t``; the report takes the equivalent log-derivative limit
    ``psi'/psi (t) / psi'/psi (2t) - 1``, which converges at the rate of
    the derivative ratio.  The direct form is kept in ``notes``.

    References: 1 when ``psi`` is regularly varying at infinity; ``2^beta - 1``
    for the Gumbel domain with auxiliary ``a in RV_beta``.
    """
    if not gen.strict:
        return _exact(-1.0, "non-strict generator: C(q, q) = 0 near the origin")
    t = 2.0 ** np.arange(J_LOWER + 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = gen.log_derivative(t) / gen.log_derivative(2.0 * t) - 1.0
        direct = 2.0 * gen.log_eval(t) / gen.log_eval(2.0 * t) - 1.0
    rep = _limit(t, vals, "analytic-limit")
    rep.notes.append(f"direct log-ratio at t=2^{J_LOWER}: {float(direct[-1])!r}")
    est = rv_index(gen.log_eval, "infinity", log=True)
    if est.converged and math.isfinite(est.index) and est.index > 0:
        rep.reference_value = 1.0
        rep.reference_source = "regularly varying generator"
    elif est.converged and est.rapid:
        beta = rv_index(lambda x: -gen.log_derivative(x), "infinity")
        if beta.converged and math.isfinite(beta.index):
            # -psi'/psi in RV_{-beta} means a = -psi/psi' in RV_beta
            rep.reference_value = 2.0 ** beta.index - 1.0
            rep.reference_source = "2^beta - 1, auxiliary function in RV_beta"
    return rep


def _joint_exceedance(gen, s):
    """``P(U1 > 1 - s, U2 > 1 - s) = 2s - (1 - psi(2 phi(1 - s)))``."""
    x = gen.inverse_one_minus(s)
    return 2.0 * s - gen.one_minus(2.0 * x)


def _joint_exceedance_smooth(gen, s):
    # 2G(x) - G(2x) = int_0^{2x} psi''(r) min(r, 2x - r) dr with G = 1 - psi
    out = []
    for x in np.atleast_1d(gen.inverse_one_minus(s)):
        x = float(x)
        f = lambda r: gen.derivative(2, r) * np.minimum(r, 2.0 * x - r)  # noqa: E731
        pts = list(geometric_points(x * 2.0 ** -60, x)) + [2.0 * x - p for p in
                                                           geometric_points(x * 2.0 ** -8, x / 2)]
        v, _ = integrate(f, 0.0, 2.0 * x, points=pts, epsabs=1e-300, epsrel=1e-12)
        out.append(v)
    return np.asarray(out)


def lambda_bar_upper(gen):
    """Upper coefficient of the second kind.

    The limit of ``2 log(1-q) / log(1 - 2q + C(q,q)) - 1`` equals
    ``2/kappa - 1`` where ``kappa`` is the index of the joint exceedance
    probability at ``s = 1 - q -> 0``, read on ``s = 2^-j``.  Generators
    with an analytic second derivative get the exceedance from a
    cancellation-free integral (``j <= 60``); others use the direct
    difference, which is only trusted up to ``j = 26``.  No closed-form
    reference exists in general.
    """
    smooth = gen.analytic
    j_top = J_BAR_UPPER_SMOOTH if smooth else J_BAR_UPPER
    s = 2.0 ** -np.arange(1, j_top + 1)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        pbar = _joint_exceedance_smooth(gen, s) if smooth else _joint_exceedance(gen, s)
        if np.all(pbar[-5:] <= 0):
            return _exact(-1.0, "joint upper exceedance vanishes near the corner")
        local = np.log2(pbar[:-1] / pbar[1:])
        vals = 2.0 / local - 1.0
    rep = _limit(s[1:], vals, "analytic-limit")
    rep.notes.append("no reference value")
    return rep


@dataclass
class TailCurve:
    """Empirical conditional exceedance probabilities.

    ``points`` holds ``(q, probability, stderr, marginal_count)``; ``None``
    probabilities mark thresholds with an empty conditioning set.
    """

    side: str
    points: list
    n: int


def empirical_taildep(M, side, q_list):
    """Empirical ``P(U1 <= q | U2 <= q)`` (lower) or ``P(U1 > 1-q | U2 > 1-q)``.

    Parameters
    ----------
    M : SampleMatrix or array_like
        Copula-scale data; the first two columns are used.
    side : {'lower', 'upper'}
    q_list : sequence of float
    """
    data = M.data if isinstance(M, SampleMatrix) else np.asarray(M, dtype=float)
    if isinstance(M, SampleMatrix) and M.space != "copula":
        raise DomainError("empirical_taildep needs copula-scale data")
    if data.ndim != 2 or data.shape[1] < 2:
        raise DomainError("need at least two columns")
    if side not in ("lower", "upper"):
        raise DomainError("side must be 'lower' or 'upper'")
    u1, u2 = data[:, 0], data[:, 1]
    points = []
    for q in q_list:
        q = float(q)
        if side == "lower":
            cond = u2 <= q
            joint = cond & (u1 <= q)
        else:
            cond = u2 > 1.0 - q
            joint = cond & (u1 > 1.0 - q)
        k = int(cond.sum())
        if k == 0:
            points.append((q, None, None, 0))
            continue
        p = joint.sum() / k
        points.append((q, float(p), float(math.sqrt(p * (1.0 - p) / k)), k))
    return TailCurve(side=side, points=points, n=int(data.shape[0]))
