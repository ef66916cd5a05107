"""Extreme-value limits: rescaled copula iterates, Gumbel and Galambos limits."""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .copula import empirical_copula, empirical_copula_eval
from .errors import DomainError
from .regvar import rv_index
from .rng import substream
from .sampler import SampleMatrix, sample_l1ns

__all__ = ["EVReport", "ev_rescaled_copula", "gumbel_copula", "gumbel_limit_theta",
           "galambos_eval", "ExponentMeasureSpec", "exponent_measure",
           "ExponentMeasureResult", "normalizing_constants", "block_extrema",
           "MaximaReport", "maxima_ev_check"]

EV_NS = (1, 10, 100, 1000, 10000)
# 1 - psi is cancellation-free, so the origin grid runs past 2^-60
J_ORIGIN = 200
INF_PROXY = 1e12


def _grid(k=9):
    g = np.linspace(0.1, 0.9, k)
    return np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)


def ev_rescaled_copula(gen, n, u):
    """``C(u^(1/n))^n`` evaluated in log space.

    ``phi(u^(1/n))`` is ``gen.inverse_log(log(u)/n)``, which keeps full
    precision when ``u^(1/n)`` is within rounding of 1.

    Parameters
    ----------
    gen : Generator
    n : int
    u : array_like
        Point(s) with the dimension on the last axis.
    """
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    u = np.asarray(u, dtype=float)
    if u.ndim == 0:
        raise DomainError("ev_rescaled_copula expects a vector")
    if np.any((u < 0) | (u > 1)):
        raise DomainError("u must lie in [0, 1]")
    with np.errstate(divide="ignore"):
        logu = np.log(u)
    x = np.where(u >= 1.0, 0.0, gen.inverse_log(logu / n))
    s = np.sum(x, axis=-1)
    xs = gen.right_endpoint
    with np.errstate(invalid="ignore", over="ignore", under="ignore"):
        zero = ~(s < xs)
        val = np.where(zero, 0.0, np.exp(n * gen.log_eval(np.where(zero, 0.0, s))))
    return val[()] if np.ndim(val) == 0 else val


def gumbel_copula(u, theta):
    """``exp(-(sum (-log u_i)^theta)^(1/theta))``."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        t = (-np.log(u)) ** theta
    val = np.exp(-np.sum(t, axis=-1) ** (1.0 / theta))
    return val[()] if np.ndim(val) == 0 else val


@dataclass
class EVReport:
    """Gumbel limit of ``C^n(u^(1/n))``.

    ``theta`` is ``None`` when the origin index of ``1 - psi(1/x)`` did not
    converge.  ``sup_deviation_by_n`` pairs ``n`` with the sup-distance to
    the Gumbel copula on ``grid``; ``monotone`` records whether it is
    non-increasing in ``n``.
    """

    theta: object
    converged: bool
    origin_index: object
    sup_deviation_by_n: list = field(default_factory=list)
    monotone: object = None
    grid: str = "9x9 on [0.1, 0.9]^2"
    trace: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def gumbel_limit_theta(gen, ns=EV_NS):
    """Parameter of the Gumbel copula attracting ``C^n(u^(1/n))``.

    ``theta = 1/alpha`` where ``1 - psi(1/x)`` is regularly varying with
    index ``-alpha`` at infinity; ``alpha = 0`` gives ``theta = inf``
    (comonotone limit).
    """
    est = rv_index(gen.one_minus, "origin", j_max=J_ORIGIN)
    trace = est.trace
    if not est.converged:
        return EVReport(theta=None, converged=False, origin_index=None, trace=trace,
                        notes=[f"origin index did not converge (oscillation "
                               f"{est.oscillation:.3g})"])
    alpha = est.index
    theta = math.inf if alpha <= 0 else 1.0 / alpha
    rep = EVReport(theta=theta, converged=True, origin_index=alpha, trace=trace)
    if not math.isfinite(theta):
        rep.notes.append("comonotone limit; deviations not computed")
        return rep
    g = _grid()
    limit = gumbel_copula(g, max(theta, 1.0))
    devs = []
    for n in ns:
        devs.append((int(n), float(np.max(np.abs(ev_rescaled_copula(gen, n, g) - limit)))))
    rep.sup_deviation_by_n = devs
    vals = [v for _, v in devs]
    rep.monotone = bool(all(b <= a + 1e-15 for a, b in zip(vals, vals[1:])))
    if gen.strict:
        inf_est = rv_index(gen.log_eval, "infinity", log=True)
        if not inf_est.converged:
            rep.notes.append("generator index at infinity does not converge "
                             "(lower-tail limits are undefined)")
    return rep


def galambos_eval(u1, u2, alpha):
    """Galambos copula ``u1 u2 exp(((-log u1)^(-1/alpha) + (-log u2)^(-1/alpha))^(-alpha))``.

    Any argument 0 gives 0; an argument 1 returns the other one.
    """
    if not alpha > 0:
        raise DomainError("galambos_eval requires alpha > 0")
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if np.any((u1 < 0) | (u1 > 1) | (u2 < 0) | (u2 > 1)):
        raise DomainError("arguments must lie in [0, 1]")
    inner = (u1 > 0) & (u1 < 1) & (u2 > 0) & (u2 < 1)
    a = np.where(inner, u1, 0.5)
    b = np.where(inner, u2, 0.5)
    s = (-np.log(a)) ** (-1.0 / alpha) + (-np.log(b)) ** (-1.0 / alpha)
    val = a * b * np.exp(s ** -alpha)
    val = np.where(inner, val, np.where((u1 == 0) | (u2 == 0), 0.0, np.minimum(u1, u2)))
    return val[()] if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class ExponentMeasureSpec:
    """Exponent measure with tail index ``alpha`` and uniform spectral law."""

    alpha: float
    d: int = 2

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("exponent measure requires alpha > 0")
        if int(self.d) < 2:
            raise DomainError("exponent measure requires d >= 2")


@dataclass
class ExponentMeasureResult:
    value: float
    stderr: float
    method: str


def exponent_measure(spec, x, n_mc=10 ** 6, seed=0):
    """``mu([0, x]^c) = E_sigma[max_i (W_i / x_i)^alpha]``, ``W`` uniform on the simplex.

    The bivariate case is closed form,
    ``(x1^-a + x2^-a - (x1 + x2)^-a) / (1 + a)``, with ``inf`` allowed as
    a coordinate.  Higher dimensions use ``n_mc`` simplex points stratified
    by the index of the largest weight.

    Returns
    -------
    ExponentMeasureResult
    """
    x = np.asarray(x, dtype=float)
    a = float(spec.alpha)
    d = int(spec.d)
    if x.shape != (d,):
        raise DomainError(f"x must have length {d}")
    if np.any(x <= 0):
        raise DomainError("exponent_measure requires x > 0")
    if d == 2:
        with np.errstate(divide="ignore"):
            p = x ** -a
        val = (p[0] + p[1] - np.sum(x) ** -a) / (1.0 + a)
        return ExponentMeasureResult(float(val), 0.0, "closed-form")
    xc = np.minimum(x, INF_PROXY)
    per = max(int(n_mc) // d, 2)
    means, vars_ = [], []
    for k in range(d):
        e = substream(seed, "exponent-measure", k).standard_exponential((per, d))
        w = e / e.sum(axis=1, keepdims=True)
        # move the largest weight to coordinate k: each stratum has mass 1/d
        top = np.argmax(w, axis=1)
        rows = np.arange(per)
        wk = w[rows, k].copy()
        w[rows, k] = w[rows, top]
        w[rows, top] = wk
        vals = np.max((w / xc) ** a, axis=1)
        means.append(vals.mean())
        vars_.append(vals.var(ddof=1) / per)
    val = float(np.mean(means))
    se = float(math.sqrt(np.sum(vars_)) / d)
    return ExponentMeasureResult(val, se, "stratified-mc")


def normalizing_constants(F, n):
    """Weibull-domain normalization ``c_n = x* - (1 / F_bar)^<-(n)``.

    ``(1/F_bar)^<-(n)`` is the ``1 - 1/n`` quantile.  A zero constant
    (degenerate radial law) is returned with a warning.
    """
    xs = F.right_endpoint
    if not math.isfinite(xs):
        raise DomainError("normalizing_constants needs a finite right endpoint")
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    c = float(xs - F.quantile(1.0 - 1.0 / n))
    if c <= 0:
        warnings.warn("degenerate radial law: normalizing constant is 0", RuntimeWarning,
                      stacklevel=2)
    return c


def block_extrema(M, block, kind="max"):
    """Componentwise maxima or minima over consecutive blocks of rows."""
    data = M.data if isinstance(M, SampleMatrix) else np.asarray(M, dtype=float)
    block = int(block)
    if block < 1:
        raise DomainError("block must be >= 1")
    nb = data.shape[0] // block
    if nb < 1:
        raise DomainError("fewer rows than one block")
    cube = data[: nb * block].reshape(nb, block, data.shape[1])
    out = cube.max(axis=1) if kind == "max" else cube.min(axis=1)
    if isinstance(M, SampleMatrix):
        prov = dict(M.provenance, block=block, extrema=kind)
        return SampleMatrix(out, M.space, M.seed, prov)
    return out


@dataclass
class MaximaReport:
    """Empirical copula of block maxima against the Galambos limit.

    ``rows`` holds ``(u1, u2, empirical, galambos, stderr)``.
    """

    alpha: object
    block: int
    n_blocks: int
    rows: list = field(default_factory=list)
    max_deviation: object = None
    degenerate: bool = False
    notes: list = field(default_factory=list)


def maxima_ev_check(F, d=2, block=200, n_blocks=5000, seed=0,
                    grid=((0.5, 0.5), (0.3, 0.7), (0.2, 0.2), (0.8, 0.8)), alpha=None):
    """Block maxima of l1-norm symmetric data versus the Galambos copula.

    Parameters
    ----------
    F : RadialDistribution
        Regularly varying radial law; ``alpha`` is estimated from its tail
        unless supplied.  A rapidly varying tail (Gumbel domain) has no
        affine limit here and is reported as degenerate.
    """
    if int(d) != 2:
        raise DomainError("maxima_ev_check is bivariate")
    if alpha is None:
        est = rv_index(F.logsf, "infinity", log=True)
        if est.rapid:
            return MaximaReport(alpha=math.inf, block=block, n_blocks=n_blocks,
                                degenerate=True,
                                notes=["rapidly varying radial tail: no EV limit under "
                                       "affine normalization"])
        if not est.converged:
            raise DomainError("radial tail index did not converge")
        alpha = est.index
    X = sample_l1ns(F, 2, int(block) * int(n_blocks), seed)
    mx = block_extrema(X, block, "max")
    E = empirical_copula(mx.data)
    pts = np.asarray(grid, dtype=float)
    emp = np.atleast_1d(empirical_copula_eval(E, pts))
    ref = np.atleast_1d(galambos_eval(pts[:, 0], pts[:, 1], alpha))
    se = np.sqrt(ref * (1.0 - ref) / mx.n)
    rows = [(float(p[0]), float(p[1]), float(e), float(r), float(s))
            for p, e, r, s in zip(pts, emp, ref, se)]
    return MaximaReport(alpha=float(alpha), block=int(block), n_blocks=int(n_blocks),
                        rows=rows, max_deviation=float(np.max(np.abs(emp - ref))))
