"""Radial laws and the Williamson d-transform.

An l1-norm symmetric vector is ``X = R S`` with ``S`` uniform on the unit
simplex and ``R > 0`` independent of it.  Its survival function is
``psi(x_1 + ... + x_d)`` where ``psi = W_d F`` is the Williamson transform
of the law ``F`` of ``R``::

    W_d F(x) = E[(1 - x/R)_+^(d-1)] = P[R S_1 > x],   S_1 ~ Beta(1, d-1).
"""

import csv
import math
import warnings

import numpy as np
from scipy import stats

from ._quad import geometric_points, integrate
from .errors import DomainError, NumericError
from .gen import Generator, _bisect_inverse, williamson_inverse_cdf
from .rng import substream

__all__ = [
    "RadialDistribution", "DiscreteRadial", "ParametricRadial",
    "EmpiricalRadial", "GeneratorRadial", "WilliamsonGenerator",
    "forward_transform", "inverse_transform", "mixture_survival_mc",
    "beta_moment", "radial_from_generator", "williamson_generator",
    "pareto", "inverse_pareto", "uniform", "exponential", "halfnormal",
    "point_mass", "discrete", "read_discrete_csv",
]

CLAMP_TOL = 1e-8


class RadialDistribution:
    """Law of a positive radial variable.

    Attributes
    ----------
    kind : {'discrete', 'parametric', 'empirical'}
    right_endpoint : float
        ``x* = sup{x : F(x) < 1}``.
    left_endpoint : float
        ``inf{x : F(x) > 0}``.
    """

    kind = "parametric"
    left_endpoint = 0.0
    right_endpoint = np.inf
    name = "radial"

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def logsf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.sf(x))

    def quantile(self, p):
        raise NotImplementedError

    def isf(self, q):
        return self.quantile(1.0 - np.asarray(q, dtype=float))

    def sample(self, n, rng):
        """Draw ``n`` values using the numpy generator ``rng``."""
        return self.quantile(rng.random(int(n)))

    def sampler(self, count, seed):
        return self.sample(count, substream(seed, "radial"))


class DiscreteRadial(RadialDistribution):
    """Finitely many atoms ``(location, probability)``."""

    kind = "discrete"

    def __init__(self, locations, probabilities):
        loc = np.asarray(locations, dtype=float).ravel()
        prob = np.asarray(probabilities, dtype=float).ravel()
        if loc.size == 0 or loc.shape != prob.shape:
            raise DomainError("locations and probabilities must be non-empty and aligned")
        if np.any(loc <= 0):
            raise DomainError("atom locations must be > 0")
        if np.any(np.diff(loc) <= 0):
            raise DomainError("atom locations must be strictly increasing")
        if np.any(prob < 0):
            raise DomainError("atom probabilities must be >= 0")
        if abs(prob.sum() - 1.0) > 1e-12:
            raise DomainError(f"atom probabilities sum to {prob.sum()!r}, not 1")
        self.locations = loc
        self.probabilities = prob
        self._cum = np.minimum(np.cumsum(prob), 1.0)
        self._cum[-1] = 1.0
        self.right_endpoint = float(loc[-1])
        self.left_endpoint = float(loc[0])
        self.name = "discrete"

    @property
    def atoms(self):
        return list(zip(self.locations.tolist(), self.probabilities.tolist()))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.locations, x, side="right")
        cum = np.concatenate(([0.0], self._cum))
        return cum[idx]

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.locations, x, side="right")
        tail = np.concatenate((np.cumsum(self.probabilities[::-1])[::-1], [0.0]))
        return tail[idx]

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        idx = np.searchsorted(self._cum, p, side="left")
        return self.locations[np.minimum(idx, self.locations.size - 1)]


class ParametricRadial(RadialDistribution):
    """Wrapper around a frozen ``scipy.stats`` continuous distribution."""

    kind = "parametric"

    def __init__(self, frozen, name, logsf=None, logsf_gap=None):
        self.dist = frozen
        self.name = name
        self._logsf = logsf
        # log F_bar(x* - g) as a function of the gap g, for finite endpoints
        self.logsf_gap = logsf_gap
        lo, hi = frozen.support()
        self.left_endpoint = float(max(lo, 0.0))
        self.right_endpoint = float(hi)

    def cdf(self, x):
        return self.dist.cdf(np.asarray(x, dtype=float))

    def sf(self, x):
        return self.dist.sf(np.asarray(x, dtype=float))

    def logsf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            if self._logsf is not None:
                return self._logsf(x)
            return self.dist.logsf(x)

    def pdf(self, x):
        return self.dist.pdf(np.asarray(x, dtype=float))

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return self.dist.logpdf(np.asarray(x, dtype=float))

    def quantile(self, p):
        return self.dist.ppf(np.asarray(p, dtype=float))

    def isf(self, q):
        return self.dist.isf(np.asarray(q, dtype=float))


class EmpiricalRadial(RadialDistribution):
    """Step CDF of observed radii; diagnostics only."""

    kind = "empirical"

    def __init__(self, samples):
        s = np.sort(np.asarray(samples, dtype=float).ravel())
        if s.size == 0 or np.any(s <= 0):
            raise DomainError("empirical radial needs positive samples")
        self.samples = s
        self.right_endpoint = float(s[-1])
        self.left_endpoint = float(s[0])
        self.name = "empirical"

    def cdf(self, x):
        return np.searchsorted(self.samples, np.asarray(x, dtype=float),
                               side="right") / self.samples.size

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        k = np.ceil(p * self.samples.size).astype(int) - 1
        return self.samples[np.clip(k, 0, self.samples.size - 1)]


def pareto(alpha, scale=1.0):
    """``F(x) = 1 - (x/scale)^(-alpha)`` for ``x >= scale``."""
    if not alpha > 0:
        raise DomainError("pareto requires alpha > 0")
    return ParametricRadial(stats.pareto(alpha, scale=scale), f"pareto({alpha})")


def inverse_pareto(a):
    """``F(x) = x^a`` on ``[0, 1]``, so that ``1/R`` is Pareto(a)."""
    if not a > 0:
        raise DomainError("inverse_pareto requires a > 0")
    return ParametricRadial(stats.powerlaw(a), f"inverse_pareto({a})")


def uniform(low=0.0, high=1.0):
    if not 0 <= low < high:
        raise DomainError("uniform requires 0 <= low < high")
    width = high - low
    gap = lambda g: np.log(np.clip(g / width, 0.0, 1.0))  # noqa: E731
    return ParametricRadial(stats.uniform(loc=low, scale=width),
                            f"uniform({low},{high})", logsf_gap=gap)


def exponential(scale=1.0):
    return ParametricRadial(stats.expon(scale=scale), f"exponential({scale})")


def halfnormal(scale=1.0):
    # scipy's halfnorm.logsf underflows past x ~ 38
    logsf = lambda x: np.where(x > 0, math.log(2.0) + stats.norm.logsf(x / scale), 0.0)  # noqa: E731
    return ParametricRadial(stats.halfnorm(scale=scale), f"halfnormal({scale})", logsf)


def point_mass(location=1.0):
    return DiscreteRadial([location], [1.0])


def discrete(locations, probabilities):
    return DiscreteRadial(locations, probabilities)


def read_discrete_csv(path):
    """Read a discrete radial law from CSV with header ``location,probability``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != [
                "location", "probability"]:
            raise DomainError("radial CSV must have header 'location,probability'")
        rows = [(float(r["location"]), float(r["probability"])) for r in reader]
    rows.sort()
    return DiscreteRadial([r[0] for r in rows], [r[1] for r in rows])


# ---------------------------------------------------------------------------
# Williamson transform

# rounding in logsf differences limits very light tails to ~1e-9 relative
_QUAD = {"epsabs": 1e-300, "epsrel": 1e-11, "accept_rel": 1e-8, "limit": 2000}


def _w_points(lo, extra=()):
    # geometric breakpoints toward 0 and toward 1 on the mixing variable
    lo = max(lo, 2.0 ** -70)
    pts = list(geometric_points(lo, 1.0))
    pts += [1 - 2.0 ** -k for k in range(1, 60) if 1 - 2.0 ** -k > lo]
    pts += [p for p in extra if lo < p < 1]
    return sorted(set(pts))


def _split_w_integral(f, lo, extra=()):
    """Integrate ``f(w, 1 - w)`` over ``[lo, 1]``.

    The upper half runs in ``s = 1 - w`` so that peaks of width far below
    the double spacing near ``w = 1`` stay resolved.
    """
    lo_pts = [p for p in _w_points(lo if lo > 0 else 2.0 ** -60, extra) if p < 0.5]
    hi_pts = [1.0 - p for p in extra if 0.5 < p < 1]
    hi_pts += list(geometric_points(2.0 ** -200, 0.5))
    total = 0.0
    if lo < 0.5:
        v1, _ = integrate(lambda w: f(w, 1.0 - w), lo, 0.5, points=lo_pts, **_QUAD)
        total += v1
    top = 0.5 if lo < 0.5 else 1.0 - lo
    v2, _ = integrate(lambda s: f(1.0 - s, s), 0.0, top,
                      points=[p for p in hi_pts if p < top], **_QUAD)
    return total + v2


class WilliamsonGenerator(Generator):
    """The generator ``W_d F`` of a radial law ``F``.

    Discrete laws give piecewise polynomials with closed-form derivatives.
    Continuous laws use quadrature over the Beta(1, d-1) mixing variable,
    carried out relative to ``F_bar(x)`` so the log-value survives
    underflow.
    """

    def __init__(self, F, d):
        d = int(d)
        if d < 2:
            raise DomainError("Williamson transform requires d >= 2")
        super().__init__({"d": d, "radial": getattr(F, "name", "radial")},
                         F.right_endpoint, d)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "family", "williamson")
        object.__setattr__(self, "analytic", isinstance(F, DiscreteRadial))

    # discrete closed forms
    def _disc(self, k, x):
        F, d = self.F, self.d
        r = F.locations[None, :]
        p = F.probabilities[None, :]
        xx = x.reshape(-1, 1)
        if k > d - 1:
            return np.zeros_like(x)
        coef = math.factorial(d - 1) / math.factorial(d - 1 - k)
        y = 1.0 - xx / r
        if k == d - 1:
            base = (xx < r).astype(float)
        else:
            base = np.where(y > 0, np.abs(y) ** (d - 1 - k), 0.0)
        vals = p * coef * (-1.0 / r) ** k * base
        return vals.sum(axis=1).reshape(x.shape)

    def _eval(self, x):
        if self.analytic:
            return self._disc(0, x)
        with np.errstate(under="ignore"):
            return np.exp(self._log_eval(x))

    def _log_eval(self, x):
        if self.analytic:
            with np.errstate(divide="ignore"):
                return np.log(self._disc(0, x))
        return np.vectorize(self._log_eval_scalar, otypes=[float])(x)

    def _log_eval_scalar(self, x):
        F, d = self.F, self.d
        if x <= 0:
            return 0.0
        ls0 = float(F.logsf(x))
        if not np.isfinite(ls0):
            return -np.inf
        lo = x / F.right_endpoint if np.isfinite(F.right_endpoint) else 0.0
        extra = []
        if F.left_endpoint > 0:
            extra.append(x / F.left_endpoint)

        gap_fn = getattr(F, "logsf_gap", None)
        if gap_fn is not None:
            # near x* the survival is evaluated on the gap x* - x/w directly
            h = F.right_endpoint - x

        def f(w, s):
            # w = 1 - s; both are passed so that x / w keeps full precision
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                if gap_fn is not None:
                    ls = gap_fn(h - x * s / w)
                else:
                    ls = F.logsf(x + x * s / w)
                val = (d - 1) * s ** (d - 2) * np.exp(ls - ls0)
            return np.where(w > lo, np.nan_to_num(val, nan=0.0, posinf=0.0), 0.0)

        val = _split_w_integral(f, lo, extra)
        if val <= 0:
            return -np.inf
        return ls0 + math.log(val)

    def _one_minus(self, x):
        if self.analytic:
            F, d = self.F, self.d
            r = F.locations[None, :]
            xx = x.reshape(-1, 1)
            y = np.minimum(xx / r, 1.0)
            with np.errstate(divide="ignore"):
                part = -np.expm1((d - 1) * np.log1p(-y))
            return (F.probabilities[None, :] * part).sum(axis=1).reshape(x.shape)
        return np.vectorize(self._one_minus_scalar, otypes=[float])(x)

    def _one_minus_scalar(self, s):
        F, d = self.F, self.d
        if s <= 0:
            return 0.0
        xs = F.right_endpoint
        hi_full = s / xs if np.isfinite(xs) else 0.0
        # F(s/w) = 1 for w <= s/x*
        full = -math.expm1((d - 1) * math.log1p(-min(hi_full, 1.0))) if hi_full < 1 else 1.0
        if hi_full >= 1.0:
            return 1.0

        def f(w):
            with np.errstate(divide="ignore", invalid="ignore"):
                return (d - 1) * (1.0 - w) ** (d - 2) * F.cdf(s / w)

        lo = hi_full
        extra = [s / F.left_endpoint] if F.left_endpoint > 0 else []
        val, _ = integrate(f, lo, 1.0,
                           points=_w_points(max(lo, min(s, 1.0) * 2.0 ** -8), extra),
                           **_QUAD)
        return full + val

    def _derivative(self, k, x):
        if self.analytic:
            return self._disc(k, x)
        return np.vectorize(lambda t: self._derivative_scalar(k, t), otypes=[float])(x)

    def _derivative_scalar(self, k, x):
        # E[(d-1)!/(d-1-k)! (-1/R)^k (1 - x/R)_+^(d-1-k)] over the survival scale
        F, d = self.F, self.d
        if k > d - 1:
            raise DomainError(f"W_d F has {d - 1} derivatives; asked for {k}")
        top = float(F.sf(x))
        if top <= 0:
            return 0.0
        coef = math.factorial(d - 1) / math.factorial(d - 1 - k)

        def f(q):
            r = F.isf(q)
            with np.errstate(invalid="ignore", divide="ignore"):
                val = coef * (-1.0 / r) ** k * np.maximum(1.0 - x / r, 0.0) ** (d - 1 - k)
            return np.nan_to_num(val)

        val, _ = integrate(f, 0.0, top, points=geometric_points(top * 2.0 ** -60, top),
                           **_QUAD)
        return val

    def _pseudo_inverse(self, u):
        return _bisect_inverse(self, u)


def williamson_generator(F, d):
    """Generator ``W_d F`` as a ``Generator`` object."""
    return WilliamsonGenerator(F, d)


def forward_transform(F, d, x):
    """Williamson d-transform ``W_d F(x) = E[(1 - x/R)_+^(d-1)]``.

    Parameters
    ----------
    F : RadialDistribution
    d : int
        Dimension, at least 2.
    x : array_like
        Non-negative arguments.

    Returns
    -------
    float or ndarray
        Exact finite sum for discrete laws, adaptive Gauss-Kronrod
        quadrature otherwise; ``W_d F(0) = 1``.

    Raises
    ------
    NumericError
        Quadrature did not reach its tolerance.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("forward_transform requires x >= 0")
    return WilliamsonGenerator(F, d).eval(x)


def inverse_transform(gen, d, x, return_clamp=False):
    """Radial CDF recovered from a d-monotone generator.

    ``F(x) = 1 - sum_{k<d} (-1)^k x^k psi^(k)(x) / k!``, clamped to
    ``[0, 1]``.

    Parameters
    ----------
    gen : Generator
    d : int
    x : array_like
    return_clamp : bool
        Also return the largest clamping correction applied.

    Raises
    ------
    PrecisionError
        Finite-difference derivatives of order above the supported limit.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("inverse_transform requires x >= 0")
    raw = np.asarray(williamson_inverse_cdf(gen, int(d), x), dtype=float)
    raw = np.where(x <= 0, 0.0, raw)
    raw = np.where(x >= gen.right_endpoint, 1.0, raw)
    out = np.clip(raw, 0.0, 1.0)
    mag = float(np.max(np.abs(out - raw))) if raw.size else 0.0
    if mag > CLAMP_TOL:
        warnings.warn(f"inverse_transform clamped by {mag:.3g}; generator may "
                      f"not be {d}-monotone", RuntimeWarning, stacklevel=2)
    out = out[()] if out.ndim == 0 else out
    return (out, mag) if return_clamp else out


def mixture_survival_mc(F, d, x, n, seed):
    """Monte Carlo estimate of ``P[R S_1 > x]``.

    ``S_1 = 1 - V^(1/(d-1))`` with ``V`` uniform, drawn on its own
    substream.

    Returns
    -------
    estimate, stderr : float
        Sample proportion and its binomial standard error.
    """
    d = int(d)
    n = int(n)
    if n < 100:
        raise DomainError("mixture_survival_mc requires n >= 100")
    if x <= 0:
        return 1.0, 0.0
    r = F.sample(n, substream(seed, "radial"))
    v = substream(seed, "beta").random(n)
    s1 = -np.expm1(np.log(v) / (d - 1))
    p = float(np.mean(r * s1 > x))
    return p, math.sqrt(p * (1.0 - p) / n)


def beta_moment(d, alpha):
    """``E[S_1^alpha] = prod_{k=1}^{d-1} (1 + alpha/k)^(-1)``."""
    d = int(d)
    if d < 2:
        raise DomainError("beta_moment requires d >= 2")
    if alpha < 0:
        raise DomainError("beta_moment requires alpha >= 0")
    return float(np.prod([1.0 / (1.0 + alpha / k) for k in range(1, d)]))


class GeneratorRadial(RadialDistribution):
    """Radial law of the copula generated by ``gen`` in dimension ``d``.

    The CDF is the inverse Williamson transform.  Quantiles start from a
    cached 1024-point monotone table and are refined by safeguarded Newton
    steps using the density ``(-1)^d x^(d-1) psi^(d)(x) / (d-1)!``.
    """

    kind = "parametric"

    def __init__(self, gen, d):
        self.gen = gen
        self.d = int(d)
        self.right_endpoint = gen.right_endpoint
        self.name = f"radial({gen.family})"
        xs = gen.right_endpoint
        t = np.arange(1, 1024) / 1024.0
        if math.isinf(xs):
            grid = t / (1.0 - t)
        else:
            grid = np.concatenate((xs * t, [xs]))
        cdf = self.cdf(grid)
        self._grid = grid
        self._grid_cdf = np.maximum.accumulate(cdf)

    def cdf(self, x):
        return inverse_transform(self.gen, self.d, x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        g, d = self.gen, self.d
        dens = (-1.0) ** d * x ** (d - 1) * g._derivative(d, x) / math.factorial(d - 1)
        return np.where((x > 0) & (x < g.right_endpoint), dens, 0.0)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        shape = p.shape
        p = p.ravel()
        out = np.empty_like(p)
        out[p <= 0] = 0.0
        out[p >= 1] = self.right_endpoint
        m = (p > 0) & (p < 1)
        pp = p[m]
        idx = np.searchsorted(self._grid_cdf, pp, side="left")
        grid = np.concatenate(([0.0], self._grid))
        hi = grid[np.minimum(idx + 1, grid.size - 1)]
        lo = grid[np.minimum(idx, grid.size - 1)]
        beyond = idx >= self._grid.size
        if np.any(beyond):
            # strict generators: expand past the table
            lo = np.where(beyond, self._grid[-1], lo)
            for _ in range(2000):
                need = beyond & (self.cdf(hi) < pp)
                if not np.any(need):
                    break
                lo = np.where(need, hi, lo)
                with np.errstate(over="ignore"):
                    hi = np.where(need, hi * 2.0, hi)
        res = np.empty_like(pp)
        todo = np.ones(pp.size, dtype=bool)
        xs = self.right_endpoint
        if math.isfinite(xs):
            # mass sitting at the endpoint is resolved without iterating
            at_end = hi >= xs
            if np.any(at_end):
                left = float(self.cdf(xs * (1.0 - 1e-13)))
                jump = at_end & (pp > left)
                res[jump] = xs
                todo &= ~jump
        res[todo] = self._refine(pp[todo], lo[todo], hi[todo])
        out[m] = res
        return out.reshape(shape)

    def _refine(self, p, lo, hi):
        # bracket invariant F(lo) < p <= F(hi); Newton inside the bracket,
        # bisection when the step leaves it
        use_newton = self.gen.analytic
        lo = lo.copy()
        hi = hi.copy()
        x = 0.5 * (lo + hi)
        act = np.arange(p.size)
        for _ in range(400):
            if act.size == 0:
                break
            xa, pa = x[act], p[act]
            Fx = self.cdf(xa)
            above = Fx >= pa
            ha = np.where(above, xa, hi[act])
            la = np.where(above, lo[act], xa)
            hi[act], lo[act] = ha, la
            width_ok = ha - la <= 1e-13 * ha
            cand = 0.5 * (la + ha)
            exact = Fx == pa
            if use_newton:
                with np.errstate(all="ignore"):
                    newton = xa - (Fx - pa) / self.pdf(xa)
                ok = np.isfinite(newton) & (newton >= la) & (newton <= ha)
                cand = np.where(ok, newton, cand)
                tiny = ok & (np.abs(newton - xa) <= 4e-16 * np.abs(xa))
            else:
                tiny = np.zeros(act.size, dtype=bool)
            x[act] = cand
            done = width_ok | exact | tiny
            # settled iterates that still sit below p fall back to hi
            act = act[~done]
        res = hi.copy()
        good = self.cdf(x) >= p
        res = np.where(good & (x < res), x, res)
        return res

    def sample(self, n, rng):
        return self.quantile(rng.random(int(n)))


def radial_from_generator(gen, d):
    """Radial law whose Williamson transform is ``gen``.

    Raises
    ------
    DomainError
        ``d`` exceeds ``gen.d_max``.
    """
    d = int(d)
    if d < 2:
        raise DomainError("dimension must be >= 2")
    if d > gen.d_max:
        raise DomainError(f"{gen!r} is only claimed {gen.d_max}-monotone; d={d}")
    return GeneratorRadial(gen, d)
