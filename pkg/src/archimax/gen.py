"""Archimedean generators, built-in families and validity checks.

A generator ``psi`` maps ``[0, inf)`` onto ``[0, 1]`` with ``psi(0) = 1``,
is non-increasing, and strictly decreasing where positive.  Its
pseudo-inverse ``phi`` satisfies ``psi(phi(u)) = u``.  The copula generated
in dimension ``d`` is ``C(u) = psi(phi(u_1) + ... + phi(u_d))``, valid iff
``psi`` is d-monotone.

Besides ``eval`` the classes expose a few algebraically equivalent
primitives (``log_eval``, ``one_minus``, ``log_increment`` ...) that the
built-in families implement without cancellation.  Limits at the origin, at
infinity and at thresholds are computed from those.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._numdiff import MAX_FD_ORDER, fd_derivative
from .errors import DomainError, PrecisionError

__all__ = [
    "Generator", "Clayton", "Gumbel", "Independence", "Countermonotone",
    "Log19", "Oscillating", "PowerGenerator", "RescaledGenerator",
    "GeneratorReport", "OscillatorParams", "make_family", "pseudo_inverse",
    "derivative", "check_d_monotone", "compute_oscillator_params", "power",
    "rescale", "williamson_inverse_cdf",
]

FAMILIES = ("clayton", "gumbel", "independence", "countermonotone", "log19",
            "oscillating")


def _arr(x):
    return np.asarray(x, dtype=float)


def _out(a):
    a = np.asarray(a, dtype=float)
    return a[()] if a.ndim == 0 else a


class Generator:
    """Base class for Archimedean generators.

    Subclasses override at least one of ``_eval`` / ``_log_eval``; every
    other primitive has a generic fallback.  Instances are immutable.

    Attributes
    ----------
    family : str
        Provenance tag.
    params : dict
        Family parameters.
    right_endpoint : float
        ``x* = phi(0)``; ``inf`` for strict generators.
    d_max : float
        Largest dimension for which d-monotonicity is claimed.
    analytic : bool
        Whether ``derivative`` is closed form.
    """

    family = "generic"
    analytic = False
    # inverse_log keeps full relative precision as y -> 0
    _exact_inverse_log = False

    def __init__(self, params=None, right_endpoint=np.inf, d_max=np.inf):
        object.__setattr__(self, "params", dict(params or {}))
        object.__setattr__(self, "right_endpoint", float(right_endpoint))
        object.__setattr__(self, "d_max", d_max)

    def __setattr__(self, name, value):
        raise AttributeError("generators are immutable")

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in sorted(self.params.items()))
        return f"{type(self).__name__}({args})"

    @property
    def strict(self):
        return math.isinf(self.right_endpoint)

    # -- primitives on arrays -------------------------------------------
    def _eval(self, x):
        with np.errstate(under="ignore"):
            return np.exp(self._log_eval(x))

    def _log_eval(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self._eval(x))

    def _one_minus(self, x):
        return 1.0 - self._eval(x)

    def _derivative(self, k, x):
        val, err = fd_derivative(self._eval, k, x)
        bad = err > 1e-4 * np.maximum(np.abs(val), self._eval(x))
        if np.any(bad & np.isfinite(err)):
            raise PrecisionError(
                f"finite-difference derivative of order {k} unreliable",
                achieved=float(np.nanmax(err)))
        return val

    def _derivative_ratio(self, k, x):
        with np.errstate(invalid="ignore", divide="ignore"):
            return self._derivative(k, x) / self._eval(x)

    def _log_derivative(self, x):
        if self.analytic:
            with np.errstate(invalid="ignore", divide="ignore"):
                r = self._derivative_ratio(1, x)
            if np.all(np.isfinite(r)):
                return r
        val, _ = fd_derivative(self._log_eval, 1, x)
        return val

    def _pseudo_inverse(self, u):
        return _bisect_inverse(self, u)

    def _inverse_log(self, y):
        return self._pseudo_inverse(np.exp(y))

    def _inverse_one_minus(self, s):
        with np.errstate(divide="ignore"):
            out = np.array(self._inverse_log(np.log1p(-s)), dtype=float)
        if self._exact_inverse_log:
            return out
        # 1 - s rounds to 1 for tiny s; solve 1 - psi(x) = s directly
        small = (s > 0) & (s < 1e-4)
        if np.any(small):
            out[small] = _bisect_one_minus(self, s[small])
        return out

    def _endpoint_gap(self, u):
        return self.right_endpoint - self._pseudo_inverse(u)

    def _log_increment(self, v, x):
        with np.errstate(invalid="ignore"):
            return self._log_eval(v + x) - self._log_eval(v)

    def _inverse_increment(self, v, y):
        x = self._inverse_log(y + self._log_eval(v)) - v
        return np.maximum(x, 0.0)

    # -- public vectorized interface --------------------------------------
    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """``psi(x)``."""
        return _out(self._eval(_arr(x)))

    def log_eval(self, x):
        """``log psi(x)``; ``-inf`` on the zero set."""
        return _out(self._log_eval(_arr(x)))

    def one_minus(self, x):
        """``1 - psi(x)``, accurate for small ``x``."""
        return _out(self._one_minus(_arr(x)))

    def derivative(self, k, x):
        """``k``-th derivative; zero beyond the right endpoint."""
        k = int(k)
        if k < 0:
            raise DomainError("derivative order must be >= 0")
        if k == 0:
            return self.eval(x)
        return _out(self._derivative(k, _arr(x)))

    def derivative_ratio(self, k, x):
        """``psi^(k)(x) / psi(x)`` without forming ``psi``."""
        if int(k) == 0:
            return _out(np.ones_like(_arr(x)))
        return _out(self._derivative_ratio(int(k), _arr(x)))

    def log_derivative(self, x):
        """``psi'(x) / psi(x)``."""
        return _out(self._log_derivative(_arr(x)))

    def pseudo_inverse(self, u):
        """``phi(u)``; ``phi(0)`` is the right endpoint."""
        u = np.clip(_arr(u), 0.0, 1.0)
        return _out(self._pseudo_inverse(u))

    def inverse_log(self, y):
        """``phi(exp(y))`` for ``y <= 0``."""
        return _out(self._inverse_log(np.minimum(_arr(y), 0.0)))

    def inverse_one_minus(self, s):
        """``phi(1 - s)``, accurate for small ``s``."""
        return _out(self._inverse_one_minus(np.clip(_arr(s), 0.0, 1.0)))

    def endpoint_gap(self, u):
        """``x* - phi(u)`` for non-strict generators."""
        return _out(self._endpoint_gap(np.clip(_arr(u), 0.0, 1.0)))

    def log_increment(self, v, x):
        """``log psi(v + x) - log psi(v)``."""
        return _out(self._log_increment(_arr(v), _arr(x)))

    def inverse_increment(self, v, y):
        """The ``x >= 0`` solving ``log psi(v + x) - log psi(v) = y``."""
        return _out(self._inverse_increment(_arr(v), np.minimum(_arr(y), 0.0)))


def _bisect_one_minus(gen, s):
    # bisection on log2(x) for 1 - psi(x) = s with s small
    hi = np.full_like(s, math.log2(max(float(gen._pseudo_inverse(np.array(1.0 - 1e-4))), 1e-300)) + 1.0)
    lo = np.full_like(s, -1074.0)
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        below = gen._one_minus(np.exp2(mid)) < s
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.exp2(hi)


def _bisect_inverse(gen, u):
    # first x with psi(x) <= u, bracketing by doubling
    u = np.asarray(u, dtype=float)
    shape = u.shape
    u = u.ravel()
    out = np.empty_like(u)
    out[u >= 1.0] = 0.0
    out[u <= 0.0] = gen.right_endpoint
    m = (u > 0.0) & (u < 1.0)
    if not np.any(m):
        return out.reshape(shape)
    uu = u[m]
    xs = gen.right_endpoint
    hi = np.full(uu.shape, 1.0 if math.isinf(xs) else xs)
    if math.isinf(xs):
        for _ in range(1100):
            need = gen._eval(hi) > uu
            if not np.any(need):
                break
            hi = np.where(need & (hi < 1e300), hi * 2.0, hi)
            if np.all(hi[need] >= 1e300):
                break
    lo = np.zeros_like(hi)
    for _ in range(2200):
        mid = 0.5 * (lo + hi)
        go = gen._eval(mid) > uu
        lo = np.where(go, mid, lo)
        hi = np.where(go, hi, mid)
        if np.all((hi - lo) <= 2.0 * np.finfo(float).eps * hi):
            break
    x = hi
    if gen.analytic:
        with np.errstate(all="ignore"):
            for _ in range(2):
                d1 = gen._derivative(1, x)
                step = (gen._eval(x) - uu) / d1
                cand = x - step
                ok = (np.isfinite(cand) & (cand >= lo) & (cand <= hi)
                      & (np.abs(gen._eval(cand) - uu) < np.abs(gen._eval(x) - uu)))
                x = np.where(ok, cand, x)
    out[m] = x
    return out.reshape(shape)


# ---------------------------------------------------------------------------
# built-in families

class Clayton(Generator):
    """Clayton generator ``(1 + theta x)_+^(-1/theta)``.

    ``theta = 0`` is the independence limit ``exp(-x)``; ``theta < 0`` is
    non-strict with endpoint ``-1/theta`` and is d-monotone for
    ``d <= 1 - 1/theta``.
    """

    family = "clayton"
    _exact_inverse_log = True
    analytic = True

    def __init__(self, theta):
        theta = float(theta)
        if not theta >= -1.0:
            raise DomainError("clayton requires theta >= -1")
        if theta < 0:
            xs = -1.0 / theta
            v = 1.0 - 1.0 / theta + 1e-12
            d_max = math.floor(v) if math.isfinite(v) else np.inf
        else:
            xs, d_max = np.inf, np.inf
        super().__init__({"theta": theta}, xs, d_max)
        object.__setattr__(self, "theta", theta)

    def _base(self, x):
        return 1.0 + self.theta * x

    def _eval(self, x):
        t = self.theta
        if t == 0:
            return np.exp(-x)
        b = self._base(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if abs(t) < 1:
                # the power form amplifies the rounding of 1 + theta x by 1/theta
                return np.where(b > 0, np.exp(-np.log1p(t * x) / t), 0.0)
            return np.where(b > 0, np.abs(b) ** (-1.0 / t), 0.0)

    def _log_eval(self, x):
        t = self.theta
        if t == 0:
            return -x
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self._base(x) > 0, -np.log1p(t * x) / t, -np.inf)

    def _one_minus(self, x):
        t = self.theta
        if t == 0:
            return -np.expm1(-x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self._base(x) > 0, -np.expm1(-np.log1p(t * x) / t), 1.0)

    def _coef(self, k):
        t = self.theta
        p = -1.0 / t
        c = 1.0
        for j in range(k):
            c *= (p - j) * t
        return c

    def _derivative(self, k, x):
        t = self.theta
        if t == 0:
            return (-1.0) ** k * np.exp(-x)
        b = self._base(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = self._coef(k) * np.abs(b) ** (-1.0 / t - k)
        return np.where(b > 0, val, 0.0)

    def _derivative_ratio(self, k, x):
        t = self.theta
        if t == 0:
            return np.full_like(x, (-1.0) ** k)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._coef(k) * self._base(x) ** (-float(k))

    def _log_derivative(self, x):
        return -1.0 / self._base(x) if self.theta != 0 else -np.ones_like(x)

    def _pseudo_inverse(self, u):
        t = self.theta
        with np.errstate(divide="ignore", over="ignore"):
            if t == 0:
                return -np.log(u)
            return np.where(u > 0, np.expm1(-t * np.log(u)) / t, self.right_endpoint)

    def _inverse_log(self, y):
        t = self.theta
        if t == 0:
            return -y
        with np.errstate(over="ignore", invalid="ignore"):
            return np.where(np.isneginf(y), self.right_endpoint, np.expm1(-t * y) / t)

    def _endpoint_gap(self, u):
        t = self.theta
        if t >= 0:
            return np.full_like(u, np.inf)
        # x* - phi(u) = -u^{-theta} / theta
        return -(u ** (-t)) / t

    def _log_increment(self, v, x):
        t = self.theta
        if t == 0:
            return -x + 0.0 * v
        bv = self._base(v)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = t * x / bv
            return np.where(1.0 + r > 0, -np.log1p(r) / t, -np.inf)

    def _inverse_increment(self, v, y):
        t = self.theta
        if t == 0:
            return -y + 0.0 * v
        with np.errstate(over="ignore", invalid="ignore"):
            res = self._base(v) * np.expm1(-t * y) / t
        if t < 0:
            res = np.where(np.isneginf(y), self.right_endpoint - v, res)
        return res


class Independence(Clayton):
    """``psi(x) = exp(-x)``; generates the product copula."""

    family = "independence"

    def __init__(self):
        super().__init__(0.0)
        object.__setattr__(self, "params", {})


class Countermonotone(Clayton):
    """``psi(x) = (1 - x)_+``; generates the lower Frechet bound, d = 2 only."""

    family = "countermonotone"

    def __init__(self):
        super().__init__(-1.0)
        object.__setattr__(self, "params", {})
        object.__setattr__(self, "d_max", 2)

    def _derivative(self, k, x):
        if k == 1:
            return np.where(x < 1.0, -1.0, 0.0)
        return np.zeros_like(x)


class Gumbel(Generator):
    """Gumbel generator ``exp(-x^(1/theta))``, ``theta >= 1``."""

    family = "gumbel"
    _exact_inverse_log = True
    analytic = True

    def __init__(self, theta):
        theta = float(theta)
        if not theta >= 1.0:
            raise DomainError("gumbel requires theta >= 1")
        super().__init__({"theta": theta}, np.inf, np.inf)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "_a", 1.0 / theta)
        object.__setattr__(self, "_coefs", [[1.0]])

    def _coefficients(self, k):
        # psi^(k) = psi * sum_j c[k][j] x^(j a - k)
        a = self._a
        cs = self._coefs
        while len(cs) <= k:
            n = len(cs) - 1
            prev = cs[-1]
            nxt = [0.0] * (n + 2)
            for j in range(n + 2):
                left = (j * a - n) * prev[j] if j <= n else 0.0
                right = -a * prev[j - 1] if j >= 1 else 0.0
                nxt[j] = left + right
            cs.append(nxt)
        return cs[k]

    def _eval(self, x):
        return np.exp(-x ** self._a)

    def _log_eval(self, x):
        return -x ** self._a

    def _one_minus(self, x):
        return -np.expm1(-x ** self._a)

    def _derivative_ratio(self, k, x):
        a = self._a
        acc = np.zeros_like(x)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for j, c in enumerate(self._coefficients(k)):
                if c != 0.0:
                    acc = acc + c * x ** (j * a - k)
        return acc

    def _derivative(self, k, x):
        with np.errstate(invalid="ignore", under="ignore"):
            r = self._derivative_ratio(k, x)
            e = self._eval(x)
            return np.where(e > 0, r * e, 0.0)

    def _log_derivative(self, x):
        a = self._a
        with np.errstate(divide="ignore"):
            return -a * x ** (a - 1.0)

    def _pseudo_inverse(self, u):
        with np.errstate(divide="ignore"):
            return (-np.log(u)) ** self.theta

    def _inverse_log(self, y):
        return (-y) ** self.theta

    def _log_increment(self, v, x):
        a = self._a
        with np.errstate(divide="ignore", invalid="ignore"):
            safe = np.where(v > 0, v, 1.0)
            inc = -safe ** a * np.expm1(a * np.log1p(x / safe))
        return np.where(v > 0, inc, -np.maximum(x, 0.0) ** a)

    def _inverse_increment(self, v, y):
        t = self.theta
        a = self._a
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            safe = np.where(v > 0, v, 1.0)
            res = safe * np.expm1(t * np.log1p(-y / safe ** a))
        return np.where(v > 0, res, (-y) ** t)


class Log19(Generator):
    """``psi(x) = theta / log(e^theta + x)``, slowly varying at infinity.

    Derivatives are finite-difference only.
    """

    family = "log19"

    def __init__(self, theta):
        theta = float(theta)
        if not theta > 0:
            raise DomainError("log19 requires theta > 0")
        super().__init__({"theta": theta}, np.inf, 2)
        object.__setattr__(self, "theta", theta)

    def _L(self, x):
        # log(e^theta + x) without overflow
        return self.theta + np.log1p(x * np.exp(-self.theta))

    def _eval(self, x):
        return self.theta / self._L(x)

    def _log_eval(self, x):
        return np.log(self.theta) - np.log(self._L(x))

    def _one_minus(self, x):
        s = np.log1p(x * np.exp(-self.theta))
        return s / (self.theta + s)

    def _pseudo_inverse(self, u):
        t = self.theta
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(t) * np.expm1(t / u - t)

    def _inverse_log(self, y):
        t = self.theta
        with np.errstate(over="ignore"):
            return np.exp(t) * np.expm1(t * np.exp(-y) - t)


@dataclass(frozen=True)
class OscillatorParams:
    """Amplitude and phase data of the oscillating generator.

    ``(-1)^k psi^(k)(x) = (k! + a c_k sin(phi_k + log(1+x))) / (1+x)^(k+1)``.
    """

    d: int
    a: float
    c: tuple
    phi: tuple


def _oscillator_tables(kmax):
    c = [1.0]
    phi = [0.0]
    for k in range(kmax):
        c.append(c[-1] * math.sqrt(k * k + 2 * k + 2))
        # k sin - cos combination shifts the phase backwards
        phi.append(phi[-1] - math.atan(1.0 / (k + 1)))
    return c, phi


def compute_oscillator_params(d):
    """Recurrence data for the oscillating generator in dimension ``d``.

    Parameters
    ----------
    d : int
        Dimension, at least 2.

    Returns
    -------
    OscillatorParams
        ``c_0..c_{d-1}``, ``phi_0..phi_{d-1}`` and ``a = (d-1)!/c_{d-1}``.
    """
    d = int(d)
    if d < 2:
        raise DomainError("compute_oscillator_params requires d >= 2")
    c, phi = _oscillator_tables(d - 1)
    a = math.factorial(d - 1) / c[d - 1]
    return OscillatorParams(d=d, a=a, c=tuple(c), phi=tuple(phi))


class Oscillating(Generator):
    """``psi(x) = (1 + a sin(log(1+x))) / (1+x)``.

    ``psi(cx)/psi(x)`` has no limit at infinity, so ``psi`` is not regularly
    varying there.  ``psi`` is d-monotone iff ``a <= k!/c_k`` for
    ``k = 1..d``; ``d_max`` is computed from that condition.
    """

    family = "oscillating"
    analytic = True

    def __init__(self, a):
        a = float(a)
        if not 0 < a < 1:
            raise DomainError("oscillating requires 0 < a < 1")
        # k!/c_k decreases to 1/sqrt(sinh(pi)/pi); a below the limit is
        # completely monotone
        d_max = np.inf
        ratio = 1.0
        for k in range(1, 2000):
            ratio *= k / math.sqrt((k - 1) ** 2 + 2 * (k - 1) + 2)
            if a > ratio * (1 + 1e-12):
                d_max = k - 1
                break
        super().__init__({"a": a}, np.inf, d_max)
        object.__setattr__(self, "a", a)

    def _eval(self, x):
        fin = np.isfinite(x)
        xf = np.where(fin, x, 0.0)
        return np.where(fin, (1.0 + self.a * np.sin(np.log1p(xf))) / (1.0 + xf), 0.0)

    def _log_eval(self, x):
        fin = np.isfinite(x)
        xf = np.where(fin, x, 0.0)
        return np.where(fin, np.log1p(self.a * np.sin(np.log1p(xf))) - np.log1p(xf),
                        -np.inf)

    def _one_minus(self, x):
        return (x - self.a * np.sin(np.log1p(x))) / (1.0 + x)

    def _derivative(self, k, x):
        c, phi = _oscillator_tables(k)
        L = np.log1p(x)
        num = math.factorial(k) + self.a * c[k] * np.sin(phi[k] + L)
        return (-1.0) ** k * num / (1.0 + x) ** (k + 1)

    def _log_derivative(self, x):
        L = np.log1p(x)
        a = self.a
        return (a * np.cos(L) / (1.0 + a * np.sin(L)) - 1.0) / (1.0 + x)


# ---------------------------------------------------------------------------
# transformations

class PowerGenerator(Generator):
    """``x -> psi(x)^n``; generator of componentwise block minima."""

    def __init__(self, base, n):
        super().__init__({"n": n, **base.params}, base.right_endpoint, base.d_max)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "family", f"power({base.family})")
        object.__setattr__(self, "analytic", base.analytic)

    def _eval(self, x):
        with np.errstate(under="ignore"):
            return self.base._eval(x) ** self.n

    def _log_eval(self, x):
        return self.n * self.base._log_eval(x)

    def _one_minus(self, x):
        if self.n == 1:
            return self.base._one_minus(x)
        return -np.expm1(self.n * self.base._log_eval(x))

    def _derivative_ratio(self, k, x):
        # Taylor coefficients of (psi(x+h)/psi(x))^n by the power recurrence
        n = self.n
        a = [np.ones_like(x)] + [self.base._derivative_ratio(j, x) / math.factorial(j)
                                 for j in range(1, k + 1)]
        b = [np.ones_like(x)]
        for m in range(1, k + 1):
            acc = np.zeros_like(x)
            for j in range(1, m + 1):
                acc = acc + (n * j - m + j) * a[j] * b[m - j]
            b.append(acc / m)
        return math.factorial(k) * b[k]

    def _derivative(self, k, x):
        e = self._eval(x)
        with np.errstate(invalid="ignore"):
            return np.where(e > 0, self._derivative_ratio(k, x) * e, 0.0)

    def _log_derivative(self, x):
        return self.n * self.base._log_derivative(x)

    def _pseudo_inverse(self, u):
        with np.errstate(divide="ignore"):
            return self.base._inverse_log(np.log(u) / self.n)

    def _inverse_log(self, y):
        return self.base._inverse_log(y / self.n)

    def _inverse_one_minus(self, s):
        return self.base._inverse_one_minus(-np.expm1(np.log1p(-s) / self.n))

    def _endpoint_gap(self, u):
        return self.base._endpoint_gap(u ** (1.0 / self.n))

    def _log_increment(self, v, x):
        return self.n * self.base._log_increment(v, x)

    def _inverse_increment(self, v, y):
        return self.base._inverse_increment(v, y / self.n)


class RescaledGenerator(Generator):
    """``x -> psi(c x)``; generates the same copula as ``psi``."""

    def __init__(self, base, c):
        super().__init__({"c": c, **base.params}, base.right_endpoint / c, base.d_max)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "c", float(c))
        object.__setattr__(self, "family", f"rescale({base.family})")
        object.__setattr__(self, "analytic", base.analytic)

    def _eval(self, x):
        return self.base._eval(self.c * x)

    def _log_eval(self, x):
        return self.base._log_eval(self.c * x)

    def _one_minus(self, x):
        return self.base._one_minus(self.c * x)

    def _derivative(self, k, x):
        return self.c ** k * self.base._derivative(k, self.c * x)

    def _derivative_ratio(self, k, x):
        return self.c ** k * self.base._derivative_ratio(k, self.c * x)

    def _log_derivative(self, x):
        return self.c * self.base._log_derivative(self.c * x)

    def _pseudo_inverse(self, u):
        return self.base._pseudo_inverse(u) / self.c

    def _inverse_log(self, y):
        return self.base._inverse_log(y) / self.c

    def _inverse_one_minus(self, s):
        return self.base._inverse_one_minus(s) / self.c

    def _endpoint_gap(self, u):
        return self.base._endpoint_gap(u) / self.c

    def _log_increment(self, v, x):
        return self.base._log_increment(self.c * v, self.c * x)

    def _inverse_increment(self, v, y):
        return self.base._inverse_increment(self.c * v, y) / self.c


def power(gen, n):
    """Generator ``x -> psi(x)^n`` with pseudo-inverse ``phi(u^(1/n))``."""
    n = int(n)
    if n < 1:
        raise DomainError("power requires n >= 1")
    return PowerGenerator(gen, n)


def rescale(gen, c):
    """Generator ``x -> psi(c x)`` with right endpoint ``x*/c``."""
    c = float(c)
    if not c > 0:
        raise DomainError("rescale requires c > 0")
    return RescaledGenerator(gen, c)


def make_family(family, params=None, d=2, validate=True, **kwargs):
    """Build a built-in generator.

    Parameters
    ----------
    family : {'clayton', 'gumbel', 'independence', 'countermonotone', \
'log19', 'oscillating'}
    params : dict, optional
        ``theta`` for clayton, gumbel and log19; optional ``a`` for
        oscillating (defaults to ``compute_oscillator_params(d).a``).
    d : int
        Intended dimension, used for range checks.
    validate : bool
        Reject parameters for which the generator is not d-monotone by
        construction.  ``check_d_monotone`` callers pass ``False``.

    Raises
    ------
    DomainError
        Parameter outside the admissible range; the message names the
        constraint.
    """
    p = dict(params or {})
    p.update(kwargs)
    d = int(d)
    if d < 2:
        raise DomainError("dimension must be >= 2")
    family = str(family).lower()
    if family == "clayton":
        theta = float(p.get("theta", 1.0))
        if validate and theta < -1.0 / (d - 1):
            raise DomainError(
                f"clayton at d={d} requires theta >= -1/{d - 1} "
                f"(= {-1.0 / (d - 1):.6g}); got {theta}")
        return Clayton(theta)
    if family == "gumbel":
        theta = float(p.get("theta", 1.0))
        if theta < 1:
            raise DomainError(f"gumbel requires theta >= 1; got {theta}")
        return Gumbel(theta)
    if family == "independence":
        return Independence()
    if family == "countermonotone":
        if validate and d != 2:
            raise DomainError(f"countermonotone requires d = 2; got d={d}")
        return Countermonotone()
    if family == "log19":
        theta = float(p.get("theta", 1.0))
        if theta <= 0:
            raise DomainError(f"log19 requires theta > 0; got {theta}")
        if validate and d != 2:
            raise DomainError(f"log19 requires d = 2; got d={d}")
        return Log19(theta)
    if family == "oscillating":
        a = p.get("a")
        if a is None:
            a = compute_oscillator_params(d).a
        a = float(a)
        if not 0 < a < 1:
            raise DomainError(f"oscillating requires 0 < a < 1; got {a}")
        return Oscillating(a)
    raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")


def pseudo_inverse(gen, u):
    """``phi(u) = inf{x >= 0 : psi(x) = u}``."""
    return gen.pseudo_inverse(u)


def derivative(gen, k, x):
    """``k``-th derivative of ``gen`` at ``x``.

    Closed form for families that provide one, Richardson-extrapolated
    central differences otherwise.

    Raises
    ------
    PrecisionError
        Finite differences beyond the supported order or too noisy.
    """
    return gen.derivative(k, x)


def williamson_inverse_cdf(gen, d, x):
    """Unclamped ``1 - sum_k (-1)^k x^k psi^(k)(x) / k!`` for ``k < d``."""
    x = _arr(x)
    acc = np.zeros_like(x)
    for k in range(d):
        dk = gen._eval(x) if k == 0 else gen._derivative(k, x)
        with np.errstate(invalid="ignore", over="ignore"):
            term = (-1.0) ** k * np.where(x > 0, x ** k, 0.0 if k else 1.0) * dk
        acc = acc + term / math.factorial(k)
    return 1.0 - acc


@dataclass
class GeneratorReport:
    """Outcome of ``check_d_monotone``.

    Attributes
    ----------
    axiom_violations : list of (str, float, float)
        ``(property, location, magnitude)``; empty iff every verdict passes.
    d_monotone_verdict : dict
        Tested dimension -> ``'pass' | 'fail' | 'inconclusive'``.
    method : list of str
        Methods applied.
    """

    axiom_violations: list = field(default_factory=list)
    d_monotone_verdict: dict = field(default_factory=dict)
    method: list = field(default_factory=list)
    family: str = ""
    params: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(v == "pass" for v in self.d_monotone_verdict.values())


def _default_grid(gen):
    xs = gen.right_endpoint
    if math.isinf(xs):
        return np.geomspace(0.01, 100.0, 401)
    return np.geomspace(xs * 1e-3, xs * (1 - 1e-3), 401)


def check_d_monotone(gen, d, grid=None, tol=1e-8):
    """Test the generator axioms and d-monotonicity on a grid.

    Two methods are combined when derivatives are available.  The sign
    method checks ``(-1)^k psi^(k) >= -tol psi`` for ``k <= d - 2`` and that
    ``g = (-1)^(d-2) psi^(d-2)`` is non-increasing and convex, using
    derivative signs and second differences on the grid extended past the
    right endpoint, where ``g`` vanishes.  The CDF method checks that the
    inverse Williamson transform is a distribution function on the grid.

    Parameters
    ----------
    gen : Generator
    d : int
        Dimension to test.
    grid : array_like, optional
        Strictly increasing points in ``(0, x*)``.
    tol : float
        Tolerance relative to ``psi(x)``.

    Returns
    -------
    GeneratorReport
    """
    d = int(d)
    x = _default_grid(gen) if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.diff(x) <= 0) or np.any(x <= 0):
        raise DomainError("grid must be strictly increasing and positive")
    viol = []
    inconclusive = []
    methods = []
    eps = np.finfo(float).eps
    psi = gen._eval(x)

    def flag(name, loc, mag, err=0.0):
        if abs(mag) <= err:
            inconclusive.append((f"inconclusive:{name}", float(loc), float(mag)))
        else:
            viol.append((name, float(loc), float(mag)))

    # generator axioms
    if abs(float(gen._eval(np.array(0.0))) - 1.0) > 1e-12:
        viol.append(("psi(0)=1", 0.0, float(gen._eval(np.array(0.0))) - 1.0))
    inc = np.diff(psi)
    for i in np.nonzero(inc > 1e-14)[0]:
        viol.append(("non-increasing", float(x[i + 1]), float(inc[i])))
    ugrid = np.linspace(0.0, 1.0, 101)
    back = gen._eval(gen._pseudo_inverse(ugrid)) - ugrid
    for i in np.nonzero(np.abs(back) > 1e-8)[0]:
        viol.append(("right-inverse", float(ugrid[i]), float(back[i])))

    fd_ok = gen.analytic or d <= MAX_FD_ORDER
    top = d if gen.analytic else min(d, MAX_FD_ORDER)

    def deriv(k, pts):
        if k == 0:
            return gen._eval(pts), np.zeros_like(pts)
        if gen.analytic:
            return gen._derivative(k, pts), np.zeros_like(pts)
        return fd_derivative(gen._eval, k, pts)

    # (a) sign method
    methods.append("derivative-sign")
    for k in range(0, top + 1):
        if k > d:
            break
        val, err = deriv(k, x)
        s = (-1.0) ** k * val
        bad = s < -tol * psi
        for i in np.nonzero(bad)[0]:
            flag(f"sign k={k}", x[i], s[i], err[i])
    # second differences of g on the grid extended past x*
    if d >= 2:
        xe = x
        if not gen.strict:
            xs = gen.right_endpoint
            step = max(xs - x[-1], (x[-1] - x[-2]) if x.size > 1 else xs * 1e-3)
            xe = np.concatenate((x[x < xs], [xs, xs + step, xs + 2 * step]))
        g, gerr = deriv(d - 2, xe)
        g = (-1.0) ** (d - 2) * g
        g = np.where(xe >= gen.right_endpoint, 0.0, g)
        pe = np.maximum(gen._eval(xe), 0.0)
        noise = 64 * eps * np.abs(g) + gerr
        dg = np.diff(g)
        for i in np.nonzero(dg > tol * pe[:-1] + noise[:-1] + noise[1:])[0]:
            flag(f"non-increasing (-1)^{d - 2} psi^({d - 2})", xe[i + 1], dg[i],
                 gerr[i] + gerr[i + 1])
        if xe.size >= 3:
            h = np.diff(xe)
            slope = dg / h
            sd = (slope[1:] - slope[:-1]) * 0.5 * (h[1:] + h[:-1])
            lim = tol * pe[1:-1] + 2 * (noise[:-2] + noise[1:-1] + noise[2:])
            for i in np.nonzero(sd < -lim)[0]:
                flag(f"convexity (-1)^{d - 2} psi^({d - 2})", xe[i + 1], sd[i],
                     2 * (gerr[i] + gerr[i + 1] + gerr[i + 2]))
    # (b) inverse-transform CDF
    if fd_ok and d - 1 <= top:
        methods.append("inverse-transform-CDF")
        try:
            xc = x if gen.strict else np.concatenate((x, [gen.right_endpoint]))
            F = williamson_inverse_cdf(gen, d, xc)
            ferr = 0.0
            if not gen.analytic:
                ferr = sum(
                    (xc ** k) * fd_derivative(gen._eval, k, xc)[1] / math.factorial(k)
                    for k in range(1, d))
            ferr = np.broadcast_to(np.asarray(ferr, dtype=float), F.shape)
            for i in np.nonzero(F < -tol)[0]:
                flag("cdf below 0", xc[i], F[i], ferr[i])
            for i in np.nonzero(F > 1 + tol)[0]:
                flag("cdf above 1", xc[i], F[i] - 1, ferr[i])
            dF = np.diff(F)
            for i in np.nonzero(dF < -tol)[0]:
                flag("cdf non-decreasing", xc[i + 1], dF[i], ferr[i] + ferr[i + 1])
        except PrecisionError as exc:
            inconclusive.append(("inconclusive:cdf", float("nan"), exc.achieved))
    if viol:
        verdict = "fail"
    elif inconclusive:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    return GeneratorReport(axiom_violations=viol + inconclusive,
                           d_monotone_verdict={d: verdict}, method=methods,
                           family=gen.family, params=dict(gen.params))
