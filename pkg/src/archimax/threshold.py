"""Lower and upper threshold copula limits."""

from dataclasses import dataclass, field
import math

import numpy as np

from .copula import eval_copula
from .errors import DomainError, NumericError
from .gen import Generator, make_family
from .regvar import auxiliary_function, gumbel_domain_check, rv_index

__all__ = ["ThresholdGenerator", "lower_threshold_generator", "ThresholdReport",
           "lltc_parameters", "upper_threshold_limit", "upper_threshold_finite"]

J_TRACE = 40
GUMBEL_X = (1e2, 1e4, 1e6, 1e8)


class ThresholdGenerator(Generator):
    """``x -> psi(x + v) / psi(v)``, the survival generator above a threshold.

    Every primitive goes through the base generator's increment functions,
    so ``psi(v)`` may underflow without harm.
    """

    def __init__(self, base, v):
        super().__init__({"v": v, **base.params}, base.right_endpoint - v, base.d_max)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "v", float(v))
        object.__setattr__(self, "family", f"threshold({base.family})")
        object.__setattr__(self, "analytic", base.analytic)
        object.__setattr__(self, "_exact_inverse_log", base._exact_inverse_log)

    def _eval(self, x):
        with np.errstate(under="ignore"):
            return np.exp(self._log_eval(x))

    def _log_eval(self, x):
        return self.base._log_increment(np.full_like(x, self.v), x)

    def _one_minus(self, x):
        return -np.expm1(self._log_eval(x))

    def _derivative_ratio(self, k, x):
        return self.base._derivative_ratio(k, x + self.v)

    def _derivative(self, k, x):
        if k == 0:
            return self._eval(x)
        return self._derivative_ratio(k, x) * self._eval(x)

    def _log_derivative(self, x):
        return self.base._log_derivative(x + self.v)

    def _pseudo_inverse(self, u):
        with np.errstate(divide="ignore"):
            return self._inverse_log(np.log(u))

    def _inverse_log(self, y):
        x = self.base._inverse_increment(np.full_like(y, self.v), y)
        return np.where(np.isneginf(y), self.right_endpoint, x)

    def _log_increment(self, v, x):
        return self.base._log_increment(v + self.v, x)

    def _inverse_increment(self, v, y):
        return self.base._inverse_increment(v + self.v, y)


def lower_threshold_generator(gen, v_norm):
    """Generator of the lower threshold copula at ``||v||_1 = v_norm``.

    ``v_norm`` may also be the threshold vector itself; only its l1 norm
    matters.  ``v_norm = 0`` returns ``gen``.

    Raises
    ------
    DomainError
        ``v_norm`` is negative or reaches the zero set (``v_norm >= x*``).
    """
    v = np.asarray(v_norm, dtype=float)
    v = math.fsum(v.ravel()) if v.ndim else float(v)
    if v < 0:
        raise DomainError("threshold norm must be >= 0")
    if v >= gen.right_endpoint:
        raise DomainError(f"threshold norm {v!r} reaches the zero set (x* = {gen.right_endpoint!r})")
    if v == 0:
        return gen
    return ThresholdGenerator(gen, v)


@dataclass
class ThresholdReport:
    """Limiting lower threshold copula of Clayton type.

    ``theta_star`` is ``None`` for an undetermined domain.  ``beta_at`` maps
    ``||v||_1`` to the normalization; ``trace`` pairs ``||v||_1`` with the
    sup-distance between ``C_{psi_v}`` and the Clayton copula on a 5x5 grid.
    """

    domain: str
    theta_star: object
    beta_at: object = None
    trace: list = field(default_factory=list)
    index: object = None
    notes: list = field(default_factory=list)


def _grid(k=5):
    g = np.linspace(0.1, 0.9, k)
    return np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)


def _classify(gen, d):
    if gen.strict:
        est = rv_index(gen.log_eval, "infinity", log=True)
        if not est.converged:
            return "undetermined", None, None, None, "index at infinity does not converge"
        if est.rapid:
            try:
                rep = gumbel_domain_check(gen, lambda x: auxiliary_function(gen, x), GUMBEL_X)
            except (DomainError, NumericError) as exc:
                return "undetermined", None, None, None, f"Gumbel check failed: {exc}"
            if rep.passed:
                return "gumbel", 0.0, (lambda v: auxiliary_function(gen, v)), math.inf, ""
            return ("undetermined", None, None, math.inf,
                    f"rapidly varying but Gumbel check deviates by {rep.final_deviation:.3g}")
        if est.index > 0:
            return "frechet", 1.0 / est.index, (lambda v: v), est.index, ""
        return "undetermined", None, None, est.index, "slowly varying generator"
    xs = gen.right_endpoint
    est = rv_index(gen.eval, "endpoint", endpoint=xs)
    if not est.converged or not est.index > 0:
        return "undetermined", None, None, None, "endpoint index does not converge"
    note = ""
    if est.index < d - 1 - 0.05:
        note = f"endpoint index {est.index:.4g} below d - 1"
    return "weibull", -1.0 / est.index, (lambda v: xs - v), est.index, note


def lltc_parameters(gen, d=2):
    """Classify the generator's domain and the Clayton lower threshold limit.

    Frechet (``psi`` regularly varying with index ``alpha``):
    ``theta* = 1/alpha``, ``beta(v) = v``.  Gumbel (rapid variation and the
    Gumbel-domain check passes): ``theta* = 0``, ``beta = a``.  Weibull
    (finite ``x*``, endpoint index ``alpha``): ``theta* = -1/alpha``,
    ``beta(v) = x* - v``.

    The trace runs over ``||v||_1 = 2^j`` (strict) or ``x*(1 - 2^-j)``,
    ``j = 1..40``.
    """
    d = int(d)
    domain, theta, beta, index, note = _classify(gen, d)
    rep = ThresholdReport(domain=domain, theta_star=theta, beta_at=beta, index=index)
    if note:
        rep.notes.append(note)
    if theta is None:
        return rep
    limit = make_family("clayton", {"theta": theta}, d=2, validate=False)
    g = _grid()
    ref = eval_copula(limit, g)
    j = np.arange(1, J_TRACE + 1)
    vs = 2.0 ** j if gen.strict else gen.right_endpoint * (1.0 - 2.0 ** -j)
    for v in vs:
        try:
            gv = lower_threshold_generator(gen, float(v))
        except DomainError:
            break
        dev = float(np.max(np.abs(eval_copula(gv, g) - ref)))
        rep.trace.append((float(v), dev))
    return rep


def upper_threshold_limit(x1, x2, alpha):
    """``H_0(x1, x2) = (x1^a + x2^a - (x1 + x2)^a) / (2 - 2^a)``.

    Raises
    ------
    DomainError
        ``alpha`` outside ``(0, 1)``; ``alpha = 1`` is a degenerate boundary
        case with no limit of this form.
    """
    if not 0 < alpha < 1:
        raise DomainError("upper_threshold_limit requires 0 < alpha < 1 "
                          "(alpha = 1 is a boundary case without this limit)")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any((x1 < 0) | (x1 > 1) | (x2 < 0) | (x2 > 1)):
        raise DomainError("arguments must lie in [0, 1]")
    val = (x1 ** alpha + x2 ** alpha - (x1 + x2) ** alpha) / (2.0 - 2.0 ** alpha)
    return val[()] if np.ndim(val) == 0 else val


def upper_threshold_finite(gen, v, x1, x2):
    """Normalized finite-threshold law ``H_v(x1 v, x2 v)`` with ``G = 1 - psi``.

    ``(G(x1 v) + G(x2 v) - G((x1 + x2) v)) / (2 G(v) - G(2v))``.
    """
    v = float(v)
    if not v > 0:
        raise DomainError("threshold v must be > 0")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any((x1 < 0) | (x1 > 1) | (x2 < 0) | (x2 > 1)):
        raise DomainError("arguments must lie in [0, 1]")
    G = gen.one_minus
    den = 2.0 * G(v) - G(2.0 * v)
    if not den > 0:
        raise DomainError("denominator 2G(v) - G(2v) vanishes at this threshold")
    val = (G(x1 * v) + G(x2 * v) - G((x1 + x2) * v)) / den
    return val[()] if np.ndim(val) == 0 else val
