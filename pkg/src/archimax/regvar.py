"""Regular-variation indices, auxiliary functions and domain checks.

Indices are read from the local ratio ``-log2(f(2x)/f(x))`` on geometric
grids, with ``x -> 1/x`` near the origin and ``x -> e - 1/x`` near a finite
endpoint ``e``.  With this sign convention ``f in RV_{-alpha}`` reports
``alpha``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from ._limits import assess
from ._quad import geometric_points, integrate
from .errors import DomainError, NumericError
from .gen import Generator
from .radial import RadialDistribution, WilliamsonGenerator

__all__ = ["RVEstimate", "rv_index", "auxiliary_function", "tail_auxiliary",
           "GumbelDomainReport", "gumbel_domain_check", "InvGenReport",
           "invgen_equivalence_check", "MDATransferReport", "mda_transfer_check",
           "generator_index"]

LN2 = math.log(2.0)
LOCATIONS = ("infinity", "origin", "endpoint")
J_MAX = {"infinity": 60, "origin": 60, "endpoint": 40}


@dataclass
class RVEstimate:
    """Index estimate with its trace.

    ``index`` is ``None`` unless the last 5 estimates vary by less than
    1e-6 and the last 20 by at most 1e-3; ``inf`` marks rapid variation.
    """

    index: object
    converged: bool
    location: str
    trace: list = field(default_factory=list)
    oscillation: float = float("nan")
    last_variation: float = float("nan")
    rapid: bool = False
    estimate: object = None


def _log_of(f, log):
    if log:
        return lambda x: np.asarray(f(x), dtype=float)

    def g(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.asarray(f(x), dtype=float))
    return g


def rv_index(f, location="infinity", endpoint=None, *, log=False, x0=None,
             j_max=None):
    """Estimate the regular-variation index of ``f``.

    Parameters
    ----------
    f : callable
        Vectorized; returns ``f(x)`` or ``log f(x)`` when ``log`` is set.
    location : {'infinity', 'origin', 'endpoint'}
        ``'origin'`` treats ``x -> f(1/x)`` and ``'endpoint'`` treats
        ``x -> f(endpoint - 1/x)``, both as ``x -> inf``.
    endpoint : float, optional
        Required for ``location='endpoint'``.
    log : bool
        ``f`` returns log-values.
    x0 : float, optional
        Grid anchor: 1 at infinity, ``2^-4`` at the origin and
        ``endpoint/4`` at an endpoint.
    j_max : int, optional
        Number of halvings/doublings (60, 60 and 40 by default; beyond that
        double precision runs out near an endpoint).

    Returns
    -------
    RVEstimate
    """
    if location not in LOCATIONS:
        raise DomainError(f"location must be one of {LOCATIONS}")
    if log:
        L = _log_of(f, True)
        step = lambda a, b: -(L(a) - L(b)) / LN2  # noqa: E731
    else:
        # log2 of the ratio itself keeps exact ratios exact
        step = lambda a, b: -np.log2(np.asarray(f(a), dtype=float)  # noqa: E731
                                     / np.asarray(f(b), dtype=float))
    j = np.arange((J_MAX[location] if j_max is None else int(j_max)) + 1)
    with np.errstate(all="ignore"):
        if location == "infinity":
            x = (1.0 if x0 is None else float(x0)) * 2.0 ** j
            scale = x
            local = step(2.0 * x, x)
        elif location == "origin":
            s = (2.0 ** -4 if x0 is None else float(x0)) * 2.0 ** -j
            scale = 1.0 / s
            local = step(0.5 * s, s)
        else:
            if endpoint is None or not math.isfinite(endpoint):
                raise DomainError("a finite endpoint is required for location='endpoint'")
            h = (endpoint / 4.0 if x0 is None else float(x0)) * 2.0 ** -j
            scale = 1.0 / h
            local = step(endpoint - 0.5 * h, endpoint - h)
    local = np.asarray(local, dtype=float)
    # 0/0 after underflow on both sides is an evaluation failure, a finite
    # value followed by -inf is rapid decay
    res = assess(local, allow_rapid=True)
    return RVEstimate(index=res["limit"], converged=res["converged"],
                      location=location,
                      trace=[(float(a), float(b)) for a, b in zip(scale, local)],
                      oscillation=res["oscillation"],
                      last_variation=res["last_variation"], rapid=res["rapid"],
                      estimate=res["estimate"])


def generator_index(gen, location="infinity"):
    """Index of ``psi`` at infinity or the endpoint, or of ``1 - psi`` at 0."""
    if location == "infinity":
        return rv_index(gen.log_eval, "infinity", log=True)
    if location == "origin":
        return rv_index(gen.one_minus, "origin")
    if gen.strict:
        raise DomainError("strict generator has no finite endpoint")
    return rv_index(gen.eval, "endpoint", endpoint=gen.right_endpoint)


def _tail_integral(loginc, upper, scale):
    """``int_0^upper exp(loginc(y)) dy`` for a non-increasing integrand."""
    f = lambda y: np.exp(np.minimum(loginc(y), 0.0))  # noqa: E731
    if math.isfinite(upper):
        pts = list(geometric_points(min(scale, upper) * 2.0 ** -6, upper))
        pts += [upper - p for p in geometric_points(upper * 2.0 ** -50, upper / 2)]
        val, _ = integrate(f, 0.0, upper, points=pts, epsabs=1e-300, epsrel=1e-10)
        return val
    total = 0.0
    lo, hi = 0.0, scale
    for _ in range(4000):
        piece, _ = integrate(f, lo, hi, epsabs=1e-300, epsrel=1e-11)
        total += piece
        if piece <= 1e-12 * total:
            return total
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            break
    raise DomainError("tail integral does not converge (not in the Gumbel domain)")


def auxiliary_function(gen, x):
    """Auxiliary function ``a(x) = int_x^{x*} psi(t) dt / psi(x)``.

    The integrand ``psi(x + y) / psi(x)`` is evaluated through
    ``gen.log_increment``, so ``psi(x)`` itself may underflow.

    Raises
    ------
    DomainError
        ``x >= x*`` or the tail integral diverges.
    """
    x = float(x)
    if not (0 <= x < gen.right_endpoint):
        raise DomainError("auxiliary_function requires 0 <= x < x*")
    if gen.strict:
        rv = rv_index(gen.log_eval, "infinity", log=True)
        if rv.converged and rv.index <= 1.0 + 1e-6:
            raise DomainError(
                f"tail integral diverges: psi is regularly varying with index {rv.index:.4g} <= 1")
    ld = float(gen.log_derivative(x))
    scale = -1.0 / ld if (np.isfinite(ld) and ld < 0) else 1.0
    upper = gen.right_endpoint - x
    return _tail_integral(lambda y: gen.log_increment(x, y), upper, scale)


def tail_auxiliary(F, x):
    """Auxiliary function of a radial law: tail integral of ``F_bar``.

    Falls back to the hazard form ``F_bar / f`` when the tail integral
    diverges (heavy tails), which is the natural scale there.
    """
    x = float(x)
    ls0 = float(F.logsf(x))
    upper = F.right_endpoint - x
    haz = None
    if hasattr(F, "logpdf"):
        haz = float(np.exp(ls0 - F.logpdf(x)))
    scale = haz if haz and np.isfinite(haz) and haz > 0 else 1.0
    try:
        return _tail_integral(lambda y: F.logsf(x + y) - ls0, upper, scale)
    except (DomainError, NumericError):
        if haz is None:
            raise
        return haz


@dataclass
class GumbelDomainReport:
    """Deviations ``|f(x + a(x) t)/f(x) - exp(-t)|`` per grid point."""

    rows: list
    t_grid: list
    passed: bool
    final_deviation: float
    tolerance: float = 1e-3


def _log_increment_fn(f, log):
    if isinstance(f, Generator):
        return lambda x, y: f.log_increment(x, y)
    if isinstance(f, RadialDistribution):
        return lambda x, y: F_logsf_increment(f, x, y)
    L = _log_of(f, log)
    return lambda x, y: L(x + y) - L(x)


def F_logsf_increment(F, x, y):
    return np.asarray(F.logsf(x + y), dtype=float) - float(F.logsf(x))


def gumbel_domain_check(f, aux, x_grid, t_grid=(-1.0, 0.5, 1.0, 2.0), *, log=False,
                        tol=1e-3):
    """Check ``f(x + a(x) t) / f(x) -> exp(-t)`` along ``x_grid``.

    Parameters
    ----------
    f : Generator, RadialDistribution or callable
        Generators use ``log_increment``, radial laws their log-survival
        function; plain callables return values (or logs with ``log``).
    aux : callable or float
        Auxiliary function ``a(x)``.
    x_grid, t_grid : sequence of float

    Returns
    -------
    GumbelDomainReport
        Passes when the last row stays within ``tol`` for every ``t``.
    """
    inc = _log_increment_fn(f, log)
    t = np.asarray(t_grid, dtype=float)
    rows = []
    for x in x_grid:
        a = float(aux(x)) if callable(aux) else float(aux)
        if not a > 0:
            raise DomainError("auxiliary function must be positive")
        with np.errstate(all="ignore"):
            ratio = np.exp(np.asarray(inc(float(x), a * t), dtype=float))
        dev = np.abs(ratio - np.exp(-t))
        dev = np.where(np.isfinite(dev), dev, np.inf)
        rows.append((float(x), float(dev.max()), [float(v) for v in dev]))
    final = rows[-1][1] if rows else float("inf")
    return GumbelDomainReport(rows=rows, t_grid=[float(v) for v in t],
                              passed=bool(final <= tol), final_deviation=final,
                              tolerance=tol)


@dataclass
class InvGenReport:
    """Generator-side and inverse-side indices for one location."""

    case: str
    psi_estimate: RVEstimate
    phi_estimate: RVEstimate
    alpha_psi: object
    alpha_phi: object
    agree: bool
    tolerance: float = 0.02


def invgen_equivalence_check(gen, case, tol=0.02):
    """Compare the index of ``psi`` with the one implied by ``phi``.

    ``case='infinity'``: ``psi in RV_{-alpha}`` at infinity iff
    ``phi(cs)/phi(s) -> c^{-1/alpha}`` as ``s -> 0``.
    ``case='endpoint'``: ``psi(x* - 1/x) in RV_{-alpha}`` iff
    ``(x* - phi(cs))/(x* - phi(s)) -> c^{1/alpha}``.
    ``case='origin'``: ``1 - psi(1/x) in RV_{-alpha}`` iff
    ``phi(1 - cs)/phi(1 - s) -> c^{1/alpha}``.
    """
    if case == "infinity":
        if not gen.strict:
            raise DomainError("infinity case needs a strict generator")
        psi_est = rv_index(gen.log_eval, "infinity", log=True)
        phi_est = rv_index(gen.pseudo_inverse, "origin")
        alpha_phi = (-1.0 / phi_est.index) if phi_est.converged and phi_est.index else None
    elif case == "endpoint":
        if gen.strict:
            raise DomainError("endpoint case needs a non-strict generator")
        psi_est = rv_index(gen.eval, "endpoint", endpoint=gen.right_endpoint)
        phi_est = rv_index(gen.endpoint_gap, "origin")
        alpha_phi = (1.0 / phi_est.index) if phi_est.converged and phi_est.index else None
    elif case == "origin":
        psi_est = rv_index(gen.one_minus, "origin")
        phi_est = rv_index(gen.inverse_one_minus, "origin")
        alpha_phi = (1.0 / phi_est.index) if phi_est.converged and phi_est.index else None
    else:
        raise DomainError("case must be 'infinity', 'endpoint' or 'origin'")
    alpha_psi = psi_est.index if psi_est.converged else None
    agree = (alpha_psi is not None and alpha_phi is not None
             and abs(alpha_psi - alpha_phi) <= tol)
    return InvGenReport(case=case, psi_estimate=psi_est, phi_estimate=phi_est,
                        alpha_psi=alpha_psi, alpha_phi=alpha_phi, agree=bool(agree),
                        tolerance=tol)


@dataclass
class MDATransferReport:
    """Gumbel-domain checks of ``F_bar`` and ``psi = W_d F`` with one ``a``."""

    radial_check: GumbelDomainReport
    generator_check: GumbelDomainReport
    both_pass: bool
    aux_values: list


def mda_transfer_check(F, d, x_grid=None, t_grid=(-1.0, 0.5, 1.0, 2.0), tol=1e-3):
    """Run the Gumbel-domain check on ``F_bar`` and on ``W_d F``.

    Both sides use the auxiliary function of ``F`` (tail integral of
    ``F_bar``, or the hazard scale when that diverges).

    Raises
    ------
    DomainError
        ``F`` has a finite right endpoint.
    """
    if math.isfinite(F.right_endpoint):
        raise DomainError("mda_transfer_check needs an unbounded radial law")
    if x_grid is None:
        x_grid = np.geomspace(10.0, 1e4, 7)
    psi = WilliamsonGenerator(F, d)
    aux = {float(x): tail_auxiliary(F, x) for x in x_grid}
    a = lambda x: aux[float(x)]  # noqa: E731
    fr = gumbel_domain_check(F, a, x_grid, t_grid, tol=tol)
    gr = gumbel_domain_check(psi, a, x_grid, t_grid, tol=tol)
    return MDATransferReport(radial_check=fr, generator_check=gr,
                             both_pass=bool(fr.passed and gr.passed),
                             aux_values=[(k, v) for k, v in aux.items()])
