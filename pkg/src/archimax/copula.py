"""Copula evaluation, rectangle masses and the rank-based empirical copula."""

from dataclasses import dataclass
import itertools
import warnings

import numpy as np
from scipy.stats import rankdata

from .errors import DomainError, UnsupportedError
from .sampler import SampleMatrix

__all__ = ["eval_copula", "eval_survival", "rectangle_mass",
           "find_negative_rectangle", "EmpiricalCopula", "empirical_copula",
           "empirical_copula_eval", "survival_copula_transform"]

ZERO_SLACK = 1e-14
MAX_RECT_DIM = 12


def eval_copula(gen, u):
    """``C(u) = psi(phi(u_1) + ... + phi(u_d))``.

    ``u`` may be a single point or an array whose last axis is the
    dimension.  Points with ``sum phi(u_i) >= x* - 1e-14`` lie in the zero
    set and return exactly 0.
    """
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    if u.ndim == 0:
        raise DomainError("eval_copula expects a vector")
    s = np.sum(gen.pseudo_inverse(u), axis=-1)
    xs = gen.right_endpoint
    with np.errstate(invalid="ignore"):
        zero = s >= xs - ZERO_SLACK if np.isfinite(xs) else np.isinf(s)
        val = np.where(zero, 0.0, gen.eval(np.where(zero, 0.0, s)))
    return val[()] if np.ndim(val) == 0 else val


def eval_survival(gen, x):
    """Joint survival function ``psi(x_1 + ... + x_d)``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("eval_survival requires x >= 0")
    val = gen.eval(np.sum(x, axis=-1))
    return val[()] if np.ndim(val) == 0 else val


def _corners(d):
    return np.array(list(itertools.product((0, 1), repeat=d)), dtype=bool)


def rectangle_mass(gen, lower, upper):
    """C-volume of ``[lower, upper]`` by inclusion-exclusion.

    ``lower`` and ``upper`` may carry leading batch axes.

    Raises
    ------
    UnsupportedError
        Dimension above 12.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if lo.shape != hi.shape:
        raise DomainError("lower and upper must have the same shape")
    d = lo.shape[-1]
    if d > MAX_RECT_DIM:
        raise UnsupportedError(f"rectangle_mass supports d <= {MAX_RECT_DIM}")
    if np.any(lo > hi):
        raise DomainError("lower must not exceed upper")
    c = _corners(d)
    sign = np.where(c.sum(axis=1) % 2 == d % 2, 1.0, -1.0)
    pts = np.where(c, hi[..., None, :], lo[..., None, :])
    vals = eval_copula(gen, pts)
    out = np.sum(sign * vals, axis=-1)
    return out[()] if np.ndim(out) == 0 else out


def find_negative_rectangle(gen, d, step=0.1, tol=1e-10):
    """Search grid cells of side ``step`` for negative C-volume.

    Any grid rectangle is a union of cells, so a negative rectangle on the
    grid exists iff some cell is negative.

    Returns
    -------
    (lower, upper, mass) or None
        The most negative cell when its mass is below ``-tol``.
    """
    m = int(round(1.0 / step))
    edges = np.linspace(0.0, 1.0, m + 1)
    idx = np.array(list(itertools.product(range(m), repeat=d)))
    lo = edges[idx]
    hi = edges[idx + 1]
    mass = rectangle_mass(gen, lo, hi)
    k = int(np.argmin(mass))
    if mass[k] < -tol:
        return lo[k], hi[k], float(mass[k])
    return None


@dataclass
class EmpiricalCopula:
    """Column-wise ranks of a sample.

    Attributes
    ----------
    ranks : ndarray of int, shape (n, d)
    n : int
    ties : int
        Number of tied values broken by input order.
    """

    ranks: np.ndarray
    n: int
    ties: int = 0


def empirical_copula(data):
    """Rank a sample; ties are broken by first occurrence and counted."""
    x = data.data if isinstance(data, SampleMatrix) else np.asarray(data, dtype=float)
    ranks = np.column_stack([rankdata(x[:, j], method="ordinal") for j in range(x.shape[1])])
    ties = int(sum(x.shape[0] - np.unique(x[:, j]).size for j in range(x.shape[1])))
    if ties:
        warnings.warn(f"{ties} tied values broken by input order", RuntimeWarning,
                      stacklevel=2)
    return EmpiricalCopula(ranks.astype(np.int64), x.shape[0], ties)


def empirical_copula_eval(E, u):
    """``(1/n) sum_i 1{rank_ij / n <= u_j for all j}``; ``u`` may be batched."""
    u = np.asarray(u, dtype=float)
    batch = u.reshape(-1, E.ranks.shape[1])
    # rank/n <= u  <=>  rank <= floor(n u)
    lim = np.floor(batch * E.n + 1e-9).astype(np.int64)
    out = np.empty(batch.shape[0])
    for i, row in enumerate(lim):
        out[i] = np.count_nonzero(np.all(E.ranks <= row, axis=1)) / E.n
    return out[0] if u.ndim == 1 else out.reshape(u.shape[:-1])


def survival_copula_transform(M):
    """Map copula rows ``u -> 1 - u``."""
    if M.space != "copula":
        raise DomainError("survival_copula_transform expects a copula sample")
    prov = dict(M.provenance)
    prov["survival"] = not prov.get("survival", False)
    return SampleMatrix(1.0 - M.data, "copula", M.seed, prov)
