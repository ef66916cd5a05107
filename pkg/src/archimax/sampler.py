"""Sampling on the simplex, l1-norm symmetric vectors and copulas.

All draws use counter-based streams keyed by ``(seed, name, chunk)``, so the
output depends only on the inputs and the seed, never on thread count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import io

import numpy as np

from .errors import DomainError
from .radial import radial_from_generator
from .rng import substream, thread_count

__all__ = ["SampleMatrix", "sample_simplex", "sample_l1ns", "sample_copula",
           "write_csv", "CHUNK"]

CHUNK = 1 << 16


@dataclass
class SampleMatrix:
    """An ``n x d`` sample with provenance.

    Attributes
    ----------
    data : ndarray
    space : {'simplex', 'l1ns', 'copula'}
    seed : int
    provenance : dict
    """

    data: np.ndarray
    space: str
    seed: int
    provenance: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def d(self):
        return self.data.shape[1]


def _chunked(n, fn):
    # fn(chunk_index, rows) -> array; chunks are independent substreams
    bounds = [(i, min(CHUNK, n - i * CHUNK)) for i in range((n + CHUNK - 1) // CHUNK)]
    workers = min(thread_count(), len(bounds)) or 1
    if workers == 1:
        parts = [fn(i, m) for i, m in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: fn(*b), bounds))
    return np.concatenate(parts, axis=0) if parts else np.empty((0,))


def _simplex_rows(seed, d, n):
    def chunk(i, m):
        e = substream(seed, "simplex", i).standard_exponential((m, d))
        return e / e.sum(axis=1, keepdims=True)
    return _chunked(n, chunk).reshape(n, d)


def _radii(F, seed, n):
    return _chunked(n, lambda i, m: np.asarray(
        F.sample(m, substream(seed, "radial", i)), dtype=float)).reshape(n)


def sample_simplex(d, n, seed):
    """Rows ``E / ||E||_1`` for i.i.d. standard exponentials ``E``."""
    d, n = int(d), int(n)
    if d < 2:
        raise DomainError("sample_simplex requires d >= 2")
    if n < 1:
        raise DomainError("sample_simplex requires n >= 1")
    return SampleMatrix(_simplex_rows(seed, d, n), "simplex", int(seed),
                        {"source": "dirichlet(1)"})


def sample_l1ns(F, d, n, seed):
    """Rows ``R S`` with ``R ~ F`` and ``S`` uniform on the simplex."""
    d, n = int(d), int(n)
    if d < 2:
        raise DomainError("sample_l1ns requires d >= 2")
    if n < 1:
        raise DomainError("sample_l1ns requires n >= 1")
    r = _radii(F, seed, n)
    s = _simplex_rows(seed, d, n)
    return SampleMatrix(r[:, None] * s, "l1ns", int(seed),
                        {"radial": getattr(F, "name", "radial")})


def sample_copula(gen, d, n, seed):
    """Archimedean copula sample ``U_i = psi(X_i)`` from ``X = R S``.

    Raises
    ------
    DomainError
        ``d`` exceeds the generator's claimed ``d_max``.
    """
    F = radial_from_generator(gen, d)
    x = sample_l1ns(F, d, n, seed)
    u = np.clip(gen.eval(x.data), 0.0, 1.0)
    return SampleMatrix(u, "copula", int(seed),
                        {"generator": gen.family, "params": dict(gen.params)})


def write_csv(M, out=None):
    """Write ``M`` as CSV with 17 significant digits and LF line endings.

    Parameters
    ----------
    M : SampleMatrix
    out : path or text stream, optional
        Returns the CSV text when omitted.
    """
    prefix = "u" if M.space == "copula" else "x"
    buf = io.StringIO(newline="")
    buf.write(",".join(f"{prefix}{j + 1}" for j in range(M.d)) + "\n")
    np.savetxt(buf, M.data, fmt="%.17g", delimiter=",", newline="\n")
    text = buf.getvalue()
    if out is None:
        return text
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return None
