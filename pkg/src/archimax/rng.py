"""Counter-based random streams keyed by (seed, name)."""

import os
import zlib

import numpy as np


def substream(seed, *names):
    """Independent Philox generator for ``seed`` and a tuple of names.

    The stream depends only on its key, so chunks can be generated in any
    order or on any number of threads.
    """
    key = tuple(zlib.crc32(str(n).encode("utf-8")) for n in names)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def thread_count():
    """Worker cap from ``ARCHIMAX_THREADS`` (default 1)."""
    raw = os.environ.get("ARCHIMAX_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)
