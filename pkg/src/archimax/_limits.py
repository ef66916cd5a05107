"""Convergence diagnostics for sequences along geometric grids."""

import math

import numpy as np

WINDOW = 20
LAST = 5
OSC_TOL = 1e-3
VAR_TOL = 1e-6
RAPID = 60.0


def assess(values, allow_rapid=False):
    """Decide whether a sequence of local estimates has converged.

    Parameters
    ----------
    values : sequence of float
        Estimates ordered toward the limit.
    allow_rapid : bool
        Report ``inf`` when the estimates exceed 60 and keep growing.

    Returns
    -------
    dict
        ``limit`` (float or None), ``converged``, ``oscillation``,
        ``last_variation``, ``rapid``, ``estimate`` (last finite value).
    """
    v = np.asarray(values, dtype=float)
    out = {"limit": None, "converged": False, "oscillation": float("nan"),
           "last_variation": float("nan"), "rapid": False, "estimate": None}
    finite = np.isfinite(v)
    if not np.all(finite):
        k = int(np.argmin(finite))
        head = v[:k]
        grows = head.size == 0 or head[-1] > RAPID or (
            head.size >= 2 and np.all(np.diff(head[-LAST:]) > 0))
        if allow_rapid and np.isposinf(v[k]) and grows:
            out.update(limit=math.inf, converged=True, rapid=True, estimate=math.inf)
            return out
        # evaluation failure before the end of the grid
        if head.size:
            out["estimate"] = float(head[-1])
        return out
    if v.size < LAST:
        return out
    out["estimate"] = float(v[-1])
    win = v[-WINDOW:]
    out["oscillation"] = float(win.max() - win.min())
    tail = v[-LAST:]
    out["last_variation"] = float(tail.max() - tail.min())
    if allow_rapid and tail[-1] > RAPID and np.all(np.diff(tail) > 0):
        out.update(limit=math.inf, converged=True, rapid=True)
        return out
    rel = out["last_variation"] / max(1.0, abs(float(tail[-1])))
    if out["oscillation"] <= OSC_TOL and rel < VAR_TOL:
        out.update(limit=float(tail[-1]), converged=True)
    return out
