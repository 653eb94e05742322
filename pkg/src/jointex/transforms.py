"""Support maps between jointly exclusive and jointly mixable vectors.

``je_to_jm`` centres a point of ``W_JE`` (non-negative, some coordinate 0)
onto the zero-sum hyperplane ``W_JM``; ``jm_to_je`` shifts a zero-sum point
so its minimum is 0.  Both work row-wise on ``(rows, n)`` arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import MembershipError, ShapeError

MEMBERSHIP_TOL = 1e-9


def _as_rows(x):
    xa = np.asarray(x, dtype=float)
    if xa.ndim not in (1, 2):
        raise ShapeError("expected a point or a (rows, n) array")
    return xa


def je_to_jm(x, tol: float = MEMBERSHIP_TOL):
    xa = _as_rows(x)
    mins = xa.min(axis=-1)
    if np.any(np.abs(mins) > tol) or np.any(xa < -tol):
        raise MembershipError("point is not in W_JE: coordinates must be >= 0 with minimum 0")
    return xa - xa.mean(axis=-1, keepdims=True)


def jm_to_je(y, tol: float = MEMBERSHIP_TOL):
    ya = _as_rows(y)
    if np.any(np.abs(ya.sum(axis=-1)) > tol):
        raise MembershipError("point is not in W_JM: coordinates must sum to 0")
    return ya - ya.min(axis=-1, keepdims=True)


def reflect(x):
    """Coordinate-wise negation (JE from below <-> JE from above)."""
    return -_as_rows(x)


def translate(x, shift):
    xa = _as_rows(x)
    shift = np.asarray(shift, dtype=float)
    if shift.shape != (xa.shape[-1],):
        raise ShapeError(f"shift needs {xa.shape[-1]} entries, got {shift.size}")
    return xa + shift


def exceedance_sum(rows, levels) -> float:
    """``sum_i P(Y_i > l_i)`` estimated from rows; at most ``n - 1`` for translated JE rows."""
    rows = _as_rows(rows)
    return float(np.sum(np.mean(rows > np.asarray(levels, dtype=float), axis=0)))
