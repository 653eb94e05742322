"""Marginal distortions ``G`` and their modulus ``G*``.

A distortion maps the survival scale ``[0, 1]`` to ``[0, 1]``: it is 0 on
``[0, a]``, 1 on ``[b, 1]`` and non-decreasing, left-continuous between.
``G*`` is the infimum of ``(S(x) - S(y)) / (G(S(x)) - G(S(y)))`` over
``0 <= x < y`` with a non-zero denominator, where ``S`` is the marginal
survival; it caps the face load through that marginal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, JEError, PairingError
from .marginals import EPS, MarginalSpec, inverse_survival

FAMILIES = ("identity-canonical", "linear-truncation", "power", "tabulated")

GRID_SIZE = 1000
REFINE_ROUNDS = 12


@dataclass(frozen=True)
class DistortionSpec:
    """Distortion parameters.

    ``identity-canonical`` stores ``b = q0`` of its marginal and evaluates
    ``u / q0``.  ``tabulated`` takes ``knots`` ``(u, G)`` interpolated
    linearly; a repeated ``u`` encodes a jump, and the value at the jump is
    the left limit.
    """

    family: str
    a: float = 0.0
    b: float = 1.0
    gamma: float = 1.0
    knots: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise JEError(f"unknown distortion family {self.family!r}")
        if self.family == "tabulated":
            if not self.knots or len(self.knots) < 2:
                raise DomainError("tabulated distortion needs at least two knots")
            knots = tuple((float(u), float(g)) for u, g in self.knots)
            us = np.array([k[0] for k in knots])
            gs = np.array([k[1] for k in knots])
            if np.any(np.diff(us) < 0) or np.any(np.diff(gs) < 0):
                raise DomainError("tabulated knots must be non-decreasing in u and G")
            if gs[0] != 0.0 or gs[-1] != 1.0:
                raise DomainError("tabulated distortion must run from 0 to 1")
            object.__setattr__(self, "knots", knots)
            object.__setattr__(self, "a", float(us[0]))
            object.__setattr__(self, "b", float(us[-1]))
        if self.family == "identity-canonical":
            object.__setattr__(self, "a", 0.0)
        if not 0.0 <= self.a < self.b <= 1.0:
            raise DomainError(f"need 0 <= a < b <= 1, got a={self.a}, b={self.b}")
        if self.family == "power" and not self.gamma > 0:
            raise DomainError("power distortion needs gamma > 0")

    @classmethod
    def identity(cls, q0: float) -> "DistortionSpec":
        return cls("identity-canonical", 0.0, q0)

    @classmethod
    def linear(cls, a: float, b: float) -> "DistortionSpec":
        return cls("linear-truncation", a, b)

    @classmethod
    def power(cls, a: float, b: float, gamma: float) -> "DistortionSpec":
        return cls("power", a, b, gamma)

    @classmethod
    def tabulated(cls, knots: Sequence[tuple[float, float]]) -> "DistortionSpec":
        return cls("tabulated", knots=tuple(knots))

    def to_json(self) -> dict:
        out = {"family": self.family, "a": self.a, "b": self.b}
        if self.family == "power":
            out["gamma"] = self.gamma
        if self.family == "tabulated":
            out["knots"] = [list(k) for k in self.knots]
        return out

    @classmethod
    def from_json(cls, obj: dict, marginal: MarginalSpec | None = None) -> "DistortionSpec":
        family = obj["family"]
        if family == "identity-canonical":
            if marginal is None and "b" not in obj:
                raise JEError("identity-canonical distortion needs its marginal's q0")
            return cls.identity(obj.get("b", marginal.q0 if marginal else None))
        if family == "tabulated":
            return cls.tabulated([tuple(k) for k in obj["knots"]])
        return cls(family, float(obj["a"]), float(obj["b"]), float(obj.get("gamma", 1.0)))


def distort(g: DistortionSpec, u):
    """Evaluate ``G(u)`` for ``u`` in [0, 1]."""
    ua = np.asarray(u, dtype=float)
    if g.family == "tabulated":
        out = _tabulated(g, ua)
    else:
        z = np.clip((ua - g.a) / (g.b - g.a), 0.0, 1.0)
        out = z**g.gamma if g.family == "power" else z
    return float(out) if np.ndim(u) == 0 else out


def _tabulated(g, u):
    us = np.array([k[0] for k in g.knots])
    gs = np.array([k[1] for k in g.knots])
    flat = np.atleast_1d(u)
    # Left-continuity: at a repeated abscissa take the first (left) value.
    idx = np.searchsorted(us, flat, side="left")
    idx = np.clip(idx, 1, len(us) - 1)
    u0, u1 = us[idx - 1], us[idx]
    g0, g1 = gs[idx - 1], gs[idx]
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(u1 > u0, (flat - u0) / (u1 - u0), 1.0)
    out = g0 + np.clip(frac, 0.0, 1.0) * (g1 - g0)
    exact = np.searchsorted(us, flat, side="left")
    hit = (exact < len(us)) & (us[np.minimum(exact, len(us) - 1)] == flat)
    out = np.where(hit, gs[np.minimum(exact, len(us) - 1)], out)
    out = np.where(flat <= us[0], 0.0, np.where(flat > us[-1], 1.0, out))
    return out.reshape(np.shape(u))


def upper_inverse(g: DistortionSpec, v):
    """``sup{u in [0, 1] : G(u) <= v}``.

    Left-continuity makes ``{u : G(u) <= v}`` the closed interval ``[0, w]``.
    """
    va = np.asarray(v, dtype=float)
    if g.family in ("identity-canonical", "linear-truncation", "power"):
        z = np.clip(va, 0.0, 1.0)
        if g.family == "power":
            z = z ** (1.0 / g.gamma)
        out = np.where(va >= 1.0, 1.0, g.a + z * (g.b - g.a))
    else:
        us = np.array([k[0] for k in g.knots])
        gs = np.array([k[1] for k in g.knots])
        flat = np.atleast_1d(va)
        # Last knot with G <= v, then walk to the right along the next segment.
        k = np.searchsorted(gs, flat, side="right") - 1
        k = np.clip(k, 0, len(us) - 1)
        nxt = np.minimum(k + 1, len(us) - 1)
        rise = gs[nxt] - gs[k]
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(rise > 0, (flat - gs[k]) / rise, 0.0)
        out = us[k] + np.clip(frac, 0.0, 1.0) * (us[nxt] - us[k])
        out = np.where(flat >= 1.0, 1.0, out).reshape(np.shape(va))
    return float(out) if np.ndim(v) == 0 else out


def _check_pair(g, m):
    if g.b > m.q0 + EPS:
        raise PairingError(f"distortion b = {g.b} exceeds the marginal's q0 = {m.q0}")


def survival_range(m: MarginalSpec) -> tuple[float, float]:
    """Closure of the set of survival values the marginal attains on ``[0, inf)``.

    Every built-in family has a continuous survival on ``[0, inf)``, so the
    attained set is an interval from ``lo`` (0 or its infimum) to ``q0``.
    """
    return 0.0, m.q0


def g_star(g: DistortionSpec, m: MarginalSpec, method: str = "auto") -> float:
    """Modulus ``G*`` of distortion ``g`` paired with marginal ``m``.

    ``method="auto"`` uses the closed forms of the built-in families and
    falls back to the grid search for ``tabulated``; ``method="numeric"``
    forces the grid search.
    """
    _check_pair(g, m)
    lo, hi = survival_range(m)
    if hi <= lo:
        return 0.0
    if method == "auto":
        # Survival sweeps all of (lo, q0] continuously, so values in [a, b) and near b, a are attained.
        if g.family == "identity-canonical":
            return m.q0
        if g.family == "linear-truncation":
            return g.b - g.a
        if g.family == "power":
            if g.gamma >= 1.0:
                return (g.b - g.a) / g.gamma
            return 0.0
        if any(lo <= u < hi for u in _jump_points(g)):
            # A jump of G where the survival is continuous drives the ratio to 0.
            return 0.0
    elif method != "numeric":
        raise JEError(f"unknown g_star method {method!r}")
    return _g_star_numeric(g, lo, hi)


def _jump_points(g):
    us = [k[0] for k in g.knots]
    gs = [k[1] for k in g.knots]
    return [us[k] for k in range(len(us) - 1) if us[k] == us[k + 1] and gs[k + 1] > gs[k]]


def _pair_ratios(g, v):
    gv = distort(g, v)
    dv = v[:, None] - v[None, :]
    dg = gv[:, None] - gv[None, :]
    mask = (dv > 0) & (dg > EPS)
    ratio = np.full(dv.shape, np.inf)
    ratio[mask] = dv[mask] / dg[mask]
    k = np.argmin(ratio)
    i, j = np.unravel_index(k, ratio.shape)
    return ratio[i, j], v[j], v[i]


def _g_star_numeric(g, lo, hi, size=GRID_SIZE, rounds=REFINE_ROUNDS):
    """Grid infimum over attained survival values with zoom refinement.

    The best pair of the coarse grid is re-gridded on a window one cell
    wider on each side, so steep spots of ``G`` (derivative maxima near
    ``b``, cusps near ``a``, jumps) are resolved.  Windows narrower than
    ``1e-7 * q0`` are not refined further; below that the differences lose
    too many digits to cancellation.
    """
    v = np.linspace(lo, hi, size)
    best, vlo, vhi = _pair_ratios(g, v)
    if not np.isfinite(best):
        return hi
    min_width = 1e-7 * hi
    for _ in range(rounds):
        h = vhi - vlo
        left, right = max(lo, vlo - h), min(hi, vhi + h)
        if right - left < min_width:
            break
        cand, clo, chi = _pair_ratios(g, np.linspace(left, right, size))
        if cand >= best:
            break
        best, vlo, vhi = cand, clo, chi
    return float(min(best, hi))


def inverse_distorted_survival(g: DistortionSpec, m: MarginalSpec, v):
    """``inf{x >= 0 : G(S(x)) <= v}`` for the marginal survival ``S``."""
    va = np.asarray(v, dtype=float)
    if np.any((va < 0) | (va > 1)):
        raise DomainError("v must lie in [0, 1]")
    w = np.minimum(upper_inverse(g, va), m.q0)
    out = inverse_survival(m, w)
    return float(out) if np.ndim(v) == 0 else out
