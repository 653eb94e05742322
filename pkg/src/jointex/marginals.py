"""Marginal laws on [0, inf) with an explicit atom at zero.

Each marginal is described by ``q0 = P(X > 0)`` and the positive-part
survival curve.  Survival evaluation and the generalized inverse are
vectorized over numpy arrays; scalars go in and come out as floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, JEError

EPS = 1e-12

FAMILIES = ("scaled-uniform", "scaled-exponential", "piecewise-linear", "point-mass-at-zero")


def _scalar_or_array(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return values


@dataclass(frozen=True)
class MarginalSpec:
    """One marginal law.

    Parameters
    ----------
    family : str
        One of ``FAMILIES``.
    q0 : float
        Survival at zero, ``P(X > 0)``.  The atom at zero is ``1 - q0``.
    scale : float, optional
        Support length for ``scaled-uniform``; survival is
        ``q0 * (1 - x / scale)`` on ``[0, scale]``.
    rate : float, optional
        Rate of ``scaled-exponential``; survival is ``q0 * exp(-rate * x)``.
    knots : sequence of (x, survival) pairs, optional
        Breakpoints of ``piecewise-linear``; the first knot is ``(0, q0)``
        and the last has survival 0.
    """

    family: str
    q0: float
    scale: float | None = None
    rate: float | None = None
    knots: tuple[tuple[float, float], ...] | None = None
    _kx: np.ndarray = field(init=False, repr=False, compare=False)
    _ks: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise JEError(f"unknown marginal family {self.family!r}")
        q0 = float(self.q0)
        object.__setattr__(self, "q0", q0)
        if not 0.0 <= q0 <= 1.0:
            raise DomainError(f"q0 must lie in [0, 1], got {q0}")
        kx = ks = np.empty(0)
        if self.family == "scaled-uniform":
            if self.scale is None or not self.scale > 0:
                raise DomainError("scaled-uniform requires scale > 0")
        elif self.family == "scaled-exponential":
            if self.rate is None or not self.rate > 0:
                raise DomainError("scaled-exponential requires rate > 0")
        elif self.family == "piecewise-linear":
            if self.knots is None or len(self.knots) < 2:
                raise DomainError("piecewise-linear requires at least two knots")
            knots = tuple((float(x), float(s)) for x, s in self.knots)
            object.__setattr__(self, "knots", knots)
            kx = np.array([k[0] for k in knots])
            ks = np.array([k[1] for k in knots])
            if kx[0] != 0.0:
                raise DomainError("first knot must sit at x = 0")
            if np.any(np.diff(kx) <= 0):
                raise DomainError("knot abscissae must be strictly increasing")
            if np.any(np.diff(ks) > 0):
                raise DomainError("knot survival values must be non-increasing")
            if abs(ks[0] - q0) > EPS:
                raise DomainError("first knot survival must equal q0")
            if ks[-1] != 0.0:
                raise DomainError("last knot survival must be 0")
        elif q0 != 0.0:
            raise DomainError("point-mass-at-zero requires q0 = 0")
        object.__setattr__(self, "_kx", kx)
        object.__setattr__(self, "_ks", ks)

    # -- convenience constructors -------------------------------------
    @classmethod
    def uniform(cls, q0: float, scale: float = 1.0) -> "MarginalSpec":
        return cls("scaled-uniform", q0, scale=scale)

    @classmethod
    def exponential(cls, q0: float, rate: float = 1.0) -> "MarginalSpec":
        return cls("scaled-exponential", q0, rate=rate)

    @classmethod
    def piecewise(cls, knots: Sequence[tuple[float, float]]) -> "MarginalSpec":
        return cls("piecewise-linear", knots[0][1], knots=tuple(knots))

    @classmethod
    def zero(cls) -> "MarginalSpec":
        return cls("point-mass-at-zero", 0.0)

    @property
    def atom(self) -> float:
        return 1.0 - self.q0

    def upper_support(self) -> float:
        """Smallest x with survival 0 (``inf`` for the exponential family)."""
        if self.family == "scaled-uniform":
            return float(self.scale)
        if self.family == "scaled-exponential":
            return np.inf if self.q0 > 0 else 0.0
        if self.family == "piecewise-linear":
            return float(inverse_survival(self, 0.0))
        return 0.0

    def to_json(self) -> dict:
        out = {"family": self.family, "q0": self.q0}
        if self.family == "scaled-uniform":
            out["scale"] = self.scale
        elif self.family == "scaled-exponential":
            out["rate"] = self.rate
        elif self.family == "piecewise-linear":
            out["knots"] = [list(k) for k in self.knots]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MarginalSpec":
        family = obj.get("family")
        if family == "piecewise-linear":
            knots = tuple(tuple(k) for k in obj["knots"])
            return cls(family, obj.get("q0", knots[0][1]), knots=knots)
        if family == "point-mass-at-zero":
            return cls(family, obj.get("q0", 0.0))
        if "q0" not in obj:
            raise JEError(f"marginal {family!r} needs a q0 field")
        return cls(family, obj["q0"], scale=obj.get("scale"), rate=obj.get("rate"))


def survival(m: MarginalSpec, x):
    """Survival ``P(X > x)`` for ``x >= 0`` (array or scalar)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("survival is defined for x >= 0 only")
    if m.family == "scaled-uniform":
        out = m.q0 * np.clip(1.0 - xa / m.scale, 0.0, 1.0)
    elif m.family == "scaled-exponential":
        out = m.q0 * np.exp(-m.rate * xa)
    elif m.family == "piecewise-linear":
        out = np.interp(xa, m._kx, m._ks, right=0.0)
    else:
        out = np.zeros_like(xa)
    return _scalar_or_array(out, x)


def survival_ext(m: MarginalSpec, x):
    """Survival on the whole real line: 1 below zero, ``survival`` elsewhere."""
    xa = np.asarray(x, dtype=float)
    safe = np.where(xa < 0, 0.0, xa)
    out = np.where(xa < 0, 1.0, survival(m, safe))
    return _scalar_or_array(out, x)


def inverse_survival(m: MarginalSpec, p):
    """Generalized inverse ``inf{x >= 0 : survival(x) <= p}``.

    Flat survival stretches resolve to their left endpoint.  ``p = 0`` on an
    unbounded support returns ``inf``.
    """
    pa = np.asarray(p, dtype=float)
    if np.any((pa < 0) | (pa > 1)) or np.any(np.isnan(pa)):
        raise DomainError("inverse_survival needs p in [0, 1]")
    q0 = m.q0
    at_zero = pa >= q0
    if m.family == "scaled-uniform":
        with np.errstate(divide="ignore", invalid="ignore"):
            out = m.scale * (1.0 - pa / q0)
    elif m.family == "scaled-exponential":
        # Tiny p overflows q0 / p to inf, which is the correct limit.
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = np.log(q0 / pa) / m.rate
    elif m.family == "piecewise-linear":
        out = _piecewise_inverse(m._kx, m._ks, pa)
    else:
        out = np.zeros_like(pa)
    out = np.where(at_zero, 0.0, out)
    return _scalar_or_array(out, p)


def _piecewise_inverse(kx, ks, p):
    # First segment k whose right survival drops to <= p; survival is > p on its left end.
    flat = np.atleast_1d(p)
    right = ks[1:]
    k = np.argmax(right[None, :] <= flat[:, None], axis=1)
    s_left, s_right = ks[k], ks[k + 1]
    x_left, x_right = kx[k], kx[k + 1]
    drop = s_left - s_right
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(drop > 0, (s_left - flat) / drop, 0.0)
    out = x_left + np.clip(frac, 0.0, 1.0) * (x_right - x_left)
    return out.reshape(np.shape(p))


def sample_positive_part(m: MarginalSpec, u):
    """Map uniforms ``u`` in (0, 1] to draws from the law of ``X | X > 0``."""
    if m.q0 <= 0:
        raise JEError("invalid conditional: cannot condition on X > 0 when q0 = 0")
    ua = np.asarray(u, dtype=float)
    if np.any((ua <= 0) | (ua > 1)):
        raise DomainError("sample_positive_part needs u in (0, 1]")
    return inverse_survival(m, np.minimum(ua * m.q0, m.q0))
