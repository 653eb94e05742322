"""Copulas attached to the faces of the orthant boundary.

Only independence, comonotone, countermonotone (bivariate) and convex
mixtures of these are built in.  ``cdf`` accepts a single point or a
``(rows, k)`` array; ``sample`` returns a ``(size, k)`` array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, JEError, ShapeError

FAMILIES = ("independence", "comonotone", "countermonotone", "convex-mixture")

# Smallest uniform handed to inverse transforms; keeps draws strictly inside (0, 1).
_TINY = 2.0**-60


@dataclass(frozen=True)
class CopulaSpec:
    family: str
    dimension: int
    components: tuple[tuple[float, "CopulaSpec"], ...] = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise JEError(f"unknown copula family {self.family!r}")
        if int(self.dimension) < 2:
            raise ShapeError("copula dimension must be at least 2")
        if self.family == "countermonotone" and self.dimension != 2:
            raise ShapeError("countermonotone copula exists in dimension 2 only")
        if self.family == "convex-mixture":
            if not self.components:
                raise JEError("convex-mixture needs at least one component")
            weights = np.array([w for w, _ in self.components], dtype=float)
            if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
                raise DomainError("mixture weights must be non-negative and sum to 1")
            if any(c.dimension != self.dimension for _, c in self.components):
                raise ShapeError("mixture components must share the mixture dimension")
        elif self.components:
            raise JEError(f"{self.family} takes no components")

    @classmethod
    def independence(cls, k: int) -> "CopulaSpec":
        return cls("independence", k)

    @classmethod
    def comonotone(cls, k: int) -> "CopulaSpec":
        return cls("comonotone", k)

    @classmethod
    def countermonotone(cls) -> "CopulaSpec":
        return cls("countermonotone", 2)

    @classmethod
    def mixture(cls, parts) -> "CopulaSpec":
        parts = tuple((float(w), c) for w, c in parts)
        return cls("convex-mixture", parts[0][1].dimension, parts)

    def to_json(self) -> dict:
        out = {"family": self.family, "dimension": self.dimension}
        if self.components:
            out["components"] = [{"weight": w, "copula": c.to_json()} for w, c in self.components]
        return out

    @classmethod
    def from_json(cls, obj: dict, dimension: int | None = None) -> "CopulaSpec":
        dim = obj.get("dimension", dimension)
        if dim is None:
            raise ShapeError("copula dimension missing")
        if dimension is not None and dim != dimension:
            raise ShapeError(f"copula dimension {dim} does not match face size {dimension}")
        parts = tuple(
            (float(p["weight"]), cls.from_json(p["copula"], dim)) for p in obj.get("components", ())
        )
        return cls(obj["family"], int(dim), parts)


def copula_cdf(c: CopulaSpec, u):
    """Evaluate ``C(u)``; the last axis of ``u`` indexes coordinates."""
    ua = np.asarray(u, dtype=float)
    if ua.shape[-1] != c.dimension:
        raise ShapeError(f"expected {c.dimension} coordinates, got {ua.shape[-1]}")
    if np.any((ua < 0) | (ua > 1)):
        raise DomainError("copula arguments must lie in [0, 1]")
    if c.family == "independence":
        out = np.prod(ua, axis=-1)
    elif c.family == "comonotone":
        out = np.min(ua, axis=-1)
    elif c.family == "countermonotone":
        out = np.maximum(ua[..., 0] + ua[..., 1] - 1.0, 0.0)
    else:
        out = sum(w * copula_cdf(comp, ua) for w, comp in c.components)
    return float(out) if ua.ndim == 1 else out


def copula_sample(c: CopulaSpec, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Draw ``size`` points with uniform margins and joint CDF ``c``.

    Coordinates lie strictly inside (0, 1).
    """
    k = c.dimension
    if size == 0:
        return np.empty((0, k))
    if c.family == "independence":
        out = rng.random((size, k))
    elif c.family == "comonotone":
        out = np.repeat(rng.random((size, 1)), k, axis=1)
    elif c.family == "countermonotone":
        v = np.maximum(rng.random(size), _TINY)
        out = np.column_stack([v, 1.0 - v])
    else:
        weights = np.array([w for w, _ in c.components])
        pick = np.searchsorted(np.cumsum(weights) / weights.sum(), rng.random(size), side="right")
        pick = np.minimum(pick, len(weights) - 1)
        out = np.empty((size, k))
        for j, (_, comp) in enumerate(c.components):
            rows = np.flatnonzero(pick == j)
            if rows.size:
                out[rows] = copula_sample(comp, rng, rows.size)
    return np.maximum(out, _TINY)
