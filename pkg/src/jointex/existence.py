"""Existence checks for ME, JE and G-JE vectors with given marginals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ExistenceError
from .marginals import EPS, MarginalSpec, survival_ext


@dataclass(frozen=True)
class ExistenceReport:
    kind: str
    feasible: bool
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "feasible": self.feasible,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
        }


def _report(kind, lhs, rhs):
    return ExistenceReport(kind, rhs - lhs >= -EPS, lhs, rhs)


def _q0s(marginals):
    if len(marginals) < 2:
        raise DomainError("need at least two marginals")
    return [m.q0 for m in marginals]


def check_me(marginals: Sequence[MarginalSpec]) -> ExistenceReport:
    """Mutual exclusivity: ``sum q0 <= 1``."""
    return _report("ME", math.fsum(_q0s(marginals)), 1.0)


def check_je(marginals: Sequence[MarginalSpec]) -> ExistenceReport:
    """Joint exclusivity: ``sum q0 <= n - 1``."""
    q0 = _q0s(marginals)
    return _report("JE", math.fsum(q0), float(len(q0) - 1))


def face_capacity_bound(caps: Sequence[float]) -> float:
    """``min{(n-2)/(n-1) * sum(caps), sum(caps) - max(caps)}``.

    The largest weighted face mass any allocation can carry when the face
    loads through index ``i`` are capped by ``caps[i]``.
    """
    n = len(caps)
    total = math.fsum(caps)
    return min((n - 2) / (n - 1) * total, total - max(caps))


def check_gje(marginals: Sequence[MarginalSpec], gstars: Sequence[float]) -> ExistenceReport:
    q0 = _q0s(marginals)
    if len(gstars) != len(q0):
        raise DomainError("one G* value per marginal is required")
    for i, (g, q) in enumerate(zip(gstars, q0)):
        if g < -EPS or g > q + EPS:
            raise DomainError(f"G*_{i + 1} = {g} outside [0, q0_{i + 1}] = [0, {q}]")
    return _report("GJE", math.fsum(q0) - 1.0, face_capacity_bound(list(gstars)))


def me_frechet_cdf(marginals: Sequence[MarginalSpec], x) -> float:
    """Frechet lower bound ``max{sum F_i(x_i) - (n-1), 0}``; the ME joint CDF."""
    rep = check_me(marginals)
    if not rep.feasible:
        raise ExistenceError(f"MEcondition violated: sum q0 = {rep.lhs} > 1")
    xa = np.asarray(x, dtype=float)
    n = len(marginals)
    if xa.shape[-1] != n:
        raise DomainError(f"expected {n} coordinates")
    cdf_sum = sum(1.0 - survival_ext(m, xa[..., i]) for i, m in enumerate(marginals))
    out = np.where(np.any(xa < 0, axis=-1), 0.0, np.maximum(cdf_sum - (n - 1), 0.0))
    return float(out) if xa.ndim == 1 else out
