"""Face enumeration and face-mass allocation.

A face is a sorted tuple of 0-based indices ``I`` with ``2 <= |I| <= n-1``;
``p[I]`` is the probability mass the construction puts on the part of the
orthant boundary where exactly the coordinates in ``I`` are positive.

Two constraint families govern admissible allocations:

* ``JE_parameters_1`` (``G-JE_parameters_1`` with distortions): for every
  index ``i`` the load ``sum_{I contains i} p_I`` is at most ``caps[i]``
  (``caps = q0`` for the canonical construction, ``G*`` otherwise);
* ``JE_parameters_2``: the weighted mass ``sum (|I|-1) p_I`` is at least
  ``sum q0 - 1``, which keeps the origin mass non-negative.

The face-mass linear program maximises the weighted mass under the first
family.  It is solved by a small dense tableau simplex with Bland's rule
and lexicographic tie-breaking, so the returned vertex is reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import CapacityError, ConstraintViolation, DomainError, ExistenceError, InfeasibleAllocationError, UsageError
from .existence import face_capacity_bound
from .marginals import EPS

MAX_LP_DIMENSION = 12
MAX_VERTEX_DIMENSION = 5

Face = tuple[int, ...]


def enumerate_faces(n: int) -> list[Face]:
    """All faces for dimension ``n``, ordered by size then lexicographically."""
    if n < 2:
        raise DomainError("dimension must be at least 2")
    return [I for k in range(2, n) for I in itertools.combinations(range(n), k)]


def face_key(face: Face) -> str:
    """1-based comma-joined label used in JSON, e.g. ``(0, 1) -> "1,2"``."""
    return ",".join(str(i + 1) for i in face)


def parse_face_key(key: str) -> Face:
    try:
        face = tuple(sorted(int(tok) - 1 for tok in key.split(",")))
    except ValueError:
        raise DomainError(f"malformed face key {key!r}") from None
    return face


def closed_form_optimum(caps: Sequence[float]) -> float:
    """Optimal weighted face mass, ``min{(n-2)/(n-1) sum caps, sum caps - max caps}``."""
    caps = [float(c) for c in caps]
    if any(c < 0 or c > 1 for c in caps):
        raise DomainError("caps must lie in [0, 1]")
    return face_capacity_bound(caps)


@lru_cache(maxsize=None)
def _incidence(n: int) -> np.ndarray:
    faces = enumerate_faces(n)
    A = np.zeros((n, len(faces)))
    for k, I in enumerate(faces):
        A[list(I), k] = 1.0
    return A


@dataclass(frozen=True)
class FaceAllocation:
    """Face masses ``p`` for dimension ``n`` with the load caps they were built for."""

    n: int
    p: dict
    caps: tuple[float, ...] | None = None

    def __post_init__(self):
        faces = enumerate_faces(self.n)
        unknown = set(self.p) - set(faces)
        if unknown:
            raise DomainError(f"not faces of dimension {self.n}: {sorted(unknown)}")
        full = {I: float(self.p.get(I, 0.0)) for I in faces}
        for I, v in full.items():
            if v < -EPS or v > 1 + EPS:
                raise DomainError(f"p_{face_key(I)} = {v} outside [0, 1]")
        object.__setattr__(self, "p", full)
        if self.caps is not None:
            object.__setattr__(self, "caps", tuple(float(c) for c in self.caps))

    @property
    def faces(self) -> list[Face]:
        return list(self.p)

    def vector(self) -> np.ndarray:
        return np.array(list(self.p.values()))

    def loads(self) -> np.ndarray:
        """``sum_{I contains i} p_I`` for every index ``i``."""
        if self.n < 3:
            return np.zeros(self.n)
        return np.array([math.fsum(v for I, v in self.p.items() if i in I) for i in range(self.n)])

    def weighted_mass(self) -> float:
        return math.fsum((len(I) - 1) * v for I, v in self.p.items())

    def total(self) -> float:
        return math.fsum(self.p.values())

    def validate(self, q0: Sequence[float], caps: Sequence[float] | None = None, generalized: bool = False):
        """Raise ``ConstraintViolation`` unless both constraint families hold."""
        caps = list(q0) if caps is None else list(caps)
        tag = "G-JE_parameters_1" if generalized else "JE_parameters_1"
        for i, (load, cap) in enumerate(zip(self.loads(), caps)):
            if load > cap + EPS:
                raise ConstraintViolation(
                    tag, f"load {load:.17g} on index {i + 1} exceeds cap {cap:.17g}", index=i
                )
        need = math.fsum(q0) - 1.0
        if self.weighted_mass() < need - EPS:
            raise ConstraintViolation(
                "JE_parameters_2",
                f"weighted face mass {self.weighted_mass():.17g} below sum q0 - 1 = {need:.17g}",
            )
        return self

    def is_feasible(self, q0, caps=None) -> bool:
        try:
            self.validate(q0, caps)
        except ConstraintViolation:
            return False
        return True

    def scaled(self, t: float) -> "FaceAllocation":
        return FaceAllocation(self.n, {I: t * v for I, v in self.p.items()}, self.caps)

    def to_json(self) -> dict:
        out = {"n": self.n, "p": {face_key(I): v for I, v in self.p.items()}}
        if self.caps is not None:
            out["caps"] = list(self.caps)
        out["weighted_mass"] = self.weighted_mass()
        return out

    @classmethod
    def from_json(cls, obj: dict, n: int | None = None) -> "FaceAllocation":
        n = obj.get("n", n)
        p = {parse_face_key(k): float(v) for k, v in obj["p"].items()}
        return cls(int(n), p, obj.get("caps"))


# -- linear program ---------------------------------------------------------

def _lex_simplex(A, b, objectives, tol=1e-12, max_pivots=100_000):
    """Maximise ``objectives`` lexicographically over ``A x <= b, x >= 0`` (``b >= 0``).

    Slack basis start, Bland's rule for entering and leaving variables.
    After each objective, variables with negative reduced cost are frozen
    at zero so later objectives cannot degrade earlier optima.
    """
    m, nf = A.shape
    nv = nf + m
    # Augmented tableau [A | I | b].
    T = np.hstack([A, np.eye(m), np.asarray(b, dtype=float)[:, None]])
    basis = list(range(nf, nv))
    allowed = np.ones(nv, dtype=bool)
    pivots = 0
    for c in objectives:
        c = np.concatenate([np.asarray(c, dtype=float), np.zeros(nv - len(c))])
        while True:
            r = c - c[basis] @ T[:, :nv]
            enter = np.flatnonzero(allowed & (r > tol))
            if enter.size == 0:
                break
            j = enter[0]
            col = T[:, j]
            rows = np.flatnonzero(col > tol)
            if rows.size == 0:
                raise CapacityError("face-mass program is unbounded")
            ratios = T[rows, -1] / col[rows]
            # Ratios live on the scale of the caps, so ties are relative.
            rmin = ratios.min()
            ties = rows[ratios <= rmin + 1e-14 * max(rmin, 1.0)]
            i = min(ties, key=lambda row: basis[row])
            T[i] /= T[i, j]
            others = np.arange(m) != i
            T[others] -= np.outer(T[others, j], T[i])
            T[:, -1] = np.maximum(T[:, -1], 0.0)
            basis[i] = j
            pivots += 1
            if pivots > max_pivots:
                raise CapacityError("simplex pivot limit reached")
        allowed &= r > -tol
        free = allowed.copy()
        free[basis] = False
        if not free.any():
            break
    x = np.zeros(nv)
    x[basis] = T[:, -1]
    return x[:nf]


def _check_caps(caps):
    caps = np.asarray(caps, dtype=float)
    if caps.ndim != 1 or caps.size < 2:
        raise DomainError("caps must be a vector of length >= 2")
    if np.any(caps < 0) or np.any(caps > 1):
        raise DomainError("caps must lie in [0, 1]")
    return caps


def lp_max_weighted_mass(caps: Sequence[float], tie_break: str = "full") -> tuple[float, FaceAllocation]:
    """Maximise ``sum (|I|-1) p_I`` subject to ``p >= 0`` and loads ``<= caps``.

    Parameters
    ----------
    caps : sequence of float
        Per-index load caps in [0, 1].
    tie_break : {"full", "sum", "none"}
        Among optimal vertices prefer the largest total mass ``sum p_I``
        (``"sum"``), then the lexicographically largest ``p`` in face order,
        i.e. mass on earlier faces first (``"full"``).  ``"none"`` stops at
        the first optimal vertex.

    Returns
    -------
    value : float
        Optimal weighted face mass.
    allocation : FaceAllocation
        An optimal ``p``.
    """
    caps = _check_caps(caps)
    n = caps.size
    if n > MAX_LP_DIMENSION:
        raise CapacityError(f"n = {n} exceeds the supported maximum {MAX_LP_DIMENSION}")
    faces = enumerate_faces(n)
    if not faces:
        return 0.0, FaceAllocation(n, {}, tuple(caps))
    A = _incidence(n)
    weights = np.array([len(I) - 1 for I in faces], dtype=float)
    objectives = [weights]
    if tie_break in ("sum", "full"):
        objectives.append(np.ones(len(faces)))
    if tie_break == "full":
        objectives.extend(np.eye(len(faces)))
    elif tie_break not in ("sum", "none"):
        raise UsageError(f"unknown tie_break {tie_break!r}")
    x = _lex_simplex(A, caps, objectives)
    alloc = FaceAllocation(n, dict(zip(faces, x)), tuple(caps))
    return alloc.weighted_mass(), alloc


@lru_cache(maxsize=None)
def dual_vertices(n: int) -> np.ndarray:
    """All vertices of ``{r >= 0 : sum_{i in I} r_i >= |I| - 1 for every face I}``.

    Brute force: every choice of ``n`` constraints taken as equalities is
    solved and kept when the solution is feasible.  Rows are unique up to
    ``1e-9``.
    """
    if n < 2 or n > MAX_VERTEX_DIMENSION:
        raise CapacityError(f"vertex enumeration supports 2 <= n <= {MAX_VERTEX_DIMENSION}")
    faces = enumerate_faces(n)
    G = np.vstack([np.eye(n), _incidence(n).T]) if faces else np.eye(n)
    h = np.concatenate([np.zeros(n), [len(I) - 1 for I in faces]])
    combos = np.array(list(itertools.combinations(range(len(h)), n)))
    mats = G[combos]
    rhs = h[combos]
    keep = np.abs(np.linalg.det(mats)) > 1e-9
    sols = np.linalg.solve(mats[keep], rhs[keep][..., None])[..., 0]
    feasible = np.all(sols @ G.T >= h - 1e-9, axis=1)
    verts = sols[feasible]
    _, first = np.unique(np.round(verts, 9), axis=0, return_index=True)
    return verts[np.sort(first)]


def dual_vertex_optimum(caps: Sequence[float]) -> float:
    """Minimum of ``sum caps_i r_i`` over the dual vertices (independent of the simplex)."""
    caps = _check_caps(caps)
    return float(np.min(dual_vertices(caps.size) @ caps))


def _existence_guard(q0, caps, generalized):
    need = math.fsum(q0) - 1.0
    bound = face_capacity_bound(list(caps))
    if need > bound + EPS:
        tag = "G-JECondition" if generalized else "JECondition"
        raise ExistenceError(
            f"{tag} violated: sum q0 - 1 = {need:.17g} exceeds the attainable weighted face mass {bound:.17g}"
        )
    return need, bound


def trivariate_lambda_bounds(q0: Sequence[float], caps: Sequence[float] | None = None) -> tuple[float, float]:
    """Admissible interval for the one-parameter trivariate family.

    With ``U_I = min_{i in I} caps_i`` and
    ``L_I = max{sum q0 - caps_j - 1, 0}`` (``j`` the index outside ``I``),
    returns the interval of ``lam`` for which ``lam U + (1 - lam) L`` is
    feasible.  For ``caps = q0`` ``L_I`` reduces to
    ``max{q0_i + q0_k - 1, 0}``.
    """
    q0 = [float(v) for v in q0]
    generalized = caps is not None
    caps = list(q0) if caps is None else [float(v) for v in caps]
    if len(q0) != 3 or len(caps) != 3:
        raise UsageError("the lambda family is defined for n = 3 only")
    need, _ = _existence_guard(q0, caps, generalized)
    U, L = _trivariate_ends(q0, caps)
    faces = list(U)

    def ratio(num, den, empty):
        if den > EPS:
            return num / den
        # Degenerate direction: the constraint does not involve lambda.
        return empty if num >= -EPS else -empty

    lo = max(ratio(need - math.fsum(L.values()), math.fsum(U[I] - L[I] for I in faces), -math.inf), 0.0)
    hi = 1.0
    for i in range(3):
        touching = [I for I in faces if i in I]
        num = caps[i] - math.fsum(L[I] for I in touching)
        den = math.fsum(U[I] - L[I] for I in touching)
        hi = min(hi, ratio(num, den, math.inf))
    if lo > hi + EPS:
        raise ExistenceError(f"empty lambda interval [{lo}, {hi}]")
    return lo, hi


def _trivariate_ends(q0, caps):
    total = math.fsum(q0)
    U, L = {}, {}
    for I in enumerate_faces(3):
        (j,) = set(range(3)) - set(I)
        U[I] = min(caps[i] for i in I)
        L[I] = max(total - caps[j] - 1.0, 0.0)
    return U, L


def trivariate_allocation(q0: Sequence[float], caps: Sequence[float] | None, lam: float) -> FaceAllocation:
    """``p_I = lam * U_I + (1 - lam) * L_I`` for ``lam`` inside the admissible interval."""
    q0 = [float(v) for v in q0]
    generalized = caps is not None
    caps_eff = list(q0) if caps is None else [float(v) for v in caps]
    lo, hi = trivariate_lambda_bounds(q0, caps)
    if not lo - EPS <= lam <= hi + EPS:
        tag = "G-JE_trivariate_lambda" if generalized else "JE_trivariate_lambda"
        raise ConstraintViolation(tag, f"lambda = {lam} outside the admissible interval [{lo:.17g}, {hi:.17g}]")
    U, L = _trivariate_ends(q0, caps_eff)
    alloc = FaceAllocation(3, {I: lam * U[I] + (1.0 - lam) * L[I] for I in U}, tuple(caps_eff))
    return alloc.validate(q0, caps_eff, generalized)


def axes_free_coefficients(q0: Sequence[float]) -> dict:
    """Trivariate face masses that leave every axis empty: ``max{(q0_i + q0_k - q0_j)/2, 0}``."""
    q0 = [float(v) for v in q0]
    if len(q0) != 3:
        raise UsageError("the axes-free solution is defined for n = 3 only")
    out = {}
    for I in enumerate_faces(3):
        (j,) = set(range(3)) - set(I)
        out[I] = max((math.fsum(q0[i] for i in I) - q0[j]) / 2.0, 0.0)
    return out


def axes_free_trivariate(q0: Sequence[float]) -> FaceAllocation:
    alloc = FaceAllocation(3, axes_free_coefficients(q0), tuple(float(v) for v in q0))
    try:
        alloc.validate(q0)
    except ConstraintViolation as exc:
        raise InfeasibleAllocationError(exc.constraint, str(exc), allocation=alloc, index=exc.index) from None
    return alloc


STRATEGIES = ("max-face-mass", "scaled", "trivariate-lambda", "axes-free")


def feasible_allocation(
    q0: Sequence[float],
    caps: Sequence[float] | None = None,
    strategy: str = "max-face-mass",
    *,
    t: float | None = None,
    lam: float | None = None,
) -> FaceAllocation:
    """Produce a feasible allocation for marginals with survival-at-zero ``q0``.

    ``caps`` defaults to ``q0`` (canonical construction); pass the ``G*``
    values for a distorted model.  Strategies: ``"max-face-mass"`` (the LP
    maximiser), ``"scaled"`` (``t`` times the maximiser, ``t`` in
    ``[t_min, 1]``), ``"trivariate-lambda"`` (``n = 3``, needs ``lam``) and
    ``"axes-free"`` (``n = 3``, canonical only).
    """
    q0 = [float(v) for v in q0]
    generalized = caps is not None
    caps_eff = list(q0) if caps is None else [float(v) for v in caps]
    if len(caps_eff) != len(q0):
        raise DomainError("caps and q0 differ in length")
    if strategy not in STRATEGIES:
        raise UsageError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")
    need, _ = _existence_guard(q0, caps_eff, generalized)
    if strategy in ("trivariate-lambda", "axes-free") and len(q0) != 3:
        raise UsageError(f"strategy {strategy!r} requires n = 3")
    if strategy == "trivariate-lambda":
        if lam is None:
            raise UsageError("trivariate-lambda needs a lambda value")
        return trivariate_allocation(q0, caps, lam)
    if strategy == "axes-free":
        if generalized:
            raise UsageError("axes-free is defined for the canonical construction only")
        return axes_free_trivariate(q0)
    value, best = lp_max_weighted_mass(caps_eff)
    if strategy == "max-face-mass":
        return best.validate(q0, caps_eff, generalized)
    if t is None:
        raise UsageError("scaled strategy needs t")
    t_min = scaled_t_min(q0, value)
    if t < t_min - EPS or t > 1 + EPS:
        raise ConstraintViolation("JE_parameters_2", f"t = {t} outside [t_min, 1] = [{t_min:.17g}, 1]")
    return best.scaled(t).validate(q0, caps_eff, generalized)


def scaled_t_min(q0: Sequence[float], value: float) -> float:
    need = max(math.fsum(q0) - 1.0, 0.0)
    return need / value if value > 0 else 0.0
