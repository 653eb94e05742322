"""Assembled JE / G-JE models: validation, sampling, CDF and statistics.

The support of a model splits into disjoint regions, always enumerated in
the same order: every face (in ``enumerate_faces`` order), then the axes
``1..n``, then the origin.  Sampling draws one uniform per row against the
cumulative region masses in that order, then fills the active coordinates
of each region block by block, so a seed fixes every draw.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .allocation import Face, FaceAllocation, enumerate_faces, face_key
from .copulas import CopulaSpec, copula_cdf, copula_sample
from .distortions import DistortionSpec, distort, g_star, inverse_distorted_survival
from .errors import ConstraintViolation, ExistenceError, ShapeError, UndefinedCorrelationError
from .existence import check_gje, check_je, check_me
from .marginals import EPS, MarginalSpec, inverse_survival, sample_positive_part, survival

DEFAULT_MC_COUNT = 1_000_000
_TINY = 2.0**-60
_BISECT_STEPS = 64


def make_rng(seed: int | None = None) -> np.random.Generator:
    """PCG64 generator; the package-wide reproducible random stream."""
    return np.random.Generator(np.random.PCG64(seed))


def region_label(region) -> str:
    if region == "origin":
        return "origin"
    if isinstance(region, int):
        return f"axis:{region + 1}"
    return "face:" + "+".join(str(i + 1) for i in region)


@dataclass(frozen=True)
class JEModel:
    marginals: tuple[MarginalSpec, ...]
    allocation: FaceAllocation
    copulas: Mapping[Face, CopulaSpec]
    distortions: Mapping[int, DistortionSpec] | None
    caps: tuple[float, ...]
    axis_mass: tuple[float, ...]
    origin_mass: float
    regions: tuple = field(init=False, repr=False)

    def __post_init__(self):
        regions = tuple(self.allocation.faces) + tuple(range(self.n)) + ("origin",)
        object.__setattr__(self, "regions", regions)

    @property
    def n(self) -> int:
        return len(self.marginals)

    @property
    def q0(self) -> tuple[float, ...]:
        return tuple(m.q0 for m in self.marginals)

    @property
    def generalized(self) -> bool:
        return bool(self.distortions)

    def region_mass_vector(self) -> np.ndarray:
        p = list(self.allocation.p.values())
        return np.array(p + list(self.axis_mass) + [self.origin_mass])

    def face_scale(self, i: int, x):
        """Per-coordinate copula argument on faces: ``S_i(x)/q0_i`` or ``G_i(S_i(x))``."""
        m = self.marginals[i]
        s = survival(m, x)
        g = (self.distortions or {}).get(i)
        if g is not None:
            return distort(g, s)
        if m.q0 <= 0:
            return np.zeros_like(s) if np.ndim(s) else 0.0
        return np.minimum(s / m.q0, 1.0)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "kind": "G-JE" if self.generalized else "JE",
            "marginals": [m.to_json() for m in self.marginals],
            "allocation": self.allocation.to_json(),
            "copulas": {face_key(I): c.to_json() for I, c in self.copulas.items()},
            "caps": list(self.caps),
            "axis_mass": list(self.axis_mass),
            "origin_mass": self.origin_mass,
            "region_masses": region_masses(self),
        }
        if self.distortions:
            out["distortions"] = {str(i + 1): g.to_json() for i, g in sorted(self.distortions.items())}
        return out


def model_caps(marginals: Sequence[MarginalSpec], distortions: Mapping[int, DistortionSpec] | None):
    """Load caps: ``q0_i`` for undistorted indices, ``G*_i`` otherwise."""
    distortions = distortions or {}
    return tuple(
        g_star(distortions[i], m) if i in distortions else m.q0 for i, m in enumerate(marginals)
    )


def build_model(
    marginals: Sequence[MarginalSpec],
    allocation: FaceAllocation,
    copulas: Mapping[Face, CopulaSpec] | None = None,
    distortions: Mapping[int, DistortionSpec] | None = None,
) -> JEModel:
    """Validate the pieces and derive the axis and origin masses.

    Faces without an explicit copula get the independence copula.  Raises
    ``ConstraintViolation`` tagged ``JE_parameters_1`` (or
    ``G-JE_parameters_1``) naming the offending index when an axis mass
    would be negative, and ``JE_parameters_2`` when the origin mass would be.
    """
    marginals = tuple(marginals)
    n = len(marginals)
    if allocation.n != n:
        raise ShapeError(f"allocation is for n = {allocation.n}, marginals give n = {n}")
    distortions = dict(distortions or {})
    for i in distortions:
        if not 0 <= i < n:
            raise ShapeError(f"distortion index {i + 1} out of range")
    faces = enumerate_faces(n)
    chosen = dict(copulas or {})
    for I in chosen:
        if I not in faces:
            raise ShapeError(f"copula given for non-face {face_key(I)}")
    full = {}
    for I in faces:
        c = chosen.get(I, CopulaSpec.independence(len(I)))
        if c.dimension != len(I):
            raise ShapeError(f"copula on face {face_key(I)} has dimension {c.dimension}, face has {len(I)}")
        full[I] = c

    q0 = [m.q0 for m in marginals]
    caps = model_caps(marginals, distortions)
    if distortions:
        rep = check_gje(marginals, caps)
        tag = "G-JECondition"
    else:
        rep = check_je(marginals)
        tag = "JECondition"
    if not rep.feasible:
        raise ExistenceError(f"{tag} violated: lhs {rep.lhs:.17g} > rhs {rep.rhs:.17g}")

    loads = allocation.loads()
    cap_tag = "G-JE_parameters_1" if distortions else "JE_parameters_1"
    for i in range(n):
        if loads[i] > caps[i] + EPS:
            raise ConstraintViolation(
                cap_tag, f"face load {loads[i]:.17g} through index {i + 1} exceeds {caps[i]:.17g}", index=i
            )
    axis = tuple(float(q0[i] - loads[i]) for i in range(n))
    origin = 1.0 - math.fsum(q0) + allocation.weighted_mass()
    if origin < -EPS:
        raise ConstraintViolation("JE_parameters_2", f"origin mass {origin:.17g} is negative")
    alloc = FaceAllocation(n, allocation.p, caps)
    return JEModel(marginals, alloc, full, distortions or None, tuple(caps), axis, origin)


def me_model(marginals: Sequence[MarginalSpec]) -> JEModel:
    """The mutually exclusive model: no face mass at all."""
    rep = check_me(marginals)
    if not rep.feasible:
        raise ExistenceError(f"MEcondition violated: sum q0 = {rep.lhs:.17g} > 1")
    n = len(marginals)
    return build_model(marginals, FaceAllocation(n, {}, tuple(m.q0 for m in marginals)))


def region_masses(model: JEModel) -> dict[str, float]:
    return {region_label(r): float(v) for r, v in zip(model.regions, model.region_mass_vector())}


# -- sampling -----------------------------------------------------------------

@dataclass
class SampleBatch:
    """Sampled rows and the index of the region each row was drawn from."""

    rows: np.ndarray
    region: np.ndarray
    regions: tuple

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def __len__(self) -> int:
        return self.rows.shape[0]

    def labels(self) -> list[str]:
        names = [region_label(r) for r in self.regions]
        return [names[k] for k in self.region]

    def region_indicator(self) -> np.ndarray:
        """Boolean ``(rows, n)`` mask of the coordinates each row's region makes positive."""
        table = np.zeros((len(self.regions), self.n), dtype=bool)
        for k, r in enumerate(self.regions):
            if r == "origin":
                continue
            table[k, list(r) if isinstance(r, tuple) else [r]] = True
        return table[self.region]


def _face_inverse(model: JEModel, i: int, u):
    g = (model.distortions or {}).get(i)
    if g is None:
        return inverse_survival(model.marginals[i], u * model.marginals[i].q0)
    return inverse_distorted_survival(g, model.marginals[i], u)


def _axis_inverse(model: JEModel, i: int, v):
    """Inverse of the axis conditional survival ``(S - load * G(S)) / (q0 - load)``."""
    m = model.marginals[i]
    g = (model.distortions or {}).get(i)
    if g is None:
        return sample_positive_part(m, v)
    load = m.q0 - model.axis_mass[i]
    denom = model.axis_mass[i]

    def h(u):
        return (u - load * distort(g, u)) / denom

    lo = np.zeros_like(v)
    hi = np.full_like(v, m.q0)
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        below = h(mid) <= v
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return inverse_survival(m, lo)


def sample(model: JEModel, rng: np.random.Generator, count: int) -> SampleBatch:
    """Draw ``count`` rows; coordinates outside the drawn region are exactly 0."""
    if count < 1:
        raise ValueError("count must be at least 1")
    masses = np.maximum(model.region_mass_vector(), 0.0)
    cum = np.cumsum(masses)
    cum /= cum[-1]
    code = np.searchsorted(cum, rng.random(count), side="right")
    code = np.minimum(code, len(masses) - 1)
    rows = np.zeros((count, model.n))
    for k, r in enumerate(model.regions):
        idx = np.flatnonzero(code == k)
        if idx.size == 0 or r == "origin":
            continue
        if isinstance(r, tuple):
            U = copula_sample(model.copulas[r], rng, idx.size)
            for pos, i in enumerate(r):
                rows[idx, i] = _face_inverse(model, i, U[:, pos])
        else:
            v = np.maximum(rng.random(idx.size), _TINY)
            rows[idx, r] = _axis_inverse(model, r, v)
    return SampleBatch(rows, code, model.regions)


def sample_independent(marginals: Sequence[MarginalSpec], rng: np.random.Generator, count: int) -> np.ndarray:
    """Control coupling: the same marginals drawn independently."""
    cols = []
    for m in marginals:
        positive = rng.random(count) < m.q0
        x = np.zeros(count)
        if m.q0 > 0 and positive.any():
            x[positive] = sample_positive_part(m, np.maximum(rng.random(int(positive.sum())), _TINY))
        cols.append(x)
    return np.column_stack(cols)


# -- distribution function ----------------------------------------------------

def cdf(model: JEModel, x):
    """Joint CDF by inclusion-exclusion over the faces.

    ``1 - sum_i S_i(x_i) + sum_J p_J sum_{I subset J, |I| >= 2} (-1)^|I| C_J(s_I; 1)``
    where ``s_i`` is the face scale of coordinate ``i``.  Returns 0 when any
    coordinate is negative.
    """
    xa = np.asarray(x, dtype=float)
    if xa.shape[-1] != model.n:
        raise ShapeError(f"expected {model.n} coordinates")
    pts = xa.reshape(-1, model.n)
    negative = np.any(pts < 0, axis=1)
    safe = np.where(pts < 0, 0.0, pts)
    S = np.column_stack([survival(m, safe[:, i]) for i, m in enumerate(model.marginals)])
    s = np.column_stack([model.face_scale(i, safe[:, i]) for i in range(model.n)])
    total = 1.0 - S.sum(axis=1)
    for J, pJ in model.allocation.p.items():
        if pJ == 0.0:
            continue
        C = model.copulas[J]
        for size in range(2, len(J) + 1):
            for I in itertools.combinations(range(len(J)), size):
                args = np.ones((pts.shape[0], len(J)))
                for pos in I:
                    args[:, pos] = s[:, J[pos]]
                total = total + (-1) ** size * pJ * copula_cdf(C, args)
    out = np.where(negative, 0.0, np.clip(total, 0.0, 1.0))
    # Only the origin region lies in [0, 0]; return its mass without round-off.
    out = np.where(np.all(pts == 0.0, axis=1), model.origin_mass, out)
    out = out.reshape(xa.shape[:-1])
    return float(out) if xa.ndim == 1 else out


# -- Monte Carlo statistics -----------------------------------------------------

def _rows(model, rng, mc_count):
    return sample(model, rng if rng is not None else make_rng(0), mc_count).rows


def survival_all_positive(model: JEModel, mc_count: int = DEFAULT_MC_COUNT, rng=None) -> float:
    """Fraction of sampled rows with every coordinate strictly positive."""
    rows = _rows(model, rng, mc_count)
    return float(np.mean(np.all(rows > 0, axis=1)))


def pearson_from_rows(rows: np.ndarray) -> np.ndarray:
    sd = rows.std(axis=0)
    flat = np.flatnonzero(sd == 0)
    if flat.size:
        raise UndefinedCorrelationError(
            f"coordinate {flat[0] + 1} has zero sample variance; correlation undefined for its pairs"
        )
    return np.corrcoef(rows, rowvar=False)


def pearson_matrix(model: JEModel, mc_count: int = DEFAULT_MC_COUNT, rng=None) -> np.ndarray:
    return pearson_from_rows(_rows(model, rng, mc_count))


def cf_product_from_rows(rows: np.ndarray, t: Sequence[float]) -> float:
    """``|mean prod_i (exp(i t_i X_i) - 1)|``."""
    t = np.asarray(t, dtype=float)
    if t.shape != (rows.shape[1],):
        raise ShapeError("t needs one entry per coordinate")
    factors = np.expm1(1j * rows * t)
    return float(abs(np.prod(factors, axis=1).mean()))


def cf_product_identity(model: JEModel, t: Sequence[float], mc_count: int = DEFAULT_MC_COUNT, rng=None) -> float:
    """Monte Carlo magnitude of ``E prod_i (exp(i t_i X_i) - 1)``; zero for JE vectors."""
    return cf_product_from_rows(_rows(model, rng, mc_count), t)
