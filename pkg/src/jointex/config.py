"""JSON model configuration.

Schema (all indices 1-based)::

    {
      "n": 3,
      "marginals": [{"family": "scaled-uniform", "q0": 0.5, "scale": 1.0}, ...],
      "allocation": {"strategy": "trivariate-lambda", "lambda": 0.4},
      "copulas": {"1,2": {"family": "independence"}, ...},
      "distortions": {"1": {"family": "linear-truncation", "a": 0.125, "b": 0.5}},
      "seed": 7
    }

Marginal families take ``scale`` (scaled-uniform), ``rate``
(scaled-exponential) or ``knots`` (piecewise-linear, ``[[x, survival], ...]``).
Allocation strategies: ``max-face-mass``, ``scaled`` (``t``),
``trivariate-lambda`` (``lambda``), ``axes-free`` and ``explicit``
(``p``: ``{"1,2": mass, ...}``).  Faces missing from ``copulas`` use the
independence copula.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .allocation import FaceAllocation, feasible_allocation, parse_face_key
from .copulas import CopulaSpec
from .distortions import DistortionSpec
from .errors import JEError, ShapeError
from .marginals import MarginalSpec
from .model import JEModel, build_model, model_caps


class ConfigError(JEError):
    pass


@dataclass
class ModelConfig:
    marginals: list[MarginalSpec]
    allocation: dict = field(default_factory=lambda: {"strategy": "max-face-mass"})
    copulas: dict = field(default_factory=dict)
    distortions: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def n(self) -> int:
        return len(self.marginals)

    @property
    def q0(self) -> list[float]:
        return [m.q0 for m in self.marginals]

    @classmethod
    def from_json(cls, obj: dict) -> "ModelConfig":
        if not isinstance(obj, dict):
            raise ConfigError("configuration must be a JSON object")
        try:
            marginals = [MarginalSpec.from_json(m) for m in obj["marginals"]]
        except KeyError as exc:
            raise ConfigError(f"missing field {exc}") from None
        n = obj.get("n", len(marginals))
        if n != len(marginals):
            raise ShapeError(f"n = {n} but {len(marginals)} marginals given")
        copulas = {}
        for key, spec in obj.get("copulas", {}).items():
            face = parse_face_key(key)
            copulas[face] = CopulaSpec.from_json(spec, len(face))
        distortions = {}
        for key, spec in obj.get("distortions", {}).items():
            i = int(key) - 1
            if not 0 <= i < n:
                raise ShapeError(f"distortion index {key} out of range")
            distortions[i] = DistortionSpec.from_json(spec, marginals[i])
        allocation = dict(obj.get("allocation", {"strategy": "max-face-mass"}))
        return cls(marginals, allocation, copulas, distortions, int(obj.get("seed", 0)))

    def caps(self):
        return list(model_caps(self.marginals, self.distortions))

    def make_allocation(self, strategy=None, lam=None, t=None) -> FaceAllocation:
        spec = self.allocation
        strategy = strategy or spec.get("strategy", "max-face-mass")
        if strategy == "explicit":
            if "p" not in spec:
                raise ConfigError("explicit allocation needs a 'p' map")
            return FaceAllocation.from_json({"p": spec["p"]}, self.n)
        lam = spec.get("lambda") if lam is None else lam
        t = spec.get("t") if t is None else t
        caps = self.caps() if self.distortions else None
        return feasible_allocation(self.q0, caps, strategy, t=t, lam=lam)

    def build(self, strategy=None, lam=None, t=None) -> JEModel:
        alloc = self.make_allocation(strategy, lam, t)
        return build_model(self.marginals, alloc, self.copulas, self.distortions)
