import numpy as np
import pytest

from jointex.allocation import trivariate_allocation
from jointex.copulas import CopulaSpec
from jointex.distortions import DistortionSpec
from jointex.marginals import MarginalSpec
from jointex.model import build_model, model_caps


def half_uniforms(n=3):
    return [MarginalSpec.uniform(0.5, 1.0) for _ in range(n)]


def example_copulas():
    return {
        (0, 1): CopulaSpec.independence(2),
        (0, 2): CopulaSpec.comonotone(2),
        (1, 2): CopulaSpec.countermonotone(),
    }


def canonical_model(lam):
    """Three half-uniform marginals; independent, comonotone and countermonotone faces."""
    ms = half_uniforms()
    return build_model(ms, trivariate_allocation([0.5] * 3, None, lam), example_copulas())


def distorted_model(lam=0.2):
    """The same marginals under the linear distortion on [1/8, 1/2]."""
    ms = half_uniforms()
    ds = {i: DistortionSpec.linear(0.125, 0.5) for i in range(3)}
    caps = model_caps(ms, ds)
    return build_model(ms, trivariate_allocation([0.5] * 3, caps, lam), example_copulas(), ds)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
