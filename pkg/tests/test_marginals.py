import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointex.errors import DomainError, JEError
from jointex.marginals import (
    MarginalSpec,
    inverse_survival,
    sample_positive_part,
    survival,
)

HALF = MarginalSpec.uniform(0.5, 1.0)


@pytest.mark.parametrize(
    "m, x, expected",
    [
        (HALF, 0.0, 0.5),
        (HALF, 1.0, 0.0),
        (MarginalSpec.zero(), 0.0, 0.0),
    ],
)
def test_survival_examples(m, x, expected):
    assert survival(m, x) == expected


def test_survival_negative_x():
    with pytest.raises(DomainError):
        survival(HALF, -0.1)


@pytest.mark.parametrize(
    "m, p, expected",
    [
        (HALF, 0.25, 0.5),
        (HALF, 0.5, 0.0),
        (MarginalSpec.exponential(0.3, 1.0), 0.3 * math.exp(-2.0), 2.0),
    ],
)
def test_inverse_survival_examples(m, p, expected):
    assert inverse_survival(m, p) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("p", [-0.1, 1.1])
def test_inverse_survival_domain(p):
    with pytest.raises(DomainError):
        inverse_survival(HALF, p)


def test_sample_positive_part_examples():
    assert sample_positive_part(HALF, 0.5) == pytest.approx(0.5)
    assert sample_positive_part(HALF, 1.0) == 0.0
    pw = MarginalSpec.piecewise([(0.0, 0.4), (2.0, 0.0)])
    assert sample_positive_part(pw, 0.5) == pytest.approx(1.0)


def test_sample_positive_part_needs_mass():
    with pytest.raises(JEError):
        sample_positive_part(MarginalSpec.zero(), 0.5)


@pytest.mark.parametrize(
    "knots",
    [
        [(0.0, 0.4), (1.0, 0.5), (2.0, 0.0)],  # survival increases
        [(0.0, 0.4), (0.0, 0.2), (2.0, 0.0)],  # x not strictly increasing
        [(0.0, 0.4), (2.0, 0.1)],  # does not end at 0
    ],
)
def test_piecewise_invariants(knots):
    with pytest.raises(DomainError):
        MarginalSpec.piecewise(knots)


def test_json_round_trip():
    for m in [HALF, MarginalSpec.exponential(0.3, 2.0), MarginalSpec.piecewise([(0, 0.4), (1, 0.1), (3, 0)])]:
        obj = json.loads(json.dumps(m.to_json()))
        assert MarginalSpec.from_json(obj) == m


MARGINALS = st.one_of(
    st.builds(MarginalSpec.uniform, st.floats(0.01, 1.0), st.floats(0.1, 5.0)),
    st.builds(MarginalSpec.exponential, st.floats(0.01, 1.0), st.floats(0.1, 5.0)),
)


@settings(max_examples=60, deadline=None)
@given(MARGINALS, st.lists(st.floats(0.0, 10.0), min_size=2, max_size=20))
def test_survival_non_increasing(m, xs):
    xs = np.sort(np.asarray(xs))
    s = survival(m, xs)
    assert np.all(np.diff(s) <= 1e-15)
    assert survival(m, 0.0) == pytest.approx(m.q0)


@settings(max_examples=60, deadline=None)
@given(MARGINALS, st.floats(0.0, 1.0))
def test_inverse_is_generalized_inverse(m, u):
    p = u * m.q0
    x = inverse_survival(m, p)
    assert x >= 0.0
    assert survival(m, x) <= p + 1e-12


def test_positive_part_dkw(rng):
    m = MarginalSpec.exponential(0.6, 1.5)
    n = 100_000
    x = sample_positive_part(m, rng.random(n))
    grid = np.linspace(0.0, 3.0, 40)
    emp = (x[:, None] > grid).mean(axis=0)
    target = survival(m, grid) / m.q0
    eps = math.sqrt(math.log(2 / 1e-3) / (2 * n))
    assert np.max(np.abs(emp - target)) < eps
