import itertools
import math

import numpy as np
import pytest

from conftest import canonical_model, distorted_model, example_copulas, half_uniforms
from jointex.allocation import FaceAllocation, feasible_allocation, trivariate_allocation
from jointex.copulas import CopulaSpec
from jointex.errors import ConstraintViolation, ExistenceError, ShapeError, UndefinedCorrelationError
from jointex.marginals import MarginalSpec, survival
from jointex.model import (
    build_model,
    cdf,
    cf_product_from_rows,
    cf_product_identity,
    make_rng,
    me_model,
    pearson_from_rows,
    pearson_matrix,
    region_masses,
    sample,
    sample_independent,
    survival_all_positive,
)


def u(q):
    return MarginalSpec.uniform(q, 1.0)


def test_build_examples():
    assert canonical_model(0.5).axis_mass == pytest.approx((0, 0, 0), abs=1e-15)
    assert canonical_model(1 / 3).origin_mass == pytest.approx(0.0, abs=1e-15)
    m = build_model([u(0.3)] * 3, FaceAllocation(3, {}, (0.3,) * 3))
    assert m.origin_mass == pytest.approx(0.1)
    assert m.axis_mass == (0.3, 0.3, 0.3)


def test_region_masses_example():
    r = region_masses(canonical_model(0.4))
    for k in ("face:1+2", "face:1+3", "face:2+3"):
        assert r[k] == pytest.approx(0.2)
    assert sum(r[f"axis:{i}"] for i in (1, 2, 3)) == pytest.approx(0.3)
    assert r["origin"] == pytest.approx(0.1)
    assert math.fsum(r.values()) == pytest.approx(1.0, abs=1e-15)


def test_region_masses_special_cases():
    r = region_masses(me_model([u(0.3)] * 3))
    assert all(v == 0 for k, v in r.items() if k.startswith("face"))
    ms = [u(0.7), u(0.7), u(0.6)]
    r = region_masses(build_model(ms, feasible_allocation([0.7, 0.7, 0.6])))
    assert sum(v for k, v in r.items() if k.startswith("face")) == pytest.approx(1.0)


def test_build_errors():
    ms = half_uniforms()
    bad = FaceAllocation(3, {(0, 1): 0.4, (0, 2): 0.3}, (0.5,) * 3)
    with pytest.raises(ConstraintViolation) as info:
        build_model(ms, bad)
    assert info.value.constraint == "JE_parameters_1" and info.value.index == 0
    short = FaceAllocation(3, {(0, 1): 0.1}, (0.5,) * 3)
    with pytest.raises(ConstraintViolation, match="JE_parameters_2"):
        build_model(ms, short)
    with pytest.raises(ShapeError):
        build_model(ms, FaceAllocation(4, {}, (0.5,) * 4))
    with pytest.raises(ShapeError):
        build_model(ms, trivariate_allocation([0.5] * 3, None, 0.4), {(0, 1): CopulaSpec.independence(3)})
    with pytest.raises(ExistenceError):
        build_model([u(1.0)] * 3, FaceAllocation(3, {}, (1.0,) * 3))


@pytest.mark.parametrize("model", [canonical_model(1 / 3), canonical_model(0.5), distorted_model()])
def test_exact_zero_invariant(model, rng):
    batch = sample(model, rng, 100_000)
    assert not np.any(np.all(batch.rows > 0, axis=1))
    assert np.array_equal(batch.rows > 0, batch.region_indicator())


def test_face_frequencies(rng):
    batch = sample(canonical_model(0.5), rng, 200_000)
    freq = np.mean(np.array(batch.labels()) == "face:1+2")
    assert abs(freq - 0.25) < 4 * math.sqrt(0.25 * 0.75 / 200_000)


def test_comonotone_face_equal_coordinates(rng):
    batch = sample(canonical_model(0.4), rng, 20_000)
    rows = batch.rows[np.array(batch.labels()) == "face:1+3"]
    assert len(rows) > 0
    assert np.array_equal(rows[:, 0], rows[:, 2])


@pytest.mark.parametrize("model", [canonical_model(5 / 12), distorted_model()])
def test_marginals_recovered(model, rng):
    n = 100_000
    rows = sample(model, rng, n).rows
    grid = np.linspace(0.0, 1.0, 50)
    eps = math.sqrt(math.log(2 / 1e-3) / (2 * n))
    for i, m in enumerate(model.marginals):
        emp = (rows[:, i][:, None] > grid).mean(axis=0)
        assert np.max(np.abs(emp - survival(m, grid))) < eps


def test_cdf_examples():
    m = canonical_model(0.4)
    assert cdf(m, (0, 0, 0)) == m.origin_mass
    assert cdf(m, (-0.1, 0.5, 0.5)) == 0.0
    assert cdf(m, (np.inf,) * 3) == pytest.approx(1.0)
    assert cdf(canonical_model(0.5), (0.5, 0.5, 0.5)) == pytest.approx(0.4375, abs=1e-15)


@pytest.mark.parametrize("model", [canonical_model(0.4), distorted_model()])
def test_cdf_matches_sampler(model, rng):
    rows = sample(model, rng, 200_000).rows
    g = np.linspace(0.0, 1.0, 5)
    pts = np.array(list(itertools.product(g, repeat=3)))
    emp = np.array([np.mean(np.all(rows <= p, axis=1)) for p in pts])
    assert np.max(np.abs(emp - cdf(model, pts))) < 0.006


@pytest.mark.parametrize("model", [canonical_model(0.4), distorted_model()])
def test_cdf_is_a_distribution_function(model):
    g = np.linspace(0.0, 1.0, 9)
    pts = np.array(list(itertools.product(g, repeat=3)))
    F = cdf(model, pts).reshape(9, 9, 9)
    for axis in range(3):
        assert np.all(np.diff(F, axis=axis) >= -1e-12)
    # Rectangle volumes are non-negative.
    vol = np.zeros((8, 8, 8))
    for corner in itertools.product((0, 1), repeat=3):
        sl = tuple(slice(c, c + 8) for c in corner)
        vol += (-1) ** (3 - sum(corner)) * F[sl]
    assert vol.min() >= -1e-12


def test_cdf_marginal_limits():
    model = canonical_model(0.45)
    x = np.linspace(0.0, 1.0, 11)
    for i in range(3):
        pts = np.full((11, 3), np.inf)
        pts[:, i] = x
        np.testing.assert_allclose(cdf(model, pts), 1 - survival(model.marginals[i], x), atol=1e-12)


def test_me_model():
    ms = [u(0.3)] * 3
    m = me_model(ms)
    assert m.origin_mass == pytest.approx(0.1)
    g = np.linspace(0.0, 1.0, 6)
    pts = np.array(list(itertools.product(g, repeat=3)))
    F = np.column_stack([1 - survival(mm, pts[:, i]) for i, mm in enumerate(ms)])
    np.testing.assert_allclose(cdf(m, pts), np.maximum(F.sum(axis=1) - 2, 0.0), atol=1e-12)
    with pytest.raises(ExistenceError):
        me_model(half_uniforms())


def test_survival_all_positive():
    assert survival_all_positive(canonical_model(0.4), 100_000) == 0.0
    rows = sample_independent(half_uniforms(), make_rng(5), 100_000)
    frac = np.mean(np.all(rows > 0, axis=1))
    assert abs(frac - 0.125) < 4 * math.sqrt(0.125 * 0.875 / 100_000)


def test_pearson_endpoints():
    rho = pearson_matrix(canonical_model(0.5), 200_000, make_rng(1))
    assert rho[0, 1] == pytest.approx(0.0, abs=0.015)
    assert rho[0, 2] == pytest.approx(0.2, abs=0.015)
    assert rho[1, 2] == pytest.approx(-0.2, abs=0.015)


def test_pearson_zero_variance():
    rows = np.column_stack([np.ones(10), np.arange(10.0)])
    with pytest.raises(UndefinedCorrelationError):
        pearson_from_rows(rows)


def test_cf_product():
    model = canonical_model(0.4)
    assert cf_product_identity(model, (0, 0, 0), 1000) == 0.0
    assert cf_product_identity(model, (1, 2, 3), 100_000) < 0.005
    control = sample_independent(half_uniforms(), make_rng(2), 100_000)
    assert cf_product_from_rows(control, (1, 2, 3)) > 0.05


def test_sampling_reproducible():
    a = sample(distorted_model(), make_rng(9), 1000)
    b = sample(distorted_model(), make_rng(9), 1000)
    assert np.array_equal(a.rows, b.rows) and np.array_equal(a.region, b.region)


def test_four_dimensional_model(rng):
    ms = [MarginalSpec.exponential(0.75, 1.0)] * 4
    model = build_model(ms, feasible_allocation([0.75] * 4))
    assert model.origin_mass >= -1e-15
    batch = sample(model, rng, 50_000)
    assert not np.any(np.all(batch.rows > 0, axis=1))
    assert np.array_equal(batch.rows > 0, batch.region_indicator())
