import numpy as np
import pytest

from jointex.errors import DomainError, ExistenceError
from jointex.existence import check_gje, check_je, check_me, me_frechet_cdf
from jointex.marginals import MarginalSpec


def ms(*q0):
    return [MarginalSpec.uniform(q, 1.0) if q > 0 else MarginalSpec.zero() for q in q0]


def test_me_examples():
    r = check_me(ms(0.5, 0.5, 0.5))
    assert not r.feasible and r.lhs == 1.5
    r = check_me(ms(0.3, 0.3, 0.3))
    assert r.feasible and r.slack == pytest.approx(0.1)
    r = check_me(ms(1.0, 0.0))
    assert r.feasible and r.slack == 0.0


def test_je_examples():
    r = check_je(ms(0.5, 0.5, 0.5))
    assert r.feasible and r.lhs == 1.5 and r.rhs == 2
    r = check_je(ms(1, 1, 1))
    assert not r.feasible and r.lhs == 3
    r = check_je(ms(1, 1, 0))
    assert r.feasible and r.slack == 0


def test_gje_examples():
    r = check_gje(ms(0.5, 0.5, 0.5), [0.375] * 3)
    assert r.feasible
    assert r.lhs == pytest.approx(0.5)
    assert r.rhs == pytest.approx(9 / 16)
    r = check_gje(ms(0.9, 0.9, 0.9), [0.1] * 3)
    assert not r.feasible
    assert r.lhs == pytest.approx(1.7)
    assert r.rhs == pytest.approx(0.15)


def test_gje_gstar_range():
    with pytest.raises(DomainError):
        check_gje(ms(0.5, 0.5, 0.5), [0.6, 0.5, 0.5])
    with pytest.raises(DomainError):
        check_gje(ms(0.5, 0.5, 0.5), [-0.1, 0.5, 0.5])


def test_gje_with_full_gstar_is_je():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        n = int(rng.integers(3, 7))
        q0 = rng.random(n)
        m = ms(*q0)
        assert check_gje(m, q0).feasible == check_je(m).feasible


def test_me_implies_je():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        n = int(rng.integers(2, 7))
        m = ms(*(rng.random(n) * 2 / n))
        if check_me(m).feasible:
            assert check_je(m).feasible


def test_me_frechet_cdf_examples():
    assert me_frechet_cdf(ms(0.3, 0.3), (0.0, 0.0)) == pytest.approx(0.4)
    assert me_frechet_cdf(ms(0.3, 0.3, 0.3), (np.inf,) * 3) == 1.0
    assert me_frechet_cdf(ms(0.3, 0.3, 0.3), (0.5, 0.0, 0.0)) == pytest.approx(0.25)


def test_me_frechet_cdf_infeasible():
    with pytest.raises(ExistenceError, match="MEcondition"):
        me_frechet_cdf(ms(0.5, 0.5, 0.5), (0.0, 0.0, 0.0))
