import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fkdv import (
    EvalPoint,
    PoleProximityError,
    build_series,
    empirical_optimum,
    eval_coefficient,
    optimal_N,
    partial_sum,
    singularity,
)


@pytest.fixture(scope="module")
def table8():
    return build_series(8)


def test_u0_at_origin(table8):
    assert eval_coefficient(table8.u[0], 0.0) == pytest.approx(2.0)


def test_u1_at_origin(table8):
    assert eval_coefficient(table8.u[1], 0.0) == pytest.approx(10.0)


def test_u0_near_singularity(table8):
    # horizontal approach x = i pi/2 - delta: u_0 ~ -2/delta^2
    delta = 1e-3
    v = eval_coefficient(table8.u[0], complex(-delta, math.pi / 2))
    assert v.real == pytest.approx(-2.0 / delta**2, rel=1e-3)


def test_pole_guard(table8):
    with pytest.raises(PoleProximityError):
        eval_coefficient(table8.u[0], 1j * math.pi / 2)


def test_optimal_N_examples():
    assert optimal_N(0.0, 0.1, 1) == 8
    assert optimal_N(0.0, 0.05, 1) == 16
    assert optimal_N(1.0, 0.1, 1) == 9
    assert abs(abs(1.0 - singularity(1)) - 1.8621) < 1e-4


def test_optimal_N_floor():
    assert optimal_N(0.0, 10.0, 1) == 1


def test_partial_sum_examples(table8):
    p0 = partial_sum(table8, EvalPoint(0.0, 0.1), 1)
    assert p0.value == pytest.approx(2.0)
    p1 = partial_sum(table8, EvalPoint(0.0, 0.1), 2)
    assert p1.value == pytest.approx(2.1)
    assert p1.term_magnitudes == pytest.approx((2.0, 0.1))


def test_partial_sum_empty(table8):
    p = partial_sum(table8, EvalPoint(0.0, 0.1), 0)
    assert p.value == 0 and p.N == 0 and p.term_magnitudes == ()


def test_partial_sum_bounds(table8):
    with pytest.raises(ValueError):
        partial_sum(table8, EvalPoint(0.0, 0.1), 42)


def test_real_axis_sums_are_real(table8):
    for x in (0.0, 0.5, 2.0):
        p = partial_sum(table8, EvalPoint(complex(x, 0.0), 0.1), 9)
        assert abs(p.value.imag) <= 1e-12 * max(abs(p.value.real), 1.0)


def test_term_magnitudes_dip_then_grow(table30):
    ps = partial_sum(table30, EvalPoint(0.0, 0.1), 31)
    mags = ps.term_magnitudes
    k = mags.index(min(mags))
    assert all(mags[i] > mags[i + 1] for i in range(k))
    assert all(mags[i] < mags[i + 1] for i in range(k, len(mags) - 1))


def test_empirical_optimum_matches_rule(table30):
    for x, eps in ((0.0, 0.1), (1.0, 0.1), (0.0, 0.15)):
        n_star = empirical_optimum(table30, EvalPoint(complex(x), eps))
        assert abs(n_star - optimal_N(x, eps, 1)) <= 2


@given(st.complex_numbers(max_magnitude=1.2, allow_nan=False,
                          allow_infinity=False))
@settings(max_examples=60, deadline=None)
def test_conjugate_symmetry(z):
    table = build_series(3)
    if abs(cmath.cosh(z)) < 1e-6:
        return
    a = eval_coefficient(table.u[3], z)
    b = eval_coefficient(table.u[3], z.conjugate())
    assert b == pytest.approx(a.conjugate(), rel=1e-10, abs=1e-12)


def test_epsilon_must_be_positive():
    with pytest.raises(ValueError):
        EvalPoint(0.0, -0.1)


def test_huge_coefficient_conversion():
    # scaling-by-exponent path: value representable though the coefficient
    # alone is not
    from fkdv.evaluation import _coeff_scaled

    q = Fraction(10) ** 400
    mant, exp2 = _coeff_scaled(q)
    assert exp2 != 0 and mant > 0
    log_val = math.log(mant) + exp2 * math.log(2.0)
    assert log_val == pytest.approx(400 * math.log(10.0), rel=1e-12)
