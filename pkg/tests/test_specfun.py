"""Special-function layer: Laguerre recurrence, factorial tables,
interference factor, and SignedLog arithmetic."""

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fansq.specfun import (
    SL_ONE,
    SL_ZERO,
    CompensatedSum,
    LaguerreTable,
    SignedLog,
    double_factorial,
    interference_factor,
    laguerre,
    log_factorial,
    signed_log,
)

finite = st.floats(
    allow_nan=False, allow_infinity=False, min_value=-1e300, max_value=1e300
)


# ---------------------------------------------------------------------------
# Laguerre polynomials


@pytest.mark.parametrize(
    "n, m, x, expected",
    [
        (0, 5, 0.37, 1.0),
        (1, 0, 0.2, 0.8),  # 1 - x
        (2, 1, 1.0, 0.5),  # 3 - 3x + x^2/2
    ],
)
def test_laguerre_low_degree_closed_forms(n, m, x, expected):
    assert laguerre(n, m, x) == pytest.approx(expected, rel=1e-15)


def _laguerre_exact(n: int, m: int, x: Fraction) -> Fraction:
    # explicit polynomial sum, exact rational arithmetic
    total = Fraction(0)
    for i in range(n + 1):
        total += (-1) ** i * math.comb(n + m, n - i) * x**i / math.factorial(i)
    return total


def test_laguerre_recurrence_matches_explicit_sum():
    worst = 0.0
    for n in range(0, 26):
        for m in range(0, 11):
            for tenth_x in range(0, 21):
                x = Fraction(tenth_x, 10)
                ref = _laguerre_exact(n, m, x)
                got = laguerre(n, m, float(x))
                if ref == 0:
                    assert abs(got) <= 1e-10
                else:
                    worst = max(worst, abs(got - float(ref)) / abs(float(ref)))
    assert worst <= 1e-10


def test_laguerre_matches_scipy():
    eval_genlaguerre = pytest.importorskip("scipy.special").eval_genlaguerre
    for n in (3, 12, 25):
        for m in (0, 4, 10):
            for x in (0.05, 0.7, 1.9):
                assert laguerre(n, m, x) == pytest.approx(
                    float(eval_genlaguerre(n, m, x)), rel=1e-9
                )


def test_laguerre_rejects_negative_indices():
    with pytest.raises(ValueError):
        laguerre(-1, 0, 0.5)
    with pytest.raises(ValueError):
        laguerre(2, -3, 0.5)


def test_laguerre_table_matches_direct_evaluation():
    tab = LaguerreTable(2, 0.3)
    # ask out of order to exercise incremental growth
    for n in (7, 0, 3, 40, 12):
        assert tab.value(n) == pytest.approx(laguerre(n, 2, 0.3), rel=1e-13)


# ---------------------------------------------------------------------------
# factorials


def test_log_factorial_small_values_exact():
    assert log_factorial(0) == 0.0
    assert log_factorial(1) == 0.0
    assert log_factorial(5) == pytest.approx(math.log(120), rel=1e-15)


def test_log_factorial_against_lgamma():
    for n in (10, 47, 300, 2000):
        assert log_factorial(n) == pytest.approx(math.lgamma(n + 1), rel=1e-13)


def test_log_factorial_negative_rejected():
    with pytest.raises(ValueError):
        log_factorial(-1)


@pytest.mark.parametrize(
    "n, expected",
    [(-1, 1), (0, 1), (1, 1), (2, 2), (3, 3), (5, 15), (7, 105), (15, 2027025)],
)
def test_double_factorial_values(n, expected):
    assert double_factorial(n) == expected


def test_double_factorial_below_minus_one_rejected():
    with pytest.raises(ValueError):
        double_factorial(-2)


# ---------------------------------------------------------------------------
# interference factor


@pytest.mark.parametrize("k, n, expected", [(1, 0, 2), (3, 5, 0), (2, 4, 4)])
def test_interference_factor_examples(k, n, expected):
    assert interference_factor(k, n) == expected


def test_interference_factor_product_identity():
    # j(n) j(n + n') collapses to 2k^2 (1 + (-1)^n) for even offsets
    for k in range(1, 6):
        for n in range(-20, 21):
            for off in range(-20, 21):
                prod = interference_factor(k, n) * interference_factor(k, n + off)
                if off % 2 != 0:
                    assert prod == 0
                else:
                    assert prod == 2 * k * k * (1 + (-1) ** n)


def test_interference_factor_bad_order():
    with pytest.raises(ValueError):
        interference_factor(0, 2)


# ---------------------------------------------------------------------------
# SignedLog


@given(finite)
def test_signed_log_roundtrip(x):
    back = signed_log(x).to_real()
    assert back == pytest.approx(x, rel=1e-12, abs=1e-300)


def test_signed_log_zero():
    assert signed_log(0.0) == SL_ZERO
    assert SL_ZERO.to_real() == 0.0
    assert SL_ZERO.mul(SignedLog(-1, 5.0)).sign == 0


nonzero = finite.filter(lambda x: abs(x) > 1e-280)


@given(nonzero, nonzero)
def test_signed_log_mul_matches_float_product(a, b):
    got = signed_log(a).mul(signed_log(b))
    want = a * b
    if math.isinf(want) or want == 0.0:
        return  # float over/underflow, exactly what SignedLog exists to avoid
    assert got.sign == math.copysign(1, want)
    assert got.to_real() == pytest.approx(want, rel=1e-12)


@given(nonzero, nonzero, nonzero)
def test_signed_log_mul_associative_commutative(a, b, c):
    sa, sb, sc = signed_log(a), signed_log(b), signed_log(c)
    left = sa.mul(sb).mul(sc)
    right = sa.mul(sb.mul(sc))
    assert left.sign == right.sign == sa.mul(sc).mul(sb).sign
    assert left.logmag == pytest.approx(right.logmag, abs=1e-12)
    assert sa.mul(sb) == sb.mul(sa)


def test_signed_log_pow_conventions():
    assert SL_ZERO.pow_int(0) == SL_ONE  # 0^0 = 1 keeps xi = 0 in the series
    assert SL_ZERO.pow_int(3) == SL_ZERO
    v = signed_log(-2.0)
    assert v.pow_int(3).sign == -1
    assert v.pow_int(4).sign == 1
    assert v.pow_int(4).to_real() == pytest.approx(16.0, rel=1e-14)
    with pytest.raises(ZeroDivisionError):
        SL_ZERO.pow_int(-1)


def test_signed_log_div():
    assert signed_log(6.0).div(signed_log(-2.0)).to_real() == pytest.approx(-3.0)
    assert SL_ZERO.div(SL_ONE) == SL_ZERO
    with pytest.raises(ZeroDivisionError):
        SL_ONE.div(SL_ZERO)


def test_signed_log_handles_magnitudes_beyond_float_range():
    big = SignedLog(1, 800.0)  # e^800 overflows a double
    ratio = big.mul(big).div(SignedLog(1, 1590.0))
    assert ratio.to_real() == pytest.approx(math.exp(10.0), rel=1e-12)


# ---------------------------------------------------------------------------
# compensated summation


def test_compensated_sum_rescues_cancellation():
    acc = CompensatedSum()
    for x in (1e16, 1.0, -1e16):
        acc.add(x)
    assert acc.value == 1.0  # naive summation returns 0.0 here


def test_compensated_sum_many_small():
    acc = CompensatedSum()
    for _ in range(10**5):
        acc.add(0.1)
    assert acc.value == pytest.approx(1e4, rel=1e-15)
