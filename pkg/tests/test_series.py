import math

import mpmath
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from mpmath import mpc, mpf

from app.schemas.arith import ArithFunctionId
from app.schemas.numeric import EvalPoint, PrecisionContext
from app.services import arith, series
from app.services.errors import DomainError, LimitOverflowError


def direct_sum(fn_id, z, n_terms, bits=256):
    """Plain mpmath summation of a_n z^n from the trial-division oracle"""
    with mpmath.workprec(bits):
        total = mpc(0)
        for n in range(1, n_terms + 1):
            a = arith.value(fn_id, n)
            if isinstance(a, arith.MangoldtValue):
                a = (mpmath.log(a.p) if a.p else 0) + a.offset
            total += a * mpmath.power(z, n)
        return total


def test_mobius_at_log_two(pc128, pc256):
    with pc256.workprec():
        log_two = mpmath.log(2)
    point = EvalPoint.real(log_two, pc=pc256)
    low = series.eval_exp_series(ArithFunctionId.MOBIUS, point, pc128, 1e-30)
    high = series.eval_exp_series(ArithFunctionId.MOBIUS, point, pc256, 1e-30)
    assert low.input_rounding == 0
    assert abs(low.value - high.value) < 1e-30
    expected = direct_sum(ArithFunctionId.MOBIUS, mpf(0.5), 200)
    assert abs(low.value - expected) <= low.error_budget + mpf(2) ** -120


def test_coarse_t_widens_the_error_budget(pc128):
    """log 2 rounded to 53 bits is not log 2; the budget has to say so"""
    point = EvalPoint.real(mpmath.log(2))
    assert point.input_bits == 53
    result = series.eval_exp_series(ArithFunctionId.MOBIUS, point, pc128, 1e-30)
    expected = direct_sum(ArithFunctionId.MOBIUS, mpf(0.5), 200)
    miss = abs(result.value - expected)
    assert miss > 1e-25
    assert result.input_rounding > 1e-20
    assert miss <= result.error_budget


@pytest.mark.parametrize("text", ["0.1", "1e-3", "0.7"])
def test_decimal_strings_are_parsed_at_working_precision(pc128, text):
    point = EvalPoint.real(text, pc=pc128)
    assert point.input_bits == pc128.work_bits
    with mpmath.workprec(400):
        assert abs(point.t - mpf(text)) <= mpf(text) * mpf(2) ** -pc128.work_bits
    polar = EvalPoint.from_polar(text, 0, theta=0.5, pc=pc128)
    assert polar.t == point.t


def test_derivative_bound(pc128):
    with pc128.workprec():
        t = mpf("0.05")
        h = mpf(2) ** -40
        slope = abs(series.eval_exp_series(ArithFunctionId.LIOUVILLE, EvalPoint.real(t + h, pc=pc128),
                                           pc128, 1e-30).value
                    - series.eval_exp_series(ArithFunctionId.LIOUVILLE, EvalPoint.real(t - h, pc=pc128),
                                             pc128, 1e-30).value) / (2 * h)
        assert slope <= series.derivative_bound(ArithFunctionId.LIOUVILLE, t)


def test_one_term_dominance(pc128):
    result = series.eval_exp_series(ArithFunctionId.MOBIUS, EvalPoint.real(20), pc128, 1e-20)
    with mpmath.workprec(200):
        one_term = mpmath.exp(-20)
        assert abs(result.value - one_term) <= 2 * mpmath.exp(-40)
    assert result.tail_bound <= 1e-20


def test_tau_against_lambert(pc128):
    point = EvalPoint.real(0.5)
    direct = series.eval_exp_series(ArithFunctionId.TAU_DIVISORS, point, pc128, 1e-25)
    with pc128.workprec():
        lambert = series.lambert_tau(mpmath.exp(-mpf(0.5)), pc128, 1e-25)
    assert abs(direct.value - lambert.value) <= direct.error_budget + lambert.error_budget


def test_primes_power_series(pc128):
    result = series.eval_power_series(ArithFunctionId.PRIME_SEQUENCE, 0.5, pc128, 1e-25)
    expected = direct_sum(ArithFunctionId.PRIME_SEQUENCE, mpf(0.5), 150)
    assert abs(result.value - expected) <= result.error_budget + mpf(2) ** -120


@pytest.mark.parametrize("fn_id", [
    ArithFunctionId.LIOUVILLE_ALTERNATING,
    ArithFunctionId.VON_MANGOLDT,
    ArithFunctionId.VON_MANGOLDT_MINUS_ONE,
    ArithFunctionId.TWO_OMEGA_MINUS_TAU,
])
def test_complex_t_against_direct_sum(pc128, fn_id):
    point = EvalPoint(t=mpc(1, 1), theta=0.5)
    result = series.eval_exp_series(fn_id, point, pc128, 1e-25)
    with mpmath.workprec(256):
        expected = direct_sum(fn_id, mpmath.exp(-mpc(1, 1)), 120)
    assert abs(result.value - expected) <= result.error_budget + mpf(2) ** -110


def test_zero_z(pc128):
    result = series.eval_power_series(ArithFunctionId.MOBIUS, 0, pc128, 1e-20)
    assert result.value == 0
    assert result.terms_used == 0


def test_power_series_domain(pc128):
    with pytest.raises(DomainError):
        series.eval_power_series(ArithFunctionId.MOBIUS, -0.5, pc128, 1e-20)
    with pytest.raises(DomainError):
        series.eval_power_series(ArithFunctionId.MOBIUS, 1.0, pc128, 1e-20)


def test_target_must_be_positive(pc128):
    with pytest.raises(DomainError):
        series.eval_exp_series(ArithFunctionId.MOBIUS, EvalPoint.real(1), pc128, 0)


def test_memory_cap(pc128):
    with pytest.raises(LimitOverflowError) as e:
        series.eval_exp_series(ArithFunctionId.MOBIUS, EvalPoint.real(1e-4), pc128, 1e-20, memory_cap=10 ** 4)
    assert e.value.required > 10 ** 4
    assert "N=" in e.value.detail


def test_sector_check():
    assert series.sector_check(0.5, 0.3)
    assert series.sector_check(1, 0.3)
    assert not series.sector_check(mpc(0, 0.99), mpmath.pi / 2 - 0.1)


def test_required_terms_meets_target():
    for r in (mpf(1), mpf("0.1"), mpf("0.01")):
        n = series.required_terms(ArithFunctionId.MOBIUS, r, 1e-20)
        assert series.growth_tail(ArithFunctionId.MOBIUS, n, r) <= 0.5e-20
        assert series.growth_tail(ArithFunctionId.MOBIUS, n - 1, r) > 0.5e-20


def test_deterministic(pc128):
    point = EvalPoint.from_polar(0.05, mpmath.pi / 6, theta=0.3)
    first = series.eval_exp_series(ArithFunctionId.LIOUVILLE, point, pc128, 1e-20)
    second = series.eval_exp_series(ArithFunctionId.LIOUVILLE, point, pc128, 1e-20)
    assert first.value == second.value
    assert first.terms_used == second.terms_used


def test_segment_size_does_not_change_value(pc128, monkeypatch):
    from app.config import settings

    point = EvalPoint.real(0.01)
    first = series.eval_exp_series(ArithFunctionId.MOBIUS, point, pc128, 1e-20)
    monkeypatch.setattr(settings, "segment_size", 1009)
    second = series.eval_exp_series(ArithFunctionId.MOBIUS, point, pc128, 1e-20)
    assert first.value == second.value


def test_series_result_fields(pc128):
    point = EvalPoint.real(0.1)
    result = series.eval_exp_series(ArithFunctionId.MOBIUS, point, pc128, 1e-20)
    payload = series.series_result(ArithFunctionId.MOBIUS, point, result, pc128)
    assert payload["fn"] == "mobius"
    assert float(payload["tail_bound"]) <= 1e-20
    assert payload["precision_bits"] == 128


def test_eval_point_sector():
    with pytest.raises(ValueError):
        EvalPoint.from_polar(0.1, math.radians(89.9), theta=math.radians(5))
    with pytest.raises(ValueError):
        EvalPoint.real(-1)
    PrecisionContext(bits=64)


TAIL_FNS = [
    ArithFunctionId.MOBIUS,
    ArithFunctionId.LIOUVILLE_ALTERNATING,
    ArithFunctionId.VON_MANGOLDT,
    ArithFunctionId.TAU_DIVISORS,
    ArithFunctionId.PRIME_SEQUENCE,
]


@pytest.mark.parametrize("fn_id", TAIL_FNS)
@pytest.mark.parametrize("t", [
    pytest.param("1e-4", marks=pytest.mark.slow),
    "1e-2",
    "0.3",
    "1",
])
def test_tail_bound_is_sound(pc128, monkeypatch, fn_id, t):
    """Doubling the number of terms moves the value by less than the reported tail"""
    point = EvalPoint.real(t, pc=pc128)
    first = series.eval_exp_series(fn_id, point, pc128, 1e-10)
    n_terms = first.terms_used
    monkeypatch.setattr(series, "required_terms", lambda *args: 2 * n_terms)
    doubled = series.eval_exp_series(fn_id, point, pc128, 1e-10)
    assert doubled.terms_used == 2 * n_terms
    assert abs(doubled.value - first.value) <= first.tail_bound + first.rounding_slack + doubled.rounding_slack


def odd_sum(fn_id, t, n_terms, bits=256):
    """sum over odd n of a_n e^{-nt}, straight from the sieve"""
    table = arith.sieve(fn_id, n_terms)
    with mpmath.workprec(bits):
        t = mpc(t)
        return sum(table[n] * mpmath.exp(-n * t) for n in range(1, n_terms + 1, 2))


class TestLinearity:
    @pytest.mark.parametrize("t", ["0.2", "0.05"])
    def test_mangoldt_minus_one(self, pc128, t):
        point = EvalPoint.real(t, pc=pc128)
        shifted = series.eval_exp_series(ArithFunctionId.VON_MANGOLDT_MINUS_ONE, point, pc128, 1e-25)
        base = series.eval_exp_series(ArithFunctionId.VON_MANGOLDT, point, pc128, 1e-25)
        with pc128.workprec():
            z = point.z
            geometric = z / (1 - z)
            assert abs(shifted.value - (base.value - geometric)) <= shifted.error_budget + base.error_budget

    def test_two_omega_minus_tau(self, pc128):
        point = EvalPoint(t=mpc("0.1", "0.05"), theta=0.5)
        difference = series.eval_exp_series(ArithFunctionId.TWO_OMEGA_MINUS_TAU, point, pc128, 1e-25)
        two_omega = series.eval_exp_series(ArithFunctionId.TWO_OMEGA, point, pc128, 1e-25)
        tau = series.eval_exp_series(ArithFunctionId.TAU_DIVISORS, point, pc128, 1e-25)
        budget = difference.error_budget + two_omega.error_budget + tau.error_budget
        assert abs(difference.value - (two_omega.value - tau.value)) <= budget

    @pytest.mark.parametrize("fn_id, alternating", [
        (ArithFunctionId.MOBIUS, ArithFunctionId.MOBIUS_ALTERNATING),
        (ArithFunctionId.LIOUVILLE, ArithFunctionId.LIOUVILLE_ALTERNATING),
    ])
    def test_alternating_through_odd_terms(self, pc128, fn_id, alternating):
        """F_alt = 2 F_odd - F"""
        point = EvalPoint.real("0.5", pc=pc128)
        plain = series.eval_exp_series(fn_id, point, pc128, 1e-30)
        alt = series.eval_exp_series(alternating, point, pc128, 1e-30)
        with mpmath.workprec(256):
            odd = odd_sum(fn_id, point.t, 300)
            assert abs(alt.value - (2 * odd - plain.value)) <= alt.error_budget + plain.error_budget + mpf(2) ** -120


@pytest.mark.parametrize("z", ["0.3", "0.6", "0.9", mpc("0.5", "0.3"), mpc("0.7", "-0.2")])
def test_lambert_identity(pc128, z):
    with pc128.workprec():
        z = mpc(z)
        assert series.sector_check(z, 0.3)
    direct = series.eval_power_series(ArithFunctionId.TAU_DIVISORS, z, pc128, 1e-20)
    lambert = series.lambert_tau(z, pc128, 1e-20)
    assert abs(direct.value - lambert.value) <= direct.error_budget + lambert.error_budget


@given(
    st.floats(min_value=1e-3, max_value=2.0),
    st.floats(min_value=-1.0, max_value=1.0),
    st.sampled_from([0.05, 0.3, 0.7]),
)
@hyp_settings(max_examples=200, deadline=None)
def test_sector_membership(t_abs, fraction, theta):
    """A point inside the t-sector maps to a z whose 1 - z lies in every wider sector"""
    pc = PrecisionContext(bits=64)
    point = EvalPoint.from_polar(t_abs, fraction * (math.pi / 2 - theta), theta=theta, pc=pc)
    with pc.workprec():
        z = point.z
        for wider in (theta - 1e-9, theta / 2, 1e-3):
            assert series.sector_check(z, wider)
