from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from mpmath import mpc, mpf

from app.schemas.numeric import PrecisionContext
from app.services import hpnum
from app.services.errors import DomainError, PoleError, RangeError


def close(a, b, bits):
    return abs(a - b) <= mpf(2) ** (-bits) * max(1, abs(b))


class TestGamma:
    def test_integers(self, pc128):
        assert close(hpnum.gamma(1, pc128), 1, 125)
        assert close(hpnum.gamma(5, pc128), 24, 125)

    def test_half(self, pc128):
        with mpmath.workprec(200):
            expected = mpmath.sqrt(mpmath.pi)
        assert close(hpnum.gamma(0.5, pc128), expected, 124)

    def test_complex_against_library(self, pc128):
        s = mpc(0.3, 7.5)
        with mpmath.workprec(200):
            expected = mpmath.gamma(s)
        assert close(hpnum.gamma(s, pc128), expected, 120)

    @pytest.mark.parametrize("s", [0, -1, -3])
    def test_poles(self, pc128, s):
        with pytest.raises(PoleError):
            hpnum.gamma(s, pc128)

    def test_vertical_envelope(self, pc128):
        ratio = abs(hpnum.gamma(mpc(0.5, 50), pc128)) / hpnum.gamma_vertical_envelope(0.5, 50, pc128)
        assert abs(ratio - 1) < 0.01
        with mpmath.workprec(200):
            expected = mpmath.sqrt(2 * mpmath.pi) * mpmath.exp(-mpmath.pi / 2)
        assert close(hpnum.gamma_vertical_envelope(0.5, 1, pc128), expected, 120)

    def test_envelope_needs_tau_above_one(self, pc128):
        with pytest.raises(DomainError):
            hpnum.gamma_vertical_envelope(0.5, 0.5, pc128)

    @pytest.mark.parametrize("sigma", [0.5, 0.99, 1.5, 3.0])
    @pytest.mark.parametrize("tau", [0.0, 1.0, 5.0, 20.0, 60.0])
    def test_majorant_bounds_gamma(self, pc128, sigma, tau):
        s = mpc(sigma, tau)
        assert abs(hpnum.gamma(s, pc128)) <= hpnum.gamma_majorant(s, pc128)


class TestZeta:
    def test_two(self, pc128):
        with mpmath.workprec(200):
            expected = mpmath.pi ** 2 / 6
        assert close(hpnum.zeta(2, pc128), expected, 124)

    def test_zero(self, pc128):
        assert close(hpnum.zeta(0, pc128), mpf(-0.5), 124)

    def test_critical_line_against_library(self, pc128):
        s = mpc(0.5, 20)
        with mpmath.workprec(200):
            expected = mpmath.zeta(s)
        assert close(hpnum.zeta(s, pc128), expected, 118)

    def test_first_zero(self, pc128):
        with mpmath.workprec(200):
            rho = mpmath.zetazero(1)
        assert abs(hpnum.zeta(rho, pc128)) < mpf(2) ** -110

    def test_domain(self, pc128):
        with pytest.raises(PoleError):
            hpnum.zeta(1, pc128)
        with pytest.raises(RangeError):
            hpnum.zeta(-2, pc128)
        with pytest.raises(RangeError):
            hpnum.zeta(mpc(2, 2 * 10 ** 4), pc128)

    def test_with_error(self, pc128):
        value, err = hpnum.zeta_with_error(mpc(0.7, 30), pc128)
        assert err < mpf(2) ** -120

    def test_precisions_agree(self, pc128, pc256):
        s = mpc(0.9, 12)
        assert close(hpnum.zeta(s, pc128), hpnum.zeta(s, pc256), 120)


class TestZetaPrime:
    def test_against_finite_difference(self, pc128):
        h = mpf(2) ** -64
        with pc128.workprec():
            fd = (hpnum.zeta(2 + h, pc128) - hpnum.zeta(2 - h, pc128)) / (2 * h)
        assert abs(hpnum.zeta_prime(2, pc128) - fd) < mpf(2) ** -56

    def test_at_zero(self, pc128):
        with mpmath.workprec(200):
            expected = -mpmath.log(2 * mpmath.pi) / 2
        assert close(hpnum.zeta_prime(0, pc128), expected, 120)

    def test_negative_at_three(self, pc128):
        value = hpnum.zeta_prime(3, pc128)
        assert value.imag == 0
        assert value.real < 0

    def test_complex_against_library(self, pc128):
        s = mpc(1.2, 9)
        with mpmath.workprec(200):
            expected = mpmath.zeta(s, derivative=1)
        assert close(hpnum.zeta_prime(s, pc128), expected, 115)


class TestBernoulli:
    @pytest.mark.parametrize("n, expected", [
        (0, Fraction(1)),
        (1, Fraction(-1, 2)),
        (2, Fraction(1, 6)),
        (3, Fraction(0)),
        (4, Fraction(-1, 30)),
        (12, Fraction(-691, 2730)),
    ])
    def test_values(self, n, expected):
        assert hpnum.bernoulli(n) == expected

    def test_odd_vanish(self):
        assert all(hpnum.bernoulli(n) == 0 for n in range(3, 60, 2))

    def test_cap(self):
        with pytest.raises(RangeError):
            hpnum.bernoulli(300, cap=256)
        with pytest.raises(DomainError):
            hpnum.bernoulli(-1)


def test_euler_gamma_two_ways(pc128, pc256):
    assert close(hpnum.euler_gamma(pc128), hpnum.euler_gamma_em(pc128), 124)
    assert close(hpnum.euler_gamma(pc256), hpnum.euler_gamma_em(pc256), 250)


def test_em_cutoffs_grow_with_height():
    pc = PrecisionContext(bits=128)
    n_low, _ = hpnum.em_cutoffs(mpc(0.5, 10), pc)
    n_high, _ = hpnum.em_cutoffs(mpc(0.5, 1000), pc)
    assert n_high >= 500 > n_low


@given(st.floats(min_value=0.05, max_value=2.95), st.floats(min_value=-100, max_value=100))
@hyp_settings(max_examples=50, deadline=None)
def test_gamma_functional_equation(sigma, tau):
    pc = PrecisionContext(bits=128)
    s = mpc(sigma, tau)
    with pc.workprec():
        rhs = s * hpnum.gamma(s, pc)
        shifted = s + 1
    assert close(hpnum.gamma(shifted, pc), rhs, pc.bits - 8)


@given(st.floats(min_value=-0.9, max_value=3.0), st.floats(min_value=1.0, max_value=200.0))
@hyp_settings(max_examples=30, deadline=None)
def test_conjugate_symmetry(sigma, tau):
    pc = PrecisionContext(bits=128)
    s = mpc(sigma, tau)
    conj = mpc(sigma, -tau)
    assert close(hpnum.zeta(conj, pc), mpmath.conj(hpnum.zeta(s, pc)), 120)
    assert close(hpnum.gamma(conj, pc), mpmath.conj(hpnum.gamma(s, pc)), 120)


@pytest.mark.parametrize("operation, s", [
    (hpnum.gamma, mpc(0.7, 25)),
    (hpnum.gamma, mpc(2.5, -60)),
    (hpnum.zeta, mpc(0.5, 14)),
    (hpnum.zeta, mpc(-0.5, 3)),
    (hpnum.zeta_prime, mpc(1.5, 40)),
    (hpnum.zeta_prime, mpc(0.3, -7)),
])
def test_doubling_precision_keeps_agreed_digits(operation, s):
    """Values at 64, 128 and 256 bits agree to the coarser precision less a few bits"""
    values = [operation(s, PrecisionContext(bits=bits)) for bits in (64, 128, 256)]
    assert close(values[0], values[2], 52)
    assert close(values[1], values[2], 116)


def test_doubling_precision_euler_gamma():
    values = [hpnum.euler_gamma(PrecisionContext(bits=bits)) for bits in (64, 128, 256)]
    assert close(values[0], values[2], 60)
    assert close(values[1], values[2], 124)
