from fractions import Fraction

import mpmath
import numpy as np
import pytest
from mpmath import mpf
from pydantic import ValidationError

from app.schemas.arith import ArithFunctionId
from app.schemas.asym import EnvelopeParams, MainTermSource, SlowlyVarying
from app.schemas.numeric import EvalPoint, PrecisionContext
from app.services import arith, asym, mellin, series
from app.services.errors import DomainError, UnsupportedFunctionError

RESIDUE = MainTermSource.RESIDUE_DERIVED
LITERAL = MainTermSource.PAPER_LITERAL


def agree_to_bits(a, b, bits=100):
    return abs(a - b) <= mpf(2) ** (-bits) * abs(b)


class TestTauExpansion:
    def test_coefficients(self):
        assert [asym.tau_coefficient(n) for n in range(4)] == [
            Fraction(1, 4), Fraction(1, 144), Fraction(0), Fraction(1, 86400),
        ]

    @pytest.mark.parametrize("K, expected_order", [(2, 3), (3, 3), (4, 5)])
    def test_order_of_accuracy(self, pc128, K, expected_order):
        ts = [mpf("0.1"), mpf("0.05"), mpf("0.025")]
        errors = []
        for t in ts:
            direct = series.eval_exp_series(ArithFunctionId.TAU_DIVISORS, EvalPoint.real(t), pc128, 1e-28)
            errors.append(abs(direct.value - asym.tau_expansion(t, K, pc128)))
        slope = np.polyfit(np.log([float(t) for t in ts]), np.log([float(e) for e in errors]), 1)[0]
        assert abs(slope - expected_order) <= 0.35

    def test_residue_signs_beat_uniform_minus(self, pc128):
        t = mpf("0.1")
        direct = series.eval_exp_series(ArithFunctionId.TAU_DIVISORS, EvalPoint.real(t), pc128, 1e-25).value
        residue = abs(direct - asym.tau_expansion(t, 2, pc128, RESIDUE))
        literal = abs(direct - asym.tau_expansion(t, 2, pc128, LITERAL))
        assert residue < 1e-6
        assert abs(literal - mpf(0.5)) < 0.01

    def test_domain(self, pc128):
        with pytest.raises(DomainError):
            asym.tau_expansion(-1, 2, pc128)
        with pytest.raises(DomainError):
            asym.tau_expansion(0.1, -1, pc128)


class TestMainTerms:
    @pytest.mark.parametrize("t", ["1e-2", "1e-3"])
    def test_mangoldt_residual_bound(self, pc128, t):
        t = mpf(t)
        residual = asym.corollary_residual(ArithFunctionId.VON_MANGOLDT, mpmath.exp(-t), LITERAL, pc128, 1e-8)
        assert abs(residual) < mpf(0.05) / t

    def test_mangoldt_residual_limit(self, pc128):
        residual = asym.corollary_residual(ArithFunctionId.VON_MANGOLDT, mpmath.exp(-mpf("1e-3")), LITERAL,
                                           pc128, 1e-8)
        assert abs(residual.real - (-mpmath.log(2 * mpmath.pi) - mpf(0.5))) < 0.01

    def test_residue_main_term_for_mangoldt(self, pc128):
        t = mpf("1e-3")
        residual = asym.corollary_residual(ArithFunctionId.VON_MANGOLDT, mpmath.exp(-t), RESIDUE, pc128, 1e-8)
        assert abs(residual.real + mpmath.log(2 * mpmath.pi)) < 0.01

    @pytest.mark.parametrize("fn_id", [ArithFunctionId.MOBIUS, ArithFunctionId.LIOUVILLE])
    @pytest.mark.parametrize("t", ["1e-1", "1e-2", "1e-3"])
    def test_no_pole_functions_stay_small(self, pc128, fn_id, t):
        t = mpf(t)
        assert asym.corollary_main_term(fn_id, mpmath.exp(-t), RESIDUE, pc128) == 0
        residual = asym.corollary_residual(fn_id, mpmath.exp(-t), RESIDUE, pc128, 1e-8)
        assert abs(residual) < 10 / mpmath.sqrt(t)

    def test_two_omega_adjudication(self, pc128):
        report = asym.main_term_adjudication(mpf("1e-3"), pc128, 1e-8)
        residue = abs(report["residue-derived"]["residual"])
        literal = abs(report["paper-literal"]["residual"])
        assert residue <= literal / 10
        assert report["verdict"] == "residue-derived"
        # next residue is D(0) = zeta(0) = -1/2
        assert abs(report["residue-derived"]["residual"] + mpf(0.5)) < 0.01

    def test_main_term_table(self, pc128):
        table = asym.main_term_table(["1e-3", "1e-2"], pc128, 1e-8)
        assert table.columns == [
            "t", "direct",
            "main[paper-literal]", "residual[paper-literal]",
            "main[residue-derived]", "residual[residue-derived]",
            "verdict",
        ]
        assert table.column("t") == [mpf("1e-2"), mpf("1e-3")]
        assert table.column("verdict") == ["residue-derived", "residue-derived"]
        for literal, residue in zip(table.column("residual[paper-literal]"),
                                    table.column("residual[residue-derived]")):
            assert abs(residue) < abs(literal)

    def test_forms(self):
        assert asym.main_term_form(ArithFunctionId.MOBIUS, LITERAL).description == "0"
        assert asym.main_term_form(ArithFunctionId.VON_MANGOLDT, RESIDUE).description == "1/t"
        with pytest.raises(UnsupportedFunctionError):
            asym.main_term_form(ArithFunctionId.TAU_DIVISORS, RESIDUE)

    def test_source_aliases(self):
        assert MainTermSource.parse("paper") == LITERAL
        assert MainTermSource.parse("Residue-Derived") == RESIDUE
        with pytest.raises(ValueError):
            MainTermSource.parse("folklore")


class TestEnvelopes:
    @pytest.mark.parametrize("t", ["1e-10", "1e-50", "1e-1000"])
    def test_error_envelope_precision(self, pc128, pc256, t):
        assert agree_to_bits(asym.error_envelope_E(t, pc=pc128), asym.error_envelope_E(t, pc=pc256))
        assert agree_to_bits(asym.abelian_mu_envelope(t, 1, pc128), asym.abelian_mu_envelope(t, 1, pc256))
        with mpmath.workprec(128):
            low = asym.choose_T(t)
        with mpmath.workprec(256):
            high = asym.choose_T(t)
        assert agree_to_bits(low, high)

    @pytest.mark.parametrize("x", [100, 10 ** 6, 10 ** 20])
    def test_walfisz_precision(self, pc128, pc256, x):
        assert agree_to_bits(asym.walfisz_envelope(x, 1, pc128), asym.walfisz_envelope(x, 1, pc256))

    @pytest.mark.parametrize("tau", [5, 100, 10 ** 4])
    def test_region_precision(self, tau):
        region = mellin.default_region()
        with mpmath.workprec(128):
            low = mellin.g_of_tau(region, tau)
        with mpmath.workprec(256):
            high = mellin.g_of_tau(region, tau)
        assert agree_to_bits(low, high)

    def test_envelope_below_one_over_t(self, pc128):
        t = mpf("1e-50")
        assert asym.error_envelope_E(t, pc=pc128) < 1 / t
        assert asym.abelian_mu_envelope(t, 1, pc128) < 1 / t

    def test_triple_log_guard(self):
        with pytest.raises(DomainError):
            asym.error_envelope_E("1e-3")
        with pytest.raises(DomainError):
            asym.walfisz_envelope(2, 1)
        with pytest.raises(DomainError):
            asym.abelian_mu_envelope("0.5", 1)

    def test_params(self):
        with pytest.raises(ValidationError):
            EnvelopeParams(b=0.01, epsilon=0.02)
        assert EnvelopeParams(b=0.05, epsilon=0.01).rate == pytest.approx(0.04)

    def test_choose_T(self):
        with mpmath.workprec(64):
            L = mpmath.log(mpf(10) ** 10)
            assert abs(asym.choose_T("1e-10") - L / mpmath.log(L) ** (mpf(2) / 3)) < 1e-12
        with pytest.raises(DomainError):
            asym.choose_T(0.5)

    @pytest.mark.parametrize("c", [0.1, 1])
    def test_crossover(self, pc128, c):
        L = asym.envelope_crossover(c, pc=pc128)
        assert L > asym.E_TO_E

        def gap(x):
            return asym.log_error_envelope(x) - asym.log_abelian_mu_envelope(x, c)

        with pc128.workprec():
            assert gap(L * mpf(1.001)) < 0 < gap(L * mpf(0.999))

    def test_crossover_moves_out_with_c(self, pc128):
        assert asym.envelope_crossover(1, pc=pc128) > asym.envelope_crossover(0.1, pc=pc128)


class TestWalfiszFit:
    def test_fit_bounds_mertens(self, mobius_table):
        c = asym.fit_walfisz_constant(mobius_table)
        assert c > 0
        for x in (20, 100, 1000, 10 ** 4, 10 ** 5):
            assert abs(arith.mertens(mobius_table, x)) <= asym.walfisz_envelope(x, c) * (1 + 1e-9)

    def test_needs_mobius_prefix_sums(self):
        with pytest.raises(DomainError):
            asym.fit_walfisz_constant(arith.sieve(ArithFunctionId.MOBIUS, 100))
        with pytest.raises(DomainError):
            asym.fit_walfisz_constant(arith.sieve(ArithFunctionId.LIOUVILLE, 100, prefix_sums=True))


class TestAbelianTransfer:
    def test_linear_sequence(self, pc128):
        z = 1 - mpf("1e-4")
        with pc128.workprec():
            exact = z / (1 - z) ** 2
        ratio = asym.abelian_transfer(1, "1", z, pc128) / exact
        assert abs(ratio - 1) < 2e-4

    def test_n_log_n(self, pc128):
        """sum n log n z^n against Gamma(2) (1-z)^-2 log(1/(1-z)); the gap is about (1-gamma)/log x"""
        ratios = []
        for gap in (1e-2, 1e-3, 1e-4):
            n = np.arange(1, int(60 / gap), dtype=np.float64)
            direct = float(np.sum(n * np.log(n) * np.exp(n * np.log1p(-gap))))
            approx = asym.abelian_transfer(1, SlowlyVarying(k=1), 1 - mpf(gap), pc128)
            ratio = direct / float(approx)
            predicted = 1 + (1 - float(mpmath.euler)) / np.log(1 / gap)
            assert abs(ratio - predicted) < 0.02
            ratios.append(ratio)
        assert ratios[0] > ratios[1] > ratios[2] > 1

    def test_slowly_varying_parse(self):
        assert SlowlyVarying.parse("log*loglog^2") == SlowlyVarying(k=1, m=2)
        assert SlowlyVarying.parse("log^3") == SlowlyVarying(k=3)
        assert SlowlyVarying.parse("1") == SlowlyVarying()
        with pytest.raises(UnsupportedFunctionError):
            asym.abelian_transfer(1, "exp", 0.5)

    def test_domain(self):
        with pytest.raises(DomainError):
            asym.abelian_transfer(0, "log", 0.5)
        with pytest.raises(DomainError):
            asym.abelian_transfer(1, "log", 1.0)
        with pytest.raises(DomainError):
            asym.abelian_transfer(1, "loglog", 0.5)


class TestProbes:
    def test_fake_asymptotics(self, pc128):
        table = asym.fake_asymptotics_probe(["1e-3", "1e-2"], pc128)
        assert table.columns == ["t", "F", "F+2", "(F+2)*sqrt(t)"]
        assert table.column("t") == [mpf("1e-2"), mpf("1e-3")]
        assert all(abs(v) < 0.5 for v in table.column("F+2"))

    @pytest.mark.slow
    def test_fake_asymptotics_full_grid(self, pc128):
        grid = ["1e-2", "1e-3", "1e-4", "1e-5", "1e-6"]
        table = asym.fake_asymptotics_probe(grid, pc128, memory_cap=10 ** 8)
        assert len(table.rows) == 5
        assert all(abs(v) < 0.5 for v in table.column("F+2"))

    def test_fake_asymptotics_range(self, pc128):
        with pytest.raises(DomainError):
            asym.fake_asymptotics_probe([0.5], pc128)

    def test_rh_window(self, pc128):
        zs = [1 - mpf("1e-2"), 1 - mpf("1e-3")]
        series_side, mertens_side = asym.rh_window_probe(0.5, zs, pc128)
        assert len(series_side.rows) == len(mertens_side.rows) == 2
        assert mertens_side.column("x") == [100, 1000]
        # M(100) = 1, M(1000) = 2
        assert abs(mertens_side.rows[0][1] - mpf("0.1")) < 1e-15
        assert abs(mertens_side.rows[1][1] - 2 / mpmath.sqrt(1000)) < 1e-15

    def test_rh_window_eta(self, pc128):
        with pytest.raises(DomainError):
            asym.rh_window_probe(0.3, [0.9], pc128)

    def test_delange(self, pc128):
        table = asym.delange_probe([1 - mpf("1e-2")], pc128)
        z, f, scaled = table.rows[0]
        with pc128.workprec():
            assert abs(scaled - f * mpmath.sqrt(1 - z)) < 1e-30

    def test_prime_abelian(self, pc128):
        table = asym.prime_abelian_probe([1 - mpf("1e-2"), 1 - mpf("1e-4")], pc128)
        assert all(1 < r < 1.5 for r in table.column("ratio"))

    def test_balance_report(self, pc128):
        table = asym.balance_report(["1e-2", "1e-4", "1e-30"], pc128)
        assert table.column("t") == [mpf("1e-2"), mpf("1e-4"), mpf("1e-30")]
        assert table.column("clamped") == [0, 0, 1]
        assert table.column("T")[-1] == 14
        for row in table.rows:
            assert all(v > 0 for v in row[4:7])


def test_envelope_agrees_with_float_where_representable():
    t = 1e-10
    pc = PrecisionContext(bits=64)
    L = np.log(1 / t)
    rate = EnvelopeParams().rate
    expected = np.exp(L - rate * L / (np.log(L) ** (2 / 3) * np.log(np.log(L)) ** (1 / 3)))
    assert float(asym.error_envelope_E(t, pc=pc)) == pytest.approx(expected, rel=1e-12)
