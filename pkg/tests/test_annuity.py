import math

import mpmath as mp
import numpy as np
import pytest

from gaoval.annuity import (
    ConversionTerms,
    annuity_certain_fv,
    annuity_certain_pv,
    annuity_factor,
    implicit_rate,
    monthly_equivalents,
    monthly_rate,
)
from gaoval.errors import NoSolutionError, ValidationError
from gaoval.mortality import CANONICAL_GOMPERTZ

from conftest import ConstantHazardModel


def gompertz_annuity_gamma_oracle(params, age, rate):
    """Independent closed form via the upper incomplete gamma function:

        abar = vs * e^z * z^(rate*vs) * Gamma(-rate*vs, z),  z = e^((age-m)/vs)
    """
    vs = mp.mpf(params.varsigma)
    z = mp.e ** ((mp.mpf(age) - mp.mpf(params.m)) / vs)
    return float(vs * mp.e**z * z ** (mp.mpf(rate) * vs) * mp.gammainc(-mp.mpf(rate) * vs, z))


class TestAnnuityFactor:
    def test_constant_hazard_closed_form(self):
        model = ConstantHazardModel(0.05)
        for r in (0.0, 0.03, 0.2):
            assert annuity_factor(model, 70.0, r) == pytest.approx(
                1.0 / (r + 0.05), rel=1e-9
            )

    def test_high_rate_bound(self, female_1970):
        assert annuity_factor(female_1970, 65.0, 10.0) < 0.1

    def test_bounded_by_perpetuity(self, female_1970):
        for r in (0.01, 0.05, 0.1, 0.3):
            assert annuity_factor(female_1970, 65.0, r) < 1.0 / r

    def test_against_incomplete_gamma_oracle(self, all_models):
        for label, model in all_models.items():
            params = CANONICAL_GOMPERTZ[label]
            for rate in (0.02, 0.0754, 0.12):
                quadrature = annuity_factor(model, 65.0, rate)
                oracle = gompertz_annuity_gamma_oracle(params, 65.0, rate)
                assert quadrature == pytest.approx(oracle, rel=1e-9)

    def test_unit_conversion_rate_value(self, female_1970):
        # A conversion of one-ninth prices near a factor of 9 at rates
        # in the high-single-digit range.
        assert annuity_factor(female_1970, 65.0, 0.0754) == pytest.approx(9.0, abs=0.1)


class TestImplicitRate:
    def test_canonical_values_female(self, female_1970, female_2004):
        # Frozen regression values computed from the canonical parameter
        # sets (see also the acceptance suite for the published targets).
        assert implicit_rate(female_1970, 65.0, 1.0 / 9.0) == pytest.approx(
            0.0765981, abs=1e-6
        )
        assert implicit_rate(female_2004, 65.0, 1.0 / 9.0) == pytest.approx(
            0.0877801, abs=1e-6
        )

    def test_round_trip(self, female_1970, female_2004):
        for model in (female_1970, female_2004):
            for h in np.linspace(1.0 / 20.0, 1.0 / 5.0, 50):
                r_h = implicit_rate(model, 65.0, h)
                assert abs(annuity_factor(model, 65.0, r_h) - 1.0 / h) < 1e-6

    def test_strictly_increasing_in_h(self, female_1970):
        hs = np.linspace(1.0 / 15.0, 1.0 / 6.0, 12)
        rates = [implicit_rate(female_1970, 65.0, h) for h in hs]
        assert np.all(np.diff(rates) > 0)

    def test_longevity_improvement_raises_rate(self, female_1970, female_2004):
        for h in np.linspace(1.0 / 15.0, 1.0 / 6.0, 10):
            assert implicit_rate(female_2004, 65.0, h) > implicit_rate(
                female_1970, 65.0, h
            )

    def test_constant_hazard_inversion(self):
        lam, r_true = 0.04, 0.06
        model = ConstantHazardModel(lam)
        h = r_true + lam  # 1/h = 1/(r+lam)
        assert implicit_rate(model, 70.0, h) == pytest.approx(r_true, abs=1e-9)

    def test_unattainable_target(self, female_1970):
        with pytest.raises(NoSolutionError):
            implicit_rate(female_1970, 65.0, 1e-9)  # 1/h = 1e9 years
        with pytest.raises(NoSolutionError):
            implicit_rate(female_1970, 65.0, 2.0)  # 1/h below abar(hi)

    def test_divergent_low_end_still_solves(self):
        # Constant hazard makes the factor diverge at the bracket's low
        # end; the solver must find the root anyway.
        model = ConstantHazardModel(0.04)
        r_h = implicit_rate(model, 70.0, 1.0 / 30.0)  # 1/h = 30 = 1/(r+lam)
        assert r_h == pytest.approx(1.0 / 30.0 - 0.04, abs=1e-9)


class TestDiscreteFactors:
    def test_monthly_rate_zero(self):
        assert monthly_rate(0.0).i == 0.0

    def test_monthly_rate_values(self):
        assert monthly_rate(0.05).i == pytest.approx(math.expm1(0.05 / 12), rel=1e-12)
        assert monthly_rate(0.05).i == pytest.approx(0.0041753, abs=1e-7)
        assert monthly_rate(0.085).i == pytest.approx(0.0071085, abs=1e-7)

    def test_pv_single_period(self):
        i = 0.004
        assert annuity_certain_pv(1, i) == pytest.approx(1.0 / (1.0 + i), rel=1e-12)

    def test_fv_single_period(self):
        assert annuity_certain_fv(1, 0.004) == pytest.approx(1.0, rel=1e-12)

    def test_zero_rate_limits(self):
        assert annuity_certain_pv(360, 0.0) == 360.0
        assert annuity_certain_fv(360, 0.0) == 360.0

    def test_thirty_year_monthly_values(self):
        i = monthly_rate(0.035).i
        pv = annuity_certain_pv(360, i)
        fv = annuity_certain_fv(360, i)
        # Direct formula evaluation as the oracle.
        assert pv == pytest.approx((1 - (1 + i) ** -360) / i, rel=1e-12)
        assert pv == pytest.approx(222.56, abs=0.01)
        assert fv == pytest.approx(635.98, abs=0.01)

    def test_fv_pv_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(1, 600))
            i = float(rng.uniform(-0.5, 0.2))
            assert annuity_certain_fv(n, i) == pytest.approx(
                (1 + i) ** n * annuity_certain_pv(n, i), rel=1e-9
            )


class TestMonthlyEquivalents:
    def test_published_rows_table_mode(self):
        rows = [
            (0.035, 266342.0, 550.0, 419.0),
            (0.050, 95450.0, 420.0, 115.0),
            (0.085, 8395.0, 211.0, 5.0),
        ]
        for r, l_star, p12_ref, l12_ref in rows:
            p12, l12 = monthly_equivalents(350000.0, l_star, r, 30.0, mode="table")
            assert p12 == pytest.approx(p12_ref, abs=1.0)
            assert l12 == pytest.approx(l12_ref, abs=1.0)

    def test_text_mode_uses_present_value_factor(self):
        i = monthly_rate(0.035).i
        _, l12 = monthly_equivalents(350000.0, 266342.0, 0.035, 30.0, mode="text")
        assert l12 == pytest.approx(266342.0 / annuity_certain_pv(360, i), rel=1e-12)
        # The two conventions differ by the 30-year accumulation factor.
        _, l12_table = monthly_equivalents(350000.0, 266342.0, 0.035, 30.0)
        assert l12 == pytest.approx(l12_table * (1 + i) ** 360, rel=1e-12)

    def test_zero_lump_sum(self):
        _, l12 = monthly_equivalents(350000.0, 0.0, 0.05, 30.0)
        assert l12 == 0.0

    def test_mode_validation(self):
        with pytest.raises(ValidationError):
            monthly_equivalents(350000.0, 0.0, 0.05, 30.0, mode="both")


class TestConversionTerms:
    def test_income(self):
        terms = ConversionTerms(h=1.0 / 9.0, fund=350000.0)
        assert terms.income == pytest.approx(38888.888889, abs=1e-5)

    def test_invalid(self):
        with pytest.raises(ValidationError):
            ConversionTerms(h=0.0, fund=1.0)
