import math

import numpy as np
import pytest
from scipy.integrate import quad

from gaoval.errors import (
    ConfigError,
    DomainError,
    FittingError,
    OutOfRangeError,
    ValidationError,
)
from gaoval.mortality import (
    CANONICAL_GOMPERTZ,
    GompertzModel,
    GompertzParams,
    MortalityTable,
    TabularModel,
    bundled_table_path,
    fit_gompertz,
    load_table,
    resolve_model,
)


def survival_by_hazard_quadrature(model, age, t):
    """Independent oracle: exp(-integral of the hazard)."""
    integral, _ = quad(
        lambda u: model.force_of_mortality(age + u), 0.0, t,
        epsabs=1e-13, epsrel=1e-12, limit=200,
    )
    return math.exp(-integral)


def make_synthetic_table(params, ages=range(35, 111), radix=100000.0):
    model = GompertzModel(params)
    base = ages[0]
    rows = [
        (age, radix * model.survival_probability(base, age - base)) for age in ages
    ]
    return MortalityTable.from_rows(rows)


class TestGompertzHazard:
    def test_hazard_at_modal_age_is_reciprocal_dispersion(self):
        params = CANONICAL_GOMPERTZ["ON-female-1970"]
        model = GompertzModel(params)
        assert model.force_of_mortality(params.m) == pytest.approx(
            1.0 / params.varsigma, rel=1e-12
        )

    def test_hazard_one_dispersion_past_mode(self):
        params = GompertzParams(m=80.0, varsigma=9.0)
        model = GompertzModel(params)
        assert model.force_of_mortality(80.0 + 9.0) == pytest.approx(
            math.e / 9.0, rel=1e-12
        )

    def test_hazard_direct_formula_female_2004(self):
        params = CANONICAL_GOMPERTZ["ON-female-2004"]
        model = GompertzModel(params)
        expected = math.exp((65.0 - 89.7615) / 9.3216) / 9.3216
        assert model.force_of_mortality(65.0) == pytest.approx(expected, rel=1e-12)

    def test_hazard_increasing_in_age(self):
        model = GompertzModel(CANONICAL_GOMPERTZ["ON-male-1970"])
        ages = np.linspace(20.0, 110.0, 50)
        hazards = model.force_of_mortality(ages)
        assert np.all(np.diff(hazards) > 0)

    def test_invalid_params(self):
        with pytest.raises(ValidationError):
            GompertzParams(m=80.0, varsigma=0.0)
        with pytest.raises(ValidationError):
            GompertzParams(m=-1.0, varsigma=9.0)


class TestSurvival:
    def test_zero_elapsed_time(self, all_models):
        for model in all_models.values():
            assert model.survival_probability(50.0, 0.0) == 1.0

    def test_matches_hazard_quadrature(self, female_1970):
        closed = female_1970.survival_probability(35.0, 30.0)
        oracle = survival_by_hazard_quadrature(female_1970, 35.0, 30.0)
        assert closed == pytest.approx(oracle, abs=1e-10)

    def test_closed_form_vs_quadrature_grid(self, female_1970):
        for age in (35.0, 50.0, 65.0, 80.0, 100.0):
            for t in (0.5, 5.0, 20.0, 40.0, 60.0):
                closed = female_1970.survival_probability(age, t)
                oracle = survival_by_hazard_quadrature(female_1970, age, t)
                assert abs(closed - oracle) < 1e-9

    def test_long_horizon_underflows(self, all_models):
        for model in all_models.values():
            assert model.survival_probability(35.0, 90.0) < 1e-6

    def test_semigroup_property(self, female_2004):
        chi = 35.0
        for t, s, u in [(0.0, 10.0, 25.0), (5.0, 6.0, 40.0), (1.0, 30.0, 31.0)]:
            left = female_2004.survival_probability(chi + t, s - t) * (
                female_2004.survival_probability(chi + s, u - s)
            )
            right = female_2004.survival_probability(chi + t, u - t)
            assert left == pytest.approx(right, abs=1e-10)

    def test_strictly_decreasing_in_t(self, female_1970):
        ts = np.linspace(0.0, 60.0, 40)
        survs = female_1970.survival_probability(65.0, ts)
        assert np.all(np.diff(survs) < 0)

    def test_negative_t_rejected(self, female_1970):
        with pytest.raises(DomainError):
            female_1970.survival_probability(65.0, -1.0)


class TestDeathDensity:
    def test_at_zero_equals_hazard(self, female_1970):
        assert female_1970.death_density(65.0, 0.0) == pytest.approx(
            female_1970.force_of_mortality(65.0), rel=1e-12
        )

    def test_integrates_to_one(self, female_1970):
        value, _ = quad(
            lambda t: female_1970.death_density(35.0, t), 0.0, 120.0,
            epsabs=1e-12, epsrel=1e-11, limit=300,
        )
        assert value == pytest.approx(1.0, abs=1e-8)

    def test_nonnegative(self, female_2004):
        ts = np.linspace(0.0, 80.0, 200)
        assert np.all(female_2004.death_density(35.0, ts) >= 0.0)


class TestMortalityTable:
    def test_normalizes_at_base_age(self):
        table = make_synthetic_table(CANONICAL_GOMPERTZ["ON-female-1970"])
        assert table.survivorship[0] == pytest.approx(1.0)
        assert table.base_age == 35

    def test_rejects_nonmonotone_ages(self):
        with pytest.raises(ValidationError):
            MortalityTable.from_rows([(35, 100.0), (35, 90.0), (36, 80.0)])

    def test_rejects_increasing_survivorship(self):
        with pytest.raises(ValidationError):
            MortalityTable.from_rows([(35, 100.0), (36, 110.0)])

    def test_truncates_terminal_zeros(self):
        table = MortalityTable.from_rows(
            [(35, 100.0), (36, 50.0), (37, 0.0), (38, 0.0)]
        )
        assert table.ages[-1] == 36


class TestTabularModel:
    def test_matches_generator_at_knots(self, female_1970):
        table = make_synthetic_table(CANONICAL_GOMPERTZ["ON-female-1970"])
        tabular = TabularModel(table)
        for age in (35.0, 50.0, 65.0):
            for t in (1.0, 10.0, 30.0):
                expected = female_1970.survival_probability(age, t) / 1.0
                got = tabular.survival_probability(age, t)
                assert got == pytest.approx(expected, rel=1e-12)

    def test_semigroup_exact_with_fractional_ages(self):
        table = make_synthetic_table(CANONICAL_GOMPERTZ["ON-male-2004"])
        tabular = TabularModel(table)
        left = tabular.survival_probability(40.25, 10.5) * (
            tabular.survival_probability(50.75, 9.25)
        )
        right = tabular.survival_probability(40.25, 19.75)
        assert left == pytest.approx(right, rel=1e-12)

    def test_hazard_is_cumhaz_slope(self):
        table = make_synthetic_table(CANONICAL_GOMPERTZ["ON-female-2004"])
        tabular = TabularModel(table)
        s1 = tabular.survival_probability(60.0, 0.0)
        s2 = tabular.survival_probability(60.0, 1.0)
        assert tabular.force_of_mortality(60.5) == pytest.approx(
            -math.log(s2 / s1), rel=1e-12
        )

    def test_out_of_range(self):
        table = make_synthetic_table(CANONICAL_GOMPERTZ["ON-female-1970"])
        tabular = TabularModel(table)
        with pytest.raises(OutOfRangeError):
            tabular.survival_probability(100.0, 20.0)
        with pytest.raises(OutOfRangeError):
            tabular.force_of_mortality(20.0)


class TestFitGompertz:
    @pytest.mark.parametrize("label", sorted(CANONICAL_GOMPERTZ))
    def test_round_trip(self, label):
        true = CANONICAL_GOMPERTZ[label]
        table = make_synthetic_table(true)
        fitted = fit_gompertz(table)
        assert fitted.m == pytest.approx(true.m, abs=1e-3)
        assert fitted.varsigma == pytest.approx(true.varsigma, abs=1e-3)

    def test_scale_invariance(self):
        true = CANONICAL_GOMPERTZ["ON-female-1970"]
        counts = make_synthetic_table(true, radix=100000.0)
        probs = make_synthetic_table(true, radix=1.0)
        fit_counts = fit_gompertz(counts)
        fit_probs = fit_gompertz(probs)
        assert fit_counts.m == pytest.approx(fit_probs.m, abs=1e-9)
        assert fit_counts.varsigma == pytest.approx(fit_probs.varsigma, abs=1e-9)

    def test_single_post_base_row_rejected(self):
        with pytest.raises(FittingError):
            fit_gompertz(MortalityTable.from_rows([(35, 100.0), (36, 90.0)]))

    def test_constant_survivorship_rejected(self):
        rows = [(35 + k, 100.0) for k in range(15)]
        with pytest.raises(FittingError):
            fit_gompertz(MortalityTable.from_rows(rows))


class TestIO:
    def test_bundled_tables_load_and_refit(self):
        path = bundled_table_path("ON-female-1970")
        table = load_table(path)
        fitted = fit_gompertz(table)
        true = CANONICAL_GOMPERTZ["ON-female-1970"]
        assert fitted.m == pytest.approx(true.m, abs=1e-3)
        assert fitted.varsigma == pytest.approx(true.varsigma, abs=1e-3)

    def test_parse_error_carries_line_number(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("age,lx\n35,100\n36,ninety\n")
        with pytest.raises(ConfigError, match="line 3"):
            load_table(bad)

    def test_missing_header(self, tmp_path):
        bad = tmp_path / "noheader.csv"
        bad.write_text("35,100\n36,90\n")
        with pytest.raises(ConfigError, match="header"):
            load_table(bad)

    def test_empty_file(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("")
        with pytest.raises(ConfigError, match="empty"):
            load_table(bad)

    def test_resolve_label_and_unknown(self):
        model = resolve_model("ON-male-2004")
        assert model.label == "ON-male-2004"
        with pytest.raises(ConfigError):
            resolve_model("XX-unknown-1900")
