from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pathdx.errors import UndefinedFitError
from pathdx.evaluation import (
    ForecastOutcome,
    calibration_score,
    independence_likelihood,
    independence_posterior,
    jackknife_compare,
    regression_area,
    run_benchmark,
)
from pathdx.inference import FindingSet, hood_rev, posterior
from pathdx.kb_model import (
    PRESENT,
    constant,
    disease_root,
    pathstate,
    symptom_ref,
)
from pathdx.simulate import DatasetConfig, generate_dataset

from support import PATIENT, build_kb


def fig1_kb(p, q, r, b=0.0):
    tree = disease_root("dz", (constant(p), pathstate(
        "ps", (constant(q), symptom_ref("anorexia")), (constant(r), symptom_ref("nausea")))))
    return build_kb({"dz": tree}, {"anorexia": b, "nausea": b})


class TestIndependenceLikelihood:
    def test_single_symptom_chain_equals_hood_rev(self):
        tree = disease_root("dz", (constant(0.8), pathstate("p", (constant(0.5), symptom_ref("a")))))
        kb = build_kb({"dz": tree}, {"a": 0.15})
        f = FindingSet({"a": PRESENT}, 0.0)
        indep = independence_likelihood(kb, "dz", f, 0.0, PATIENT)
        causal = hood_rev(tree, f, 0.0, kb, PATIENT)
        assert indep == pytest.approx(causal, abs=1e-15)

    def test_fig1_contrast_both_present(self):
        rng = np.random.default_rng(19)
        for _ in range(100):
            p, q, r = rng.uniform(0.05, 1.0, size=3)
            kb = fig1_kb(p, q, r)
            f = FindingSet({"anorexia": PRESENT, "nausea": PRESENT}, 0.0)
            causal = hood_rev(kb.diseases[0].tree, f, 0.0, kb, PATIENT)
            indep = independence_likelihood(kb, "dz", f, 0.0, PATIENT)
            assert causal == pytest.approx(p * q * r, rel=1e-12)
            assert indep == pytest.approx((p * q) * (p * r), rel=1e-12)
            assert indep / causal == pytest.approx(p, rel=1e-12)

    def test_underestimates_joint_presence_of_shared_cluster(self):
        # the paper's point: treating cluster symptoms as independent makes
        # their co-occurrence look unrealistically infrequent
        rng = np.random.default_rng(29)
        for _ in range(100):
            p, q, r = rng.uniform(0.0, 1.0, size=3)
            kb = fig1_kb(p, q, r)
            f = FindingSet({"anorexia": PRESENT, "nausea": PRESENT}, 0.0)
            causal = hood_rev(kb.diseases[0].tree, f, 0.0, kb, PATIENT)
            indep = independence_likelihood(kb, "dz", f, 0.0, PATIENT)
            assert indep <= causal + 1e-15

    def test_posterior_mirrors_causal_pipeline(self, fixture_kb):
        f = FindingSet({"rlq_pain": PRESENT, "nausea": PRESENT}, 18.0)
        pat = PATIENT
        rep = independence_posterior(fixture_kb, pat, f)
        assert sum(rep.posteriors.values()) == pytest.approx(1.0, abs=1e-12)
        causal = posterior(fixture_kb, pat, f)
        assert rep.posteriors.keys() == causal.posteriors.keys()


class TestCalibrationScore:
    def test_half_right_at_even_odds_is_perfect(self):
        data = [ForecastOutcome(0.5, o) for o in (1, 0, 1, 0)]
        score, table = calibration_score(data, bins=10)
        assert score == 0.0
        assert len(table) == 1 and table[0].n == 4

    def test_perfect_binary_forecasts(self):
        data = [ForecastOutcome(1.0, 1), ForecastOutcome(0.0, 0), ForecastOutcome(1.0, 1)]
        assert calibration_score(data, bins=10)[0] == 0.0

    def test_hand_computed_four_case_example(self):
        data = [ForecastOutcome(0.8, 1), ForecastOutcome(0.8, 1),
                ForecastOutcome(0.8, 0), ForecastOutcome(0.2, 0)]
        expected = float(
            (3 * (Fraction(8, 10) - Fraction(2, 3)) ** 2 + 1 * Fraction(2, 10) ** 2) / 4
        )
        score, table = calibration_score(data, bins=10)
        assert score == pytest.approx(expected, abs=1e-15)
        assert [row.n for row in table] == [1, 3]

    def test_forecast_of_exactly_one_lands_in_top_bin(self):
        score, table = calibration_score([ForecastOutcome(1.0, 1)], bins=10)
        assert table[0].lo == pytest.approx(0.9)

    @given(st.lists(
        st.tuples(st.floats(0, 1, allow_nan=False), st.integers(0, 1)),
        min_size=1, max_size=60,
    ))
    def test_nonnegative_and_zero_iff_bins_agree(self, rows):
        data = [ForecastOutcome(f, o) for f, o in rows]
        score, table = calibration_score(data, bins=10)
        assert score >= 0.0
        agree = all(row.mean_forecast == pytest.approx(row.observed, abs=1e-15) for row in table)
        assert (score <= 1e-30) == agree


class TestRegressionArea:
    def test_identity_data_has_zero_area(self):
        data = [ForecastOutcome(0.0, 0), ForecastOutcome(0.0, 0),
                ForecastOutcome(1.0, 1), ForecastOutcome(1.0, 1),
                ForecastOutcome(0.5, 0), ForecastOutcome(0.5, 1)]
        assert regression_area(data) == pytest.approx(0.0, abs=1e-12)

    def test_constant_fit_closed_form(self):
        data = [ForecastOutcome(f, o) for f, o in
                [(0.1, 0), (0.1, 1), (0.5, 0), (0.5, 1), (0.9, 0), (0.9, 1)]]
        # fit is the constant 1/2; area = c^2 - c + 1/2 = 1/4
        assert regression_area(data) == pytest.approx(0.25, abs=1e-12)

    def test_grid_close_to_fine_reference(self):
        rng = np.random.default_rng(37)
        f = rng.uniform(0, 1, size=300)
        o = (rng.uniform(0, 1, size=300) < f ** 2).astype(int)  # miscalibrated
        data = [ForecastOutcome(float(ff), int(oo)) for ff, oo in zip(f, o)]
        coarse = regression_area(data)
        fine = regression_area(data, grid_step=1e-6)
        assert abs(coarse - fine) <= 1e-5

    def test_identical_forecasts_rank_deficient(self):
        data = [ForecastOutcome(0.4, o) for o in (0, 1, 0, 1)]
        with pytest.raises(UndefinedFitError):
            regression_area(data)

    def test_invariant_to_case_order(self):
        rng = np.random.default_rng(41)
        data = [ForecastOutcome(float(f), int(o)) for f, o in
                zip(rng.uniform(0, 1, 50), rng.integers(0, 2, 50))]
        shuffled = list(data)
        rng.shuffle(shuffled)
        assert regression_area(data) == pytest.approx(regression_area(shuffled), abs=1e-14)

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            regression_area([ForecastOutcome(0.4, 0), ForecastOutcome(0.6, 1)])


class TestJackknife:
    def test_identical_columns_tie(self):
        rng = np.random.default_rng(43)
        paired = [(float(f), float(f), int(o)) for f, o in
                  zip(rng.uniform(0, 1, 30), rng.integers(0, 2, 30))]
        result = jackknife_compare(paired)
        assert result.tie and result.diff == 0.0 and result.p is None

    def test_label_swap_flips_sign_keeps_p(self):
        rng = np.random.default_rng(47)
        paired = [(float(c), float(i), int(o)) for c, i, o in
                  zip(rng.uniform(0, 1, 40), rng.uniform(0, 1, 40), rng.integers(0, 2, 40))]
        fwd = jackknife_compare(paired)
        rev = jackknife_compare([(i, c, o) for c, i, o in paired])
        assert rev.diff == pytest.approx(-fwd.diff, abs=1e-15)
        assert rev.p == pytest.approx(fwd.p, rel=1e-9)

    def test_fast_loo_matches_naive_recomputation(self):
        rng = np.random.default_rng(53)
        paired = [(float(c), float(i), int(o)) for c, i, o in
                  zip(rng.uniform(0, 1, 25), rng.uniform(0, 1, 25), rng.integers(0, 2, 25))]
        fast = jackknife_compare(paired, bins=10)

        def naive_delta(rows):
            causal = [ForecastOutcome(c, o) for c, _i, o in rows]
            indep = [ForecastOutcome(i, o) for _c, i, o in rows]
            return calibration_score(indep, 10)[0] - calibration_score(causal, 10)[0]

        n = len(paired)
        full = naive_delta(paired)
        pseudo = np.array([
            n * full - (n - 1) * naive_delta(paired[:k] + paired[k + 1:]) for k in range(n)
        ])
        assert fast.diff == pytest.approx(full, abs=1e-12)
        se = float((pseudo.var(ddof=1) / n) ** 0.5)
        assert fast.se == pytest.approx(se, rel=1e-9)

    def test_requires_ten_cases(self):
        with pytest.raises(ValueError):
            jackknife_compare([(0.5, 0.5, 1)] * 9)


class TestRunBenchmark:
    def test_causal_generator_favors_causal_model(self, fixture_kb):
        cases = generate_dataset(fixture_kb, DatasetConfig(
            n_per_class=200, seed=314,
            classes=("appendicitis", "nonspecific_abdominal_pain")))
        report = run_benchmark(fixture_kb, cases, "appendicitis",
                               priors_override={"appendicitis": 0.5,
                                                "nonspecific_abdominal_pain": 0.5})
        assert report.causal_score <= report.independence_score
        assert report.jackknife.diff > 0

    def test_single_case_report(self, fixture_kb):
        cases = generate_dataset(fixture_kb, DatasetConfig(
            n_per_class=1, seed=5, classes=("appendicitis",)))
        report = run_benchmark(fixture_kb, cases, "appendicitis")
        assert report.n_cases == 1
        assert len(report.causal_bins) == 1
        assert report.jackknife is None and report.causal_area is None
        assert report.to_text()

    def test_priors_override_recorded(self, fixture_kb):
        cases = generate_dataset(fixture_kb, DatasetConfig(
            n_per_class=5, seed=6, classes=("appendicitis", "gastroenteritis")))
        override = {"appendicitis": 0.5, "gastroenteritis": 0.5}
        report = run_benchmark(fixture_kb, cases, "appendicitis", priors_override=override)
        assert report.priors_override == override
        assert report.to_dict()["priors_override"] == override

    def test_report_json_round_trips(self, fixture_kb):
        import json

        cases = generate_dataset(fixture_kb, DatasetConfig(
            n_per_class=20, seed=8, classes=("appendicitis", "nonspecific_abdominal_pain")))
        report = run_benchmark(fixture_kb, cases, "appendicitis")
        doc = json.loads(report.to_json())
        assert doc["n_cases"] == 40
        assert set(doc["calibration"]) == {"causal", "independence"}
