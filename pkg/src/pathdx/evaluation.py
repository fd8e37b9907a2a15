"""Calibration benchmark against a naive-independence Bayesian comparison model.

The comparison model keeps the same per-symptom likelihoods (the product of
link strengths down the path to each symptom) and the same external-cause
handling, but multiplies symptom factors as if they were independent given
the disease.  Any score difference therefore comes from how evidence is
combined, not from the accuracy of individual likelihoods.

Calibration is the reliability term of the Murphy decomposition over
equal-width forecast bins; significance of the paired score difference uses
leave-one-out jackknife pseudo-values; the regression-area measure integrates
the gap between a quadratic fit of outcome on forecast and the diagonal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import InconsistentEvidenceError, UndefinedFitError, UnknownIdError
from .inference import (
    FindingSet,
    PosteriorReport,
    _effective_priors,
    _external_only,
    base_rates,
    path_likelihood,
    posterior as causal_posterior,
)
from .kb_model import (
    ABSENT,
    PRESENT,
    KnowledgeBase,
    PatientContext,
    descendant_symptoms,
)
from .simulate import CaseRecord


@dataclass(frozen=True)
class ForecastOutcome:
    forecast: float
    outcome: int  # 1 if the target disease was the true one
    case_id: str = ""


@dataclass(frozen=True)
class BinRow:
    lo: float
    hi: float
    n: int
    mean_forecast: float
    observed: float


@dataclass(frozen=True)
class JackknifeResult:
    diff: float  # independence score - causal score on the full sample
    se: float
    p: float | None  # None when pseudo-values have zero variance
    tie: bool = False


def independence_likelihood(
    kb: KnowledgeBase,
    disease_id: str,
    findings: FindingSet,
    t: float,
    patient: PatientContext,
) -> float:
    """Likelihood of the in-tree findings under per-symptom independence."""
    rates = base_rates(kb, patient)
    return _independence_likelihood(kb, disease_id, findings, t, rates)


def _independence_likelihood(kb, disease_id, findings, t, rates) -> float:
    d = kb.disease_by_id[disease_id]
    acc = 1.0
    for sym in descendant_symptoms(d.tree):
        q = path_likelihood(kb, disease_id, sym, t)
        b = rates[sym]
        v = findings.value(sym)
        if v == PRESENT:
            acc *= q + b - q * b
        elif v == ABSENT:
            acc *= (1.0 - q) * (1.0 - b)
    return acc


def independence_posterior(
    kb: KnowledgeBase,
    patient: PatientContext,
    findings: FindingSet,
    priors: dict[str, float] | None = None,
) -> PosteriorReport:
    """Posterior of the comparison model; mirrors `inference.posterior`."""
    t = findings.measurement_time
    pri = _effective_priors(kb, patient, priors)
    rates = base_rates(kb, patient)
    numerators: dict[str, float] = {}
    decomposition: dict[str, dict[str, float]] = {}
    for d in kb.diseases:
        in_tree = set(descendant_symptoms(d.tree))
        tree_l = _independence_likelihood(kb, d.id, findings, t, rates)
        ext = _external_only((s.id for s in kb.symptoms if s.id not in in_tree), findings, rates)
        numerators[d.id] = pri[d.id] * tree_l * ext
        decomposition[d.id] = {"prior": pri[d.id], "tree_likelihood": tree_l, "external_factor": ext}
    total = sum(numerators.values())
    if total <= 0.0:
        raise InconsistentEvidenceError(
            "every disease assigns zero probability to these findings (independence model)"
        )
    return PosteriorReport(
        posteriors={k: v / total for k, v in numerators.items()},
        decomposition=decomposition,
        measurement_time=t,
    )


def _bin_index(forecast: float, bins: int) -> int:
    return min(int(forecast * bins), bins - 1)


def calibration_score(
    data: list[ForecastOutcome], bins: int = 10
) -> tuple[float, list[BinRow]]:
    """Reliability-in-the-small: (1/N) * sum_b n_b (mean forecast - observed)^2
    over equal-width bins; empty bins are skipped."""
    if not data:
        raise ValueError("at least one forecast is required")
    if bins < 1:
        raise ValueError("at least one bin is required")
    table: list[BinRow] = []
    n = len(data)
    total = 0.0
    grouped: dict[int, list[ForecastOutcome]] = {}
    for fo in data:
        grouped.setdefault(_bin_index(fo.forecast, bins), []).append(fo)
    for k in sorted(grouped):
        rows = grouped[k]
        mean_f = sum(r.forecast for r in rows) / len(rows)
        obs = sum(r.outcome for r in rows) / len(rows)
        total += len(rows) * (mean_f - obs) ** 2
        table.append(BinRow(lo=k / bins, hi=(k + 1) / bins, n=len(rows),
                            mean_forecast=mean_f, observed=obs))
    return total / n, table


def regression_area(data: list[ForecastOutcome], grid_step: float = 1e-3) -> float:
    """Area between a quadratic least-squares fit of outcome on forecast and
    the perfect-calibration diagonal, integrated on a fixed grid."""
    if len(data) < 3:
        raise ValueError("at least three forecasts are required")
    f = np.array([d.forecast for d in data], dtype=np.float64)
    o = np.array([d.outcome for d in data], dtype=np.float64)
    vand = np.vander(f, 3)
    if np.linalg.matrix_rank(vand) < 3:
        raise UndefinedFitError("quadratic fit is rank-deficient (forecasts too uniform)")
    coeffs = np.polyfit(f, o, 2)
    xs = np.linspace(0.0, 1.0, round(1.0 / grid_step) + 1)
    gap = np.abs(np.polyval(coeffs, xs) - xs)
    return float(np.trapezoid(gap, xs))


def _score_and_loo(f: np.ndarray, o: np.ndarray, bins: int) -> tuple[float, np.ndarray]:
    # n_b * (mean_f - mean_o)^2 == (sum_f - sum_o)^2 / n_b, which makes the
    # leave-one-out scores a per-bin update instead of a full recompute.
    n = len(f)
    k = np.minimum((f * bins).astype(np.int64), bins - 1)
    n_b = np.bincount(k, minlength=bins).astype(np.float64)
    d_b = np.bincount(k, weights=f - o, minlength=bins)
    safe = np.where(n_b > 0, n_b, 1.0)
    term = d_b * d_b / safe
    base = float(term.sum())
    n_i = n_b[k]
    resid = d_b[k] - (f - o)
    new_term = np.where(n_i > 1, resid * resid / np.maximum(n_i - 1.0, 1.0), 0.0)
    loo = (base - term[k] + new_term) / (n - 1)
    return base / n, loo


def jackknife_compare(
    paired: list[tuple[float, float, int]], bins: int = 10
) -> JackknifeResult:
    """Leave-one-out jackknife on the paired calibration-score difference.

    `paired` rows are (causal forecast, independence forecast, outcome); the
    statistic is score(independence) - score(causal), positive when the
    causal model is better calibrated.
    """
    n = len(paired)
    if n < 10:
        raise ValueError("at least 10 paired cases are required")
    fc = np.array([c for c, _i, _o in paired])
    fi = np.array([i for _c, i, _o in paired])
    o = np.array([float(oo) for _c, _i, oo in paired])

    causal_full, causal_loo = _score_and_loo(fc, o, bins)
    indep_full, indep_loo = _score_and_loo(fi, o, bins)
    full = indep_full - causal_full
    pseudo = n * full - (n - 1) * (indep_loo - causal_loo)
    mean = float(pseudo.mean())
    var = float(pseudo.var(ddof=1))
    if var == 0.0:
        return JackknifeResult(diff=full, se=0.0, p=None, tie=True)
    se = (var / n) ** 0.5
    t_stat = mean / se
    p = float(2.0 * stats.t.sf(abs(t_stat), df=n - 1))
    return JackknifeResult(diff=full, se=se, p=p)


@dataclass
class CalibrationReport:
    target: str
    n_cases: int
    bins: int
    priors_override: dict[str, float] | None
    causal_score: float
    independence_score: float
    causal_bins: list[BinRow]
    independence_bins: list[BinRow]
    jackknife: JackknifeResult | None  # None below 10 cases
    causal_area: float | None  # None when the quadratic fit is undefined
    independence_area: float | None
    pairs: list[tuple[float, float, int]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        def bin_rows(rows):
            return [
                {"lo": r.lo, "hi": r.hi, "n": r.n,
                 "mean_forecast": r.mean_forecast, "observed": r.observed}
                for r in rows
            ]

        return {
            "target": self.target,
            "n_cases": self.n_cases,
            "bins": self.bins,
            "priors_override": self.priors_override,
            "calibration": {
                "causal": self.causal_score,
                "independence": self.independence_score,
            },
            "bin_tables": {
                "causal": bin_rows(self.causal_bins),
                "independence": bin_rows(self.independence_bins),
            },
            "jackknife": None if self.jackknife is None else {
                "diff": self.jackknife.diff,
                "se": self.jackknife.se,
                "p": self.jackknife.p,
                "tie": self.jackknife.tie,
            },
            "regression_area": {
                "causal": self.causal_area,
                "independence": self.independence_area,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        def area(a):
            return f"{a:>18.6f}" if a is not None else f"{'n/a':>18}"

        if self.jackknife is None:
            jk = "jackknife: n/a (needs at least 10 cases)"
        elif self.jackknife.tie:
            jk = f"jackknife diff (independence - causal): {self.jackknife.diff:+.6f} (exact tie)"
        else:
            jk = (f"jackknife diff (independence - causal): {self.jackknife.diff:+.6f}"
                  f"  se={self.jackknife.se:.6f}  p={self.jackknife.p:.2e}")
        lines = [
            f"calibration benchmark: target={self.target}  cases={self.n_cases}  bins={self.bins}",
            f"priors override: {self.priors_override}",
            "",
            f"{'model':<14}{'calibration':>14}{'regression area':>18}",
            f"{'causal':<14}{self.causal_score:>14.6f}{area(self.causal_area)}",
            f"{'independence':<14}{self.independence_score:>14.6f}{area(self.independence_area)}",
            "",
            jk,
            "",
            "causal bins:",
        ]
        fmt = "  [{:.1f}, {:.1f})  n={:<6d} mean={:.4f}  observed={:.4f}"
        lines += [fmt.format(r.lo, r.hi, r.n, r.mean_forecast, r.observed) for r in self.causal_bins]
        lines.append("independence bins:")
        lines += [fmt.format(r.lo, r.hi, r.n, r.mean_forecast, r.observed) for r in self.independence_bins]
        return "\n".join(lines)


def run_benchmark(
    kb: KnowledgeBase,
    cases: list[CaseRecord],
    target_disease_id: str,
    priors_override: dict[str, float] | None = None,
    bins: int = 10,
) -> CalibrationReport:
    """Score both models' target-disease forecasts over a labeled case set."""
    if target_disease_id not in kb.disease_by_id:
        raise UnknownIdError(f"unknown disease id '{target_disease_id}'")
    pairs: list[tuple[float, float, int]] = []
    causal_data: list[ForecastOutcome] = []
    indep_data: list[ForecastOutcome] = []
    for case in cases:
        causal = causal_posterior(kb, case.patient, case.findings, priors=priors_override)
        indep = independence_posterior(kb, case.patient, case.findings, priors=priors_override)
        outcome = int(case.true_disease_id == target_disease_id)
        cf = causal.posteriors[target_disease_id]
        nf = indep.posteriors[target_disease_id]
        pairs.append((cf, nf, outcome))
        causal_data.append(ForecastOutcome(cf, outcome, case.case_id))
        indep_data.append(ForecastOutcome(nf, outcome, case.case_id))

    causal_score, causal_bins = calibration_score(causal_data, bins)
    indep_score, indep_bins = calibration_score(indep_data, bins)

    def area_or_none(data):
        if len(data) < 3:
            return None
        try:
            return regression_area(data)
        except UndefinedFitError:
            return None

    return CalibrationReport(
        target=target_disease_id,
        n_cases=len(cases),
        bins=bins,
        priors_override=dict(priors_override) if priors_override else None,
        causal_score=causal_score,
        independence_score=indep_score,
        causal_bins=causal_bins,
        independence_bins=indep_bins,
        jackknife=jackknife_compare(pairs, bins) if len(pairs) >= 10 else None,
        causal_area=area_or_none(causal_data),
        independence_area=area_or_none(indep_data),
        pairs=pairs,
    )
