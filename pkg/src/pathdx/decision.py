"""Treatment choice by expected morbidity (hospital days, minimized).

The most probable disease is not automatically the one to treat: the
recommendation minimizes posterior-weighted hospital days over the two
options, and the switch threshold gives the disease probability at which
the optimal option flips (rarely 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigurationError
from .kb_model import TREATMENTS, UtilityTable


@dataclass(frozen=True)
class TreatmentAssessment:
    expected_morbidity: dict[str, float]  # treatment -> expected hospital days
    recommendation: str
    margin: float  # days separating best from second-best
    switch_threshold: float | None = None
    threshold_disease: str | None = None


def _days(utilities: UtilityTable, disease_id: str, treatment: str) -> float:
    try:
        return utilities.morbidity[(disease_id, treatment)]
    except KeyError:
        raise ConfigurationError(
            f"no morbidity entry for ({disease_id}, {treatment})"
        ) from None


def expected_morbidity(
    posteriors: dict[str, float], utilities: UtilityTable, treatment: str
) -> float:
    """Posterior-weighted expected hospital days for one treatment."""
    return sum(p * _days(utilities, d, treatment) for d, p in posteriors.items())


def switch_threshold(
    utilities: UtilityTable,
    disease_id: str,
    complement: tuple[float, float] | None = None,
) -> float | None:
    """Probability of `disease_id` at which the optimal treatment flips.

    The alternative hypothesis is the complement, given as (symptomatic days,
    operation days); when the table holds exactly two diseases the other row
    is used directly.  Returns None when one treatment dominates on [0, 1]
    (including the degenerate identical-lines case).
    """
    m_ds = _days(utilities, disease_id, "symptomatic")
    m_do = _days(utilities, disease_id, "operation")
    if complement is None:
        others = sorted({d for d, _ in utilities.morbidity} - {disease_id})
        if len(others) != 1:
            raise ConfigurationError(
                "complement morbidities required unless the table has exactly two diseases"
            )
        complement = (_days(utilities, others[0], "symptomatic"),
                      _days(utilities, others[0], "operation"))
    m_cs, m_co = complement

    # p*m_ds + (1-p)*m_cs = p*m_do + (1-p)*m_co
    denom = (m_ds - m_do) + (m_co - m_cs)
    if denom == 0.0:
        return None
    p = (m_co - m_cs) / denom
    return p if 0.0 <= p <= 1.0 else None


def recommend(
    posteriors: dict[str, float],
    utilities: UtilityTable,
    threshold_disease: str | None = None,
) -> TreatmentAssessment:
    """Pick the treatment minimizing expected morbidity; ties go to the
    non-invasive option.  With `threshold_disease` set, also solve the
    switch threshold for that disease against the posterior-weighted
    complement.
    """
    expected = {tr: expected_morbidity(posteriors, utilities, tr) for tr in TREATMENTS}
    best = min(TREATMENTS, key=lambda tr: (expected[tr], tr != "symptomatic"))
    margin = abs(expected["symptomatic"] - expected["operation"])

    threshold = None
    if threshold_disease is not None:
        rest = {d: p for d, p in posteriors.items() if d != threshold_disease}
        rest_mass = sum(rest.values())
        if rest_mass > 0.0:
            comp = tuple(
                sum(p / rest_mass * _days(utilities, d, tr) for d, p in rest.items())
                for tr in ("symptomatic", "operation")
            )
            threshold = switch_threshold(utilities, threshold_disease, comp)
    return TreatmentAssessment(
        expected_morbidity=expected,
        recommendation=best,
        margin=margin,
        switch_threshold=threshold,
        threshold_disease=threshold_disease,
    )
