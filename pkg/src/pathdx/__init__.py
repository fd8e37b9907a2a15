"""pathdx: causal Bayesian diagnosis over pathstate trees.

Diseases are trees of latent pathological states with time-conditioned link
strengths; posteriors combine in-tree causation with per-symptom external
base rates; treatment choice minimizes expected morbidity; a calibration
benchmark compares the causal model against a naive-independence baseline.
"""

from importlib import resources

from .decision import TreatmentAssessment, expected_morbidity, recommend, switch_threshold
from .evaluation import (
    CalibrationReport,
    ForecastOutcome,
    calibration_score,
    independence_likelihood,
    independence_posterior,
    jackknife_compare,
    regression_area,
    run_benchmark,
)
from .inference import (
    FindingSet,
    PatternProbabilities,
    PosteriorReport,
    coherency_report,
    external_only_likelihood,
    hood_basic,
    hood_rev,
    path_likelihood,
    posterior,
    temporal_pattern_probs,
    two_time_posterior,
)
from .kb_format import ParseDiagnostic, ParseResult, export_json, parse_kb, serialize_kb
from .kb_model import (
    ABSENT,
    PRESENT,
    UNKNOWN,
    Curve,
    CausalNode,
    DiseaseDef,
    KnowledgeBase,
    PatientContext,
    SymptomDef,
    UtilityTable,
    descendant_symptoms,
    eval_priors,
    eval_time_curve,
    validate_kb,
)
from .simulate import (
    CaseRecord,
    DatasetConfig,
    enumerate_joint,
    generate_dataset,
    load_cases,
    sample_case,
    save_cases,
)

__version__ = "0.1.0"


def fixture_kb_text() -> str:
    """Source text of the bundled acute-abdomen demonstration knowledge base."""
    return resources.files(__package__).joinpath("data/acute_abdomen.pkb").read_text("utf-8")


def load_fixture_kb() -> KnowledgeBase:
    result = parse_kb(fixture_kb_text())
    if not result.ok:  # pragma: no cover - the bundled file is tested
        raise RuntimeError("bundled knowledge base failed to parse")
    return result.kb
