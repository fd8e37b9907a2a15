"""Shared exception types; the service maps these onto HTTP status codes."""


class DiagnosisError(Exception):
    """Base for all domain-level failures (HTTP 422)."""


class DegeneratePriorError(DiagnosisError):
    """Every raw disease prior evaluated to zero for this patient."""


class InconsistentEvidenceError(DiagnosisError):
    """All posterior numerators are zero; no hypothesis explains the findings."""


class UnknownIdError(DiagnosisError):
    """A symptom or disease id does not resolve in the knowledge base."""


class NotCausedError(DiagnosisError):
    """The symptom does not appear in the disease tree."""


class ConfigurationError(DiagnosisError):
    """The utility table is missing a (disease, treatment) entry."""


class UndefinedFitError(DiagnosisError):
    """Regression fit is rank-deficient (all forecasts identical)."""


class EnumerationSizeError(DiagnosisError):
    """The exact enumeration guard was exceeded."""


class SchemaError(Exception):
    """A request violated the wire schema (HTTP 400)."""
