"""Exact q-series engine for rank/crank heat-operator identities."""

from .errors import (
    DivisionByZero,
    IncompatibleVariables,
    InvalidModulus,
    LimitExceeded,
    MissingParams,
    NonInvertibleLeadingTerm,
    OrderExceedsTruncation,
    PoleProximity,
    QPDEError,
    ThetaDenominatorVanishes,
    ToleranceUnreachable,
    UnknownIdentity,
)
from .identities import IdentityReport, list_identities, verify, verify_all
from .kernel import BACKEND
from .series import INF, Comparison, QSeries, SubstitutionSpec, qs_equal
from .special import GeneratorSpec, Kind, NDEVariant

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "INF",
    "Comparison",
    "DivisionByZero",
    "GeneratorSpec",
    "IdentityReport",
    "IncompatibleVariables",
    "InvalidModulus",
    "Kind",
    "LimitExceeded",
    "MissingParams",
    "NDEVariant",
    "NonInvertibleLeadingTerm",
    "OrderExceedsTruncation",
    "PoleProximity",
    "QPDEError",
    "QSeries",
    "SubstitutionSpec",
    "ThetaDenominatorVanishes",
    "ToleranceUnreachable",
    "UnknownIdentity",
    "list_identities",
    "qs_equal",
    "verify",
    "verify_all",
]
