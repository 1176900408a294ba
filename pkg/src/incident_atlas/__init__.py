"""Atlas of AI uses in mobile computing, built from public incident reports.

Pipeline stages: ingest raw incident dumps, rewrite them into a
five-component use format, merge human risk and SDG annotations, embed the
uses, lay them out in 2-D with exact t-SNE, and export one self-contained
atlas document served read-only over HTTP.
"""

from .errors import (
    AtlasError,
    CacheMissError,
    DegenerateInputError,
    InputError,
    NumericalError,
    ProtocolError,
    ReconciliationError,
    ResponseFormatError,
    TransportError,
    ValidationError,
)
from .model import (
    Dataset,
    IncidentRecord,
    RiskTier,
    SdgDirection,
    SdgImpact,
    SummaryStats,
    UseDraft,
    UseRecord,
    dataset_summary,
    validate_dataset,
    validate_use,
)

__version__ = "0.1.0"

__all__ = [
    "AtlasError",
    "CacheMissError",
    "Dataset",
    "DegenerateInputError",
    "IncidentRecord",
    "InputError",
    "NumericalError",
    "ProtocolError",
    "ReconciliationError",
    "ResponseFormatError",
    "RiskTier",
    "SdgDirection",
    "SdgImpact",
    "SummaryStats",
    "TransportError",
    "UseDraft",
    "UseRecord",
    "ValidationError",
    "dataset_summary",
    "validate_dataset",
    "validate_use",
    "__version__",
]
