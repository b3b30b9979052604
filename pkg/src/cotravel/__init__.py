"""Co-travel network inference from flight booking records.

Segments each passenger pair's shared bookings into complete journeys,
counts three tie strengths (shared segments, shared bookings, shared
journeys), labels ties active or passive, and provides threshold-network
analytics plus a calibrated synthetic generator for end-to-end evaluation.
"""

from .infer import HAVE_KERNEL, default_backend, infer_ties
from .journeys import Thresholds, discover_cojourneys
from .records import Dataset, parse_sfpg_file, profile_dataset
from .synth import GenConfig, generate, inject_noise
from .ties import TieRecord, count_ties

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "GenConfig",
    "HAVE_KERNEL",
    "Thresholds",
    "TieRecord",
    "count_ties",
    "default_backend",
    "discover_cojourneys",
    "generate",
    "infer_ties",
    "inject_noise",
    "parse_sfpg_file",
    "profile_dataset",
    "__version__",
]
