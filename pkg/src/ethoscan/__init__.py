"""ethoscan: rule-based detection of unethical-behavior signals in OSS repositories."""

__version__ = "0.1.0"

from .detectors import (
    DetectorConfig,
    Diagnostic,
    detect_s1,
    detect_s2,
    detect_s5,
    detect_s6,
    detect_s8,
    detect_s9,
)
from .facts import (
    Comment,
    CommitInfo,
    EvidenceItem,
    FactStore,
    FileContent,
    IssueFacts,
    ReleaseInfo,
    RepositoryFacts,
    UserRef,
    Violation,
    is_contributor,
    issues_of,
)
from .report import RunReport, render_json, render_text
from .runner import RunRequest, execute
from .snapshot import Snapshot, load_snapshot, save_snapshot, to_fact_store

__all__ = [
    "__version__",
    "DetectorConfig", "Diagnostic",
    "detect_s1", "detect_s2", "detect_s5", "detect_s6", "detect_s8", "detect_s9",
    "Comment", "CommitInfo", "EvidenceItem", "FactStore", "FileContent",
    "IssueFacts", "ReleaseInfo", "RepositoryFacts", "UserRef", "Violation",
    "is_contributor", "issues_of",
    "RunReport", "render_json", "render_text",
    "RunRequest", "execute",
    "Snapshot", "load_snapshot", "save_snapshot", "to_fact_store",
]
