"""Open-set iris presentation-attack-detection evaluation toolkit."""
from .bootstrap import BootstrapConfig, CiResult, bootstrap_ci, bootstrap_pad_metrics, resample
from .manifest import SampleRecord, load_manifest, summarize, write_manifest
from .metrics import ScoreSet, bpcer_at_apcer, d_eer, operating_points, pad_metrics
from .protocol import (
    ProtocolRun,
    generate_p1,
    generate_p2,
    generate_p3,
    generate_p4,
    generate_reverse_spectral,
    split_train_val,
)
from .separability import EmbeddingSet, class_geometry, shift_report

__version__ = "0.1.0"

__all__ = [
    "BootstrapConfig",
    "CiResult",
    "EmbeddingSet",
    "ProtocolRun",
    "SampleRecord",
    "ScoreSet",
    "bootstrap_ci",
    "bootstrap_pad_metrics",
    "bpcer_at_apcer",
    "class_geometry",
    "d_eer",
    "generate_p1",
    "generate_p2",
    "generate_p3",
    "generate_p4",
    "generate_reverse_spectral",
    "load_manifest",
    "operating_points",
    "pad_metrics",
    "resample",
    "shift_report",
    "split_train_val",
    "summarize",
    "write_manifest",
]
