"""Human-supervised link prediction over typed, multi-relation graphs.

The core loop: score unlinked candidates with a weighted ensemble of
similarity metrics, surface the top ranks for review, learn the weights
from the accumulated verdicts with a small genetic optimizer, repeat.

Heavy optional imports (the HTTP service, the jit kernel) stay out of
the package root; pull them from their modules directly.
"""

from .candidates import existence_candidates, semantic_candidates
from .fixtures import build_f1, build_f2
from .genetic import GPConfig, GPRunReport, backend_name, run_gp
from .graph import KnowledgeGraph, Link, Node, NonLink
from .metrics import (
    EXISTENCE,
    SEMANTIC,
    MetricEnsemble,
    MetricError,
    MetricInstance,
    catalog,
    combined_similarity,
    default_ensemble,
)
from .ontology import Ontology, OntologyError
from .predictor import (
    Recommendation,
    interleave_for_review,
    predict_existence,
    predict_type,
)
from .storage import (
    AnonymizationPolicy,
    BundleError,
    FeedbackEvent,
    export_bundle,
    import_bundle,
)
from .synth import SyntheticSpec, generate
from .training import build_training_set, fitness
from .weights import WeightVector

__version__ = "0.1.0"

__all__ = [
    "AnonymizationPolicy",
    "BundleError",
    "EXISTENCE",
    "FeedbackEvent",
    "GPConfig",
    "GPRunReport",
    "KnowledgeGraph",
    "Link",
    "MetricEnsemble",
    "MetricError",
    "MetricInstance",
    "Node",
    "NonLink",
    "Ontology",
    "OntologyError",
    "Recommendation",
    "SEMANTIC",
    "SyntheticSpec",
    "WeightVector",
    "backend_name",
    "build_f1",
    "build_f2",
    "build_training_set",
    "catalog",
    "combined_similarity",
    "default_ensemble",
    "existence_candidates",
    "export_bundle",
    "fitness",
    "generate",
    "import_bundle",
    "interleave_for_review",
    "predict_existence",
    "predict_type",
    "run_gp",
    "semantic_candidates",
]
