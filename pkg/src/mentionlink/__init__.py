"""Resolve software-mention records into identity clusters.

Known identities are matched against a centroid knowledge base built from
training clusters; the rest are clustered per block with HDBSCAN and folded
back onto KB names where the canonical name says so.
"""

from .assign import Assignment, assign, assign_all
from .canonical import AbbreviationMap, build_abbreviation_map, canonical_key, normalize
from .context import ContextString, build_context
from .embedding import (
    ExternalEncoder,
    ReferenceEncoder,
    encode_corpus,
    l2_normalize,
    mean_pool,
    reference_encode,
)
from .errors import (
    ConfigError,
    ContractError,
    DegenerateVectorError,
    MentionLinkError,
    ParseError,
    StageError,
    ValidationError,
)
from .kb import FlatIndex, KnowledgeBase, StringDictionary, nearest_centroid
from .metrics import MetricReport, PRF, b_cubed, ceaf_e, conll, evaluate, muc
from .model import GoldClustering, Labeling, Mention, PipelineConfig, Relation
from .pipeline import PipelineResult, StageTimings, run_pipeline

__version__ = "0.1.0"
