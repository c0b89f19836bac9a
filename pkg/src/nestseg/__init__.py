"""Nested discourse segmentation: boundary classification, repair and evaluation."""

from .corpus import (
    LABEL_ORDER,
    BoundaryLabel,
    ChunkElement,
    ChunkPosition,
    CorpusFormatError,
    Document,
    Sentence,
    Token,
    corpus_stats,
    parse_corpus,
    read_corpus,
    write_corpus,
)
from .evaluation import PRF, EvalReport, cross_validate, learning_curve, score
from .features import FeatureExtractor, FeatureSpace, Lexicons, build_feature_space, extract_features
from .maxent import MaxEntClassifier, MaxEntModel, TrainConfig, load_model, save_model, train
from .pipeline import DiscourseSegmenter
from .resample import apply_forced_labels, filter_training
from .segment import Segment, check_well_formed, labels_to_segments, repair, segments_to_labels
from .synthetic import generate_synthetic, synthetic_lexicons

__version__ = "0.1.0"
