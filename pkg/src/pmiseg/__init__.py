"""Segment discrete token streams at language-model PMI dips.

Pipeline: chunk a token stream into fixed-duration sentences, score each
adjacent pair with pointwise mutual information under an n-gram model (or
cosine similarity of provided embeddings), then keep the lowest-scoring
seams as segment boundaries. Ships synthetic benchmark generators and
boundary/segment metrics for end-to-end evaluation.
"""

from .lm import (
    ExternalScores,
    NgramModel,
    SchemaError,
    ScoreRecord,
    load_external_scores,
    load_model,
    log_prob,
    save_external_scores,
    save_model,
    train_ngram,
)
from .metrics import (
    MetricReport,
    ReferenceAnnotation,
    UtteranceMetrics,
    aggregate_report,
    boundary_prf,
    confidence_interval,
    evaluate_utterance,
    match_boundaries,
    purity_coverage_f1,
    r_value,
)
from .pipeline import BatchResult, RunConfig, segment_batch, segment_utterance
from .scorer import (
    BoundaryScores,
    SentenceEmbeddings,
    cosine_scores,
    load_sentence_embeddings,
    pmi_scores,
    save_sentence_embeddings,
    span_log_probs,
)
from .selector import (
    Segmentation,
    SelectorConfig,
    adaptive_k,
    equal_length_segments,
    indices_to_segmentation,
    read_segmentations,
    select_adaptive,
    select_constant,
    select_threshold,
    write_segmentations,
)
from .sentencer import AcousticSentence, TokenSequence, chunk_fixed, tokens_per_sentence
from .synth import (
    LabeledPool,
    SynthDataset,
    load_pool,
    read_manifest,
    save_pool,
    synth_emotion_change,
    synth_gender_change,
    synth_markov,
    write_manifest,
)

__version__ = "0.1.0"

__all__ = [
    "AcousticSentence",
    "BatchResult",
    "BoundaryScores",
    "ExternalScores",
    "LabeledPool",
    "MetricReport",
    "NgramModel",
    "ReferenceAnnotation",
    "RunConfig",
    "SchemaError",
    "ScoreRecord",
    "Segmentation",
    "SelectorConfig",
    "SentenceEmbeddings",
    "SynthDataset",
    "TokenSequence",
    "UtteranceMetrics",
    "adaptive_k",
    "aggregate_report",
    "boundary_prf",
    "chunk_fixed",
    "confidence_interval",
    "cosine_scores",
    "equal_length_segments",
    "evaluate_utterance",
    "indices_to_segmentation",
    "load_external_scores",
    "load_model",
    "load_pool",
    "load_sentence_embeddings",
    "log_prob",
    "match_boundaries",
    "pmi_scores",
    "purity_coverage_f1",
    "r_value",
    "read_manifest",
    "read_segmentations",
    "save_external_scores",
    "save_model",
    "save_pool",
    "save_sentence_embeddings",
    "segment_batch",
    "segment_utterance",
    "select_adaptive",
    "select_constant",
    "select_threshold",
    "span_log_probs",
    "synth_emotion_change",
    "synth_gender_change",
    "synth_markov",
    "tokens_per_sentence",
    "train_ngram",
    "write_manifest",
    "write_segmentations",
]
