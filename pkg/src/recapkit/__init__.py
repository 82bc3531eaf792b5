"""recapkit: mine recap-augmented training corpora from long documents and
run a budgeted recap agent at inference time.

The pipeline finds key tokens whose predictability depends on far-away
history (long-short gap scoring), retrieves the history segment that best
explains each one, refines those segments into short tagged recaps, and
inserts them into the training text. The agent applies the same idea at
inference: read a long document chunk by chunk, keep generated recaps in a
token-budgeted buffer, and answer questions from the recaps plus the final
chunk.
"""

from .agent import (
    AgentConfig,
    AgentState,
    Chunk,
    build_answer_prompt,
    build_step_prompt,
    chunk_document,
    run_agent,
    step,
)
from .corpus import (
    DEFAULT_TAGS,
    CorpusRecord,
    RecapEntry,
    RecapTags,
    build_training_sequence,
    read_corpus,
    refine_segment,
    strip_recaps,
    tags_balanced,
    truncate_sentences,
    unwrap_recap,
    wrap_recap,
    write_corpus,
)
from .document import (
    ContextConfig,
    TokenizedDocument,
    long_context,
    read_documents,
    short_context,
    split_sentences,
)
from .errors import (
    CompactionDiverged,
    ContextOverflow,
    EmptyRemotePrefix,
    EndpointError,
    GenerationEmpty,
    NoImprovingSegment,
    NoKeyTokens,
    RecapError,
    TaggedInputError,
)
from .lsg import LsgRecord, MiningConfig, lsg_score, score_positions, select_key_tokens
from .pipeline import (
    EvalConfig,
    MinePipelineConfig,
    run_eval,
    run_mine,
    run_score,
    truncation_baseline_answer,
)
from .providers import (
    AdaptiveNgramConfig,
    AdaptiveNgramModel,
    EchoDouble,
    ExtractiveDouble,
    GenerationRequest,
    LmProvider,
    LossyConfig,
    LossyDouble,
    ProviderConfig,
    RemoteProvider,
    build_provider,
)
from .retrieval import (
    CandidateSegment,
    RetrievalConfig,
    SegmentSelection,
    best_segment,
    enumerate_candidates,
    insert_segment,
)
from .synthetic import (
    PlantedRepeatDocument,
    SyntheticTask,
    generate_document,
    generate_planted_repeat,
    generate_synthetic,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveNgramConfig",
    "AdaptiveNgramModel",
    "AgentConfig",
    "AgentState",
    "CandidateSegment",
    "Chunk",
    "CompactionDiverged",
    "ContextConfig",
    "ContextOverflow",
    "CorpusRecord",
    "DEFAULT_TAGS",
    "EchoDouble",
    "EmptyRemotePrefix",
    "EndpointError",
    "EvalConfig",
    "ExtractiveDouble",
    "GenerationEmpty",
    "GenerationRequest",
    "LmProvider",
    "LossyConfig",
    "LossyDouble",
    "LsgRecord",
    "MinePipelineConfig",
    "MiningConfig",
    "NoImprovingSegment",
    "NoKeyTokens",
    "PlantedRepeatDocument",
    "ProviderConfig",
    "RecapEntry",
    "RecapError",
    "RecapTags",
    "RemoteProvider",
    "RetrievalConfig",
    "SegmentSelection",
    "SyntheticTask",
    "TaggedInputError",
    "TokenizedDocument",
    "best_segment",
    "build_answer_prompt",
    "build_provider",
    "build_step_prompt",
    "build_training_sequence",
    "chunk_document",
    "enumerate_candidates",
    "generate_document",
    "generate_planted_repeat",
    "generate_synthetic",
    "insert_segment",
    "long_context",
    "lsg_score",
    "read_corpus",
    "read_documents",
    "refine_segment",
    "run_agent",
    "run_eval",
    "run_mine",
    "run_score",
    "score_positions",
    "select_key_tokens",
    "short_context",
    "split_sentences",
    "step",
    "strip_recaps",
    "tags_balanced",
    "truncate_sentences",
    "truncation_baseline_answer",
    "unwrap_recap",
    "wrap_recap",
    "write_corpus",
]
