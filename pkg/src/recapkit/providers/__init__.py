"""Language-model providers: a deterministic in-process model, an HTTP client,
and generation doubles for tests and dry runs."""

from __future__ import annotations

from .base import (
    GenerationRequest,
    LmProvider,
    ProviderConfig,
    Tokenization,
    detokenize,
    whitespace_tokenize,
)
from .doubles import EchoDouble, ExtractiveDouble, LossyConfig, LossyDouble
from .ngram import AdaptiveNgramConfig, AdaptiveNgramModel
from .remote import RemoteProvider

__all__ = [
    "AdaptiveNgramConfig",
    "AdaptiveNgramModel",
    "EchoDouble",
    "ExtractiveDouble",
    "GenerationRequest",
    "LmProvider",
    "LossyConfig",
    "LossyDouble",
    "ProviderConfig",
    "RemoteProvider",
    "Tokenization",
    "build_provider",
    "detokenize",
    "whitespace_tokenize",
]


def build_provider(name: str, **options) -> LmProvider:
    """Construct a provider from a registry name.

    Known names: ``oracle`` (adaptive n-gram), ``remote``, ``echo``,
    ``extractive``, ``lossy``. Options are forwarded to the matching
    constructor; unknown names or unknown options raise ValueError.
    """
    try:
        if name == "oracle":
            cfg = AdaptiveNgramConfig(
                order=options.pop("order", 3),
                smoothing_alpha=options.pop("smoothing_alpha", 1.0),
            )
            return AdaptiveNgramModel(cfg, **options)
        if name == "remote":
            return RemoteProvider(ProviderConfig(**options))
        if name == "echo":
            return EchoDouble()
        if name == "extractive":
            return ExtractiveDouble(**options)
        if name == "lossy":
            seed = options.pop("seed", 0)
            if options:
                return LossyDouble(seed, LossyConfig(**options))
            return LossyDouble(seed)
    except TypeError as exc:
        raise ValueError(f"bad options for provider {name!r}: {exc}") from exc
    raise ValueError(f"unknown provider {name!r}")
