"""Provider interface: anything that can tokenize, score token log-probabilities,
and generate text behind a uniform contract."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

from ..errors import GenerationEmpty
from ..text import Tokenization, detokenize, whitespace_tokenize


@dataclass(frozen=True)
class ProviderConfig:
    """Connection and decoding settings shared by provider implementations."""

    model_name: str = "oracle"
    endpoint_url: str = ""  # remote providers only
    max_context_tokens: int = 4096
    request_timeout: float = 30.0
    max_retries: int = 3
    generation_temperature: float = 0.0
    auth_env_var: str = "RECAP_API_TOKEN"
    retry_backoff: float = 0.5
    max_in_flight: int = 8

    def __post_init__(self) -> None:
        if self.max_context_tokens < 2:
            raise ValueError("max_context_tokens must be >= 2")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.generation_temperature < 0:
            raise ValueError("generation_temperature must be >= 0")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


@dataclass(frozen=True)
class GenerationRequest:
    """A bounded generation call. Stop sequences are token sequences; generation
    halts at the first stop or at max_new_tokens, whichever comes first."""

    prompt: tuple[str, ...]
    max_new_tokens: int
    stop_sequences: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.max_new_tokens < 1:
            raise ValueError("max_new_tokens must be >= 1")
        object.__setattr__(self, "prompt", tuple(self.prompt))
        object.__setattr__(
            self, "stop_sequences", tuple(tuple(s) for s in self.stop_sequences)
        )


def truncate_at_stops(text: str, stop_sequences: Sequence[Sequence[str]]) -> str:
    """Cut generated text at the earliest occurrence of any stop sequence."""
    cut = len(text)
    for seq in stop_sequences:
        needle = detokenize(seq)
        if not needle:
            continue
        pos = text.find(needle)
        if pos >= 0:
            cut = min(cut, pos)
    return text[:cut]


def finalize_generation(text: str, request: GenerationRequest) -> str:
    """Apply stop sequences and the token budget to raw generator output."""
    out = truncate_at_stops(text, request.stop_sequences)
    tokens = out.split()
    if len(tokens) > request.max_new_tokens:
        out = detokenize(tokens[: request.max_new_tokens])
    if not out.strip():
        raise GenerationEmpty("provider returned zero tokens")
    return out


class LmProvider(ABC):
    """Uniform interface over language models that report token log-probabilities
    and generate text. Implementations must be safe for concurrent read-only use."""

    @property
    @abstractmethod
    def provider_id(self) -> str:
        """Stable identifier recorded on documents this provider tokenized."""

    @property
    @abstractmethod
    def max_context_tokens(self) -> int:
        """Hard cap on conditioning length, in tokens."""

    @abstractmethod
    def tokenize(self, text: str) -> Tokenization:
        """Tokenize text into tokens with character spans."""

    @abstractmethod
    def token_logprob(self, context: Sequence[str], target: str) -> float:
        """Natural-log probability of target as the next token after context."""

    @abstractmethod
    def generate(self, request: GenerationRequest) -> str:
        """Generate text from a prompt, honoring stops and the token budget."""


class GenerationOnlyProvider(LmProvider):
    """Base for test doubles and summarizers that cannot score tokens."""

    @property
    def max_context_tokens(self) -> int:
        return 1 << 20

    def tokenize(self, text: str) -> Tokenization:
        return whitespace_tokenize(text)

    def token_logprob(self, context: Sequence[str], target: str) -> float:
        raise NotImplementedError(
            f"{self.provider_id} is a generation-only provider; "
            "use the adaptive n-gram or a remote provider for scoring"
        )
