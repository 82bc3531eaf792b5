import pytest

from recapkit import AdaptiveNgramConfig, AdaptiveNgramModel, ContextConfig


@pytest.fixture(scope="session")
def m2() -> AdaptiveNgramModel:
    """Order-2 oracle: bigram statistics, additive smoothing 1.0."""
    return AdaptiveNgramModel(AdaptiveNgramConfig(order=2))


@pytest.fixture(scope="session")
def ctx16() -> ContextConfig:
    return ContextConfig(short_window=16)
