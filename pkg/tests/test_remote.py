"""Remote provider against the bundled stub endpoint: parity with the local
model, retries, auth, and overflow guards."""

import pytest

from recapkit.errors import ContextOverflow, EndpointError
from recapkit.providers import (
    AdaptiveNgramConfig,
    AdaptiveNgramModel,
    GenerationRequest,
    ProviderConfig,
    RemoteProvider,
)

from stub_server import StubEndpoint


def make_provider(url, **overrides):
    defaults = dict(
        model_name="oracle",
        endpoint_url=url,
        max_retries=3,
        retry_backoff=0.01,
        request_timeout=10.0,
    )
    defaults.update(overrides)
    return RemoteProvider(ProviderConfig(**defaults))


@pytest.fixture
def endpoint():
    with StubEndpoint(order=2) as stub:
        yield stub


class TestParity:
    def test_tokenize_round_trips_tokens_and_offsets(self, endpoint):
        remote = make_provider(endpoint.url)
        local = AdaptiveNgramModel(AdaptiveNgramConfig(order=2))
        text = "one two. three\nfour."
        assert remote.tokenize(text) == local.tokenize(text)

    def test_logprob_bits_match_local_model(self, endpoint):
        remote = make_provider(endpoint.url)
        local = AdaptiveNgramModel(AdaptiveNgramConfig(order=2))
        cases = [
            (["a", "b", "a"], "b"),
            (["x"], "y"),
            (["p", "q", "p", "q", "p"], "q"),
        ]
        for context, target in cases:
            assert remote.token_logprob(context, target) == local.token_logprob(
                context, target
            )

    def test_generation_matches_local_greedy_decode(self, endpoint):
        remote = make_provider(endpoint.url)
        local = AdaptiveNgramModel(AdaptiveNgramConfig(order=2))
        request = GenerationRequest(
            prompt=("x", "y", "x", "y", "x"), max_new_tokens=3
        )
        assert remote.generate(request) == local.generate(request) == "y x y"

    def test_generation_honors_stop_sequences(self, endpoint):
        remote = make_provider(endpoint.url)
        request = GenerationRequest(
            prompt=("a", "b", "stop", "a", "b", "stop", "a"),
            max_new_tokens=8,
            stop_sequences=(("stop",),),
        )
        assert remote.generate(request) == "b"
        sent = endpoint.state.requests[-1]["payload"]
        assert sent["stop_sequences"] == [["stop"]]


class TestFailureHandling:
    def test_retries_recover_from_transient_errors(self, endpoint):
        endpoint.state.fail_next = 2
        remote = make_provider(endpoint.url)
        assert remote.token_logprob(["a", "b", "a"], "b") == pytest.approx(
            AdaptiveNgramModel(AdaptiveNgramConfig(order=2)).token_logprob(
                ["a", "b", "a"], "b"
            )
        )
        # two failures plus the success
        assert len(endpoint.state.requests) == 3

    def test_exhausted_retries_raise_endpoint_error(self, endpoint):
        endpoint.state.fail_next = 10
        remote = make_provider(endpoint.url, max_retries=2)
        with pytest.raises(EndpointError, match="after 3 attempts"):
            remote.token_logprob(["a"], "b")
        assert len(endpoint.state.requests) == 3

    def test_non_retryable_status_fails_immediately(self, endpoint):
        remote = make_provider(endpoint.url + "/nope")
        with pytest.raises(EndpointError, match="rejected"):
            remote.token_logprob(["a"], "b")
        assert len(endpoint.state.requests) == 1

    def test_unreachable_endpoint_raises_after_retries(self):
        remote = make_provider("http://127.0.0.1:9", max_retries=1)
        with pytest.raises(EndpointError, match="transport error"):
            remote.tokenize("hello")


class TestClientGuards:
    def test_context_overflow_is_client_side(self, endpoint):
        remote = make_provider(endpoint.url, max_context_tokens=4)
        with pytest.raises(ContextOverflow):
            remote.token_logprob(["a", "b", "c", "d", "e"], "f")
        with pytest.raises(ContextOverflow):
            remote.generate(
                GenerationRequest(prompt=("a",) * 5, max_new_tokens=1)
            )
        assert endpoint.state.requests == []  # nothing went over the wire

    def test_auth_header_from_configured_env_var(self, endpoint, monkeypatch):
        monkeypatch.setenv("STUB_TOKEN", "sekrit")
        remote = make_provider(endpoint.url, auth_env_var="STUB_TOKEN")
        remote.tokenize("a b c")
        assert endpoint.state.last_auth == "Bearer sekrit"

    def test_no_token_sends_no_auth_header(self, endpoint, monkeypatch):
        monkeypatch.delenv("RECAP_API_TOKEN", raising=False)
        remote = make_provider(endpoint.url)
        remote.tokenize("a b c")
        assert endpoint.state.last_auth is None

    def test_provider_id_names_the_model(self):
        remote = make_provider("http://example.invalid", model_name="m9")
        assert remote.provider_id == "remote:m9"
        with pytest.raises(ValueError):
            RemoteProvider(ProviderConfig(endpoint_url=""))
