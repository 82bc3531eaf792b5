"""HTTP provider speaking a small completions protocol.

Scoring uses echo mode: the context plus target goes up as the prompt with
``max_tokens: 0`` and ``logprobs`` on, and the target's log-probability is the
last entry of the returned per-token list, passed through unchanged.
Generation posts the prompt tokens with stop sequences and a zero-or-given
temperature. Transient failures (connection errors, 429, 5xx) retry with
exponential backoff up to ``max_retries`` extra attempts; anything else, or
retry exhaustion, surfaces as EndpointError.
"""

from __future__ import annotations

import logging
import os
import threading
import time
from typing import Sequence

import requests

from ..errors import ContextOverflow, EndpointError
from .base import (
    GenerationRequest,
    LmProvider,
    ProviderConfig,
    Tokenization,
    finalize_generation,
)

logger = logging.getLogger(__name__)

_RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


class RemoteProvider(LmProvider):
    def __init__(self, config: ProviderConfig) -> None:
        if not config.endpoint_url:
            raise ValueError("remote provider requires endpoint_url")
        self._config = config
        self._session = requests.Session()
        self._gate = threading.BoundedSemaphore(config.max_in_flight)
        token = os.environ.get(config.auth_env_var, "")
        if token:
            self._session.headers["Authorization"] = f"Bearer {token}"

    @property
    def provider_id(self) -> str:
        return f"remote:{self._config.model_name}"

    @property
    def max_context_tokens(self) -> int:
        return self._config.max_context_tokens

    def _post(self, path: str, payload: dict) -> dict:
        url = self._config.endpoint_url.rstrip("/") + path
        attempts = self._config.max_retries + 1
        last_error: str = ""
        for attempt in range(attempts):
            if attempt:
                delay = self._config.retry_backoff * (2 ** (attempt - 1))
                time.sleep(delay)
            try:
                with self._gate:
                    response = self._session.post(
                        url, json=payload, timeout=self._config.request_timeout
                    )
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
                logger.warning("request to %s failed (%s); retrying", url, exc)
                continue
            if response.status_code == 200:
                return response.json()
            last_error = f"HTTP {response.status_code}: {response.text[:200]}"
            if response.status_code not in _RETRYABLE_STATUS:
                raise EndpointError(f"{url} rejected the request: {last_error}")
            logger.warning("request to %s got %s; retrying", url, response.status_code)
        raise EndpointError(f"{url} failed after {attempts} attempts: {last_error}")

    def tokenize(self, text: str) -> Tokenization:
        data = self._post(
            "/v1/tokenize", {"model": self._config.model_name, "text": text}
        )
        return Tokenization(
            tokens=tuple(data["tokens"]),
            spans=tuple((s, e) for s, e in data.get("offsets", ())),
        )

    def token_logprob(self, context: Sequence[str], target: str) -> float:
        if len(context) > self._config.max_context_tokens:
            raise ContextOverflow(
                f"context of {len(context)} tokens exceeds cap "
                f"{self._config.max_context_tokens}"
            )
        data = self._post(
            "/v1/completions",
            {
                "model": self._config.model_name,
                "prompt_tokens": list(context) + [target],
                "max_tokens": 0,
                "echo": True,
                "logprobs": True,
            },
        )
        logprobs = data["token_logprobs"]
        if not logprobs:
            raise EndpointError("endpoint returned no token logprobs in echo mode")
        return float(logprobs[-1])

    def generate(self, request: GenerationRequest) -> str:
        if len(request.prompt) > self._config.max_context_tokens:
            raise ContextOverflow(
                f"prompt of {len(request.prompt)} tokens exceeds cap "
                f"{self._config.max_context_tokens}"
            )
        data = self._post(
            "/v1/completions",
            {
                "model": self._config.model_name,
                "prompt_tokens": list(request.prompt),
                "max_tokens": request.max_new_tokens,
                "temperature": self._config.generation_temperature,
                "stop_sequences": [list(s) for s in request.stop_sequences],
            },
        )
        return finalize_generation(str(data.get("text", "")), request)
