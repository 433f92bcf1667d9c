"""Thin HTTP client for a running gembed service.

The CLI uses this when ``--server`` is given; requests mirror the pydantic
schemas one to one. Vector paths are interpreted on the server side.
"""

from __future__ import annotations

from typing import Any, Sequence

import httpx

from .errors import GembedError


class ServiceError(GembedError):
    """The service rejected a request or could not be reached."""


class ServiceClient:
    def __init__(self, base_url: str, timeout: float = 600.0, http_client: httpx.Client | None = None):
        self._http = http_client or httpx.Client(base_url=base_url, timeout=timeout)

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._http.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise ServiceError(f"request to {path} failed: {exc}") from exc
        if response.status_code >= 400:
            detail: Any
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceError(f"{path} returned {response.status_code}: {detail}")
        return response.json()

    def health(self) -> dict:
        try:
            response = self._http.get("/health")
        except httpx.HTTPError as exc:
            raise ServiceError(f"health check failed: {exc}") from exc
        return response.json()

    def encode(
        self,
        vectors: Sequence[str],
        sentences: Sequence[str],
        gem: dict,
        text: dict,
        threads: int = 1,
        include_scores: bool = False,
    ) -> dict:
        return self._post(
            "/encode",
            {
                "store": {"vectors": list(vectors)},
                "sentences": list(sentences),
                "gem": gem,
                "text": text,
                "threads": threads,
                "include_scores": include_scores,
            },
        )

    def similarity(
        self,
        vectors: Sequence[str],
        pairs: Sequence[dict],
        gem: dict,
        text: dict,
        threads: int = 1,
    ) -> dict:
        return self._post(
            "/similarity",
            {
                "store": {"vectors": list(vectors)},
                "pairs": list(pairs),
                "gem": gem,
                "text": text,
                "threads": threads,
            },
        )

    def rank(
        self,
        vectors: Sequence[str],
        queries: Sequence[dict],
        gem: dict,
        text: dict,
        threads: int = 1,
    ) -> dict:
        return self._post(
            "/rank",
            {
                "store": {"vectors": list(vectors)},
                "queries": list(queries),
                "gem": gem,
                "text": text,
                "threads": threads,
            },
        )

    def weights(self, vectors: Sequence[str], sentence: str, gem: dict, text: dict) -> dict:
        return self._post(
            "/weights",
            {
                "store": {"vectors": list(vectors)},
                "sentence": sentence,
                "gem": gem,
                "text": text,
            },
        )
