"""Synchronous client for the conformance service.

Without a base URL the client drives the ASGI app in process, so the CLI
works with no running server; with one it speaks plain HTTP.
"""

from __future__ import annotations

import asyncio
from typing import Any

import httpx

from ..errors import GuidelineAlignError


class ServiceInputError(GuidelineAlignError):
    """The service rejected the request (4xx)."""


class ServiceInternalError(GuidelineAlignError):
    """The service failed while handling the request (5xx or transport error)."""


class ServiceClient:
    def __init__(self, base_url: str | None = None, timeout: float = 300.0) -> None:
        self.base_url = base_url
        self.timeout = timeout

    def _post(self, path: str, payload: dict) -> dict:
        if self.base_url is not None:
            try:
                with httpx.Client(base_url=self.base_url, timeout=self.timeout) as client:
                    response = client.post(path, json=payload)
            except httpx.HTTPError as exc:
                raise ServiceInternalError(f"transport failure: {exc}") from exc
        else:
            response = self._post_in_process(path, payload)
        return self._unwrap(response)

    def _post_in_process(self, path: str, payload: dict) -> httpx.Response:
        from .app import app  # deferred so pure-HTTP use never imports fastapi internals

        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://guideline-align", timeout=self.timeout
            ) as client:
                return await client.post(path, json=payload)

        return asyncio.run(go())

    @staticmethod
    def _unwrap(response: httpx.Response) -> dict:
        if response.status_code >= 500:
            raise ServiceInternalError(f"service error {response.status_code}: {response.text}")
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceInputError(str(detail))
        return response.json()

    # --- endpoint wrappers ---

    def simulate(self, **payload: Any) -> dict:
        return self._post("/simulate", payload)

    def align(self, **payload: Any) -> dict:
        return self._post("/align", payload)

    def report(self, **payload: Any) -> dict:
        return self._post("/report", payload)
