"""Chat-completion backends: live HTTP, record/replay, and scripted mock.

One wire dialect (the common chat-completion JSON schema) covers hosted
providers through compatible gateways; per-backend configuration sets
the base URL, model name, and auth header.  Replay never falls through
to the network.
"""

from __future__ import annotations

import base64
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import httpx

from layoutbench.errors import LayoutBenchError
from layoutbench.llm.types import (
    Attachment,
    ChatMessage,
    ChatRequest,
    ChatResponse,
    TokenUsage,
    digest,
    normalize_request,
)

log = logging.getLogger(__name__)

RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class BackendUnavailable(LayoutBenchError):
    pass


class ReplayMiss(LayoutBenchError):
    pass


class ImageUnsupported(LayoutBenchError):
    pass


@dataclass(frozen=True)
class BackendConfig:
    id: str
    kind: str = "live"  # "live" | "mock"
    base_url: str = ""
    model: str = ""
    auth_env: str = ""
    auth_header: str = "Authorization"
    auth_scheme: str = "Bearer"
    supports_images: bool = False
    image_policy: str = "drop"  # "drop" (with warning) | "error"
    temperature_generate: float = 1.0
    temperature_assess: float = 0.2
    max_output_tokens: int = 4096
    max_in_flight: int = 4
    requests_per_minute: Optional[float] = None
    retries: int = 3
    script: dict = field(default_factory=dict)  # mock: request_tag -> response text
    script_default: str = ""

    def __post_init__(self):
        if self.kind not in ("live", "mock"):
            raise ValueError(f"backend kind must be live or mock, got {self.kind!r}")
        if self.image_policy not in ("drop", "error"):
            raise ValueError("image_policy must be 'drop' or 'error'")


class ReplayStore:
    """One JSON file per request digest, reviewable and committable."""

    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def has(self, key: str) -> bool:
        return self._path(key).exists()

    def get(self, key: str) -> Optional[dict]:
        path = self._path(key)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, key: str, request_norm: dict, response: dict) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        payload = {"request": request_norm, "response": response}
        self._path(key).write_text(
            json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8"
        )


class _TokenBucket:
    def __init__(self, per_minute: float):
        self.capacity = max(1.0, per_minute)
        self.tokens = self.capacity
        self.rate = per_minute / 60.0
        self.updated = time.monotonic()
        self.lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self.lock:
                now = time.monotonic()
                self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
                self.updated = now
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                wait = (1.0 - self.tokens) / self.rate
            time.sleep(wait)


def _strip_images(req: ChatRequest) -> ChatRequest:
    messages = tuple(
        ChatMessage(m.role, m.text, ()) for m in req.messages
    )
    return ChatRequest(
        backend_id=req.backend_id,
        system_prompt=req.system_prompt,
        messages=messages,
        temperature=req.temperature,
        max_output_tokens=req.max_output_tokens,
        request_tag=req.request_tag,
    )


def _message_content(message: ChatMessage):
    if not message.attachments:
        return message.text
    parts = [{"type": "text", "text": message.text}]
    for att in message.attachments:
        parts.append({"type": "text", "text": att.label})
        encoded = base64.b64encode(att.png).decode("ascii")
        parts.append(
            {"type": "image_url", "image_url": {"url": f"data:image/png;base64,{encoded}"}}
        )
    return parts


def _wire_body(cfg: BackendConfig, req: ChatRequest) -> dict:
    messages = []
    if req.system_prompt:
        messages.append({"role": "system", "content": req.system_prompt})
    for m in req.messages:
        messages.append({"role": m.role, "content": _message_content(m)})
    return {
        "model": cfg.model,
        "messages": messages,
        "temperature": req.temperature,
        "max_tokens": req.max_output_tokens,
    }


class Backend:
    """complete() is safe for concurrent use."""

    def __init__(self, cfg: BackendConfig):
        self.cfg = cfg

    def complete(self, req: ChatRequest) -> ChatResponse:
        raise NotImplementedError


class MockBackend(Backend):
    """Canned responses keyed by request_tag; no network, no state."""

    def complete(self, req: ChatRequest) -> ChatResponse:
        text = self.cfg.script.get(req.request_tag, self.cfg.script_default)
        if not text:
            raise BackendUnavailable(
                f"mock backend {self.cfg.id!r} has no script for tag {req.request_tag!r}"
            )
        return ChatResponse(
            text=text,
            backend_id=self.cfg.id,
            content_digest=digest(req),
            token_usage=TokenUsage(prompt=0, completion=len(text.split())),
        )


class LiveBackend(Backend):
    """HTTP chat completion with bounded retries and record/replay."""

    def __init__(
        self,
        cfg: BackendConfig,
        replay: bool = False,
        record: bool = False,
        store: Optional[ReplayStore] = None,
        transport: Optional[httpx.BaseTransport] = None,
        backoff_s: float = 1.0,
    ):
        super().__init__(cfg)
        if (replay or record) and store is None:
            raise ValueError("replay/record modes need a replay store")
        self.replay = replay
        self.record = record
        self.store = store
        self.backoff_s = backoff_s
        self._client = httpx.Client(transport=transport, timeout=120.0)
        self._slots = threading.Semaphore(cfg.max_in_flight)
        self._bucket = (
            _TokenBucket(cfg.requests_per_minute) if cfg.requests_per_minute else None
        )

    def _resolve_images(self, req: ChatRequest) -> tuple[ChatRequest, tuple[str, ...]]:
        has_images = any(m.attachments for m in req.messages)
        if not has_images or self.cfg.supports_images:
            return req, ()
        if self.cfg.image_policy == "error":
            raise ImageUnsupported(
                f"backend {self.cfg.id!r} is text-only and image_policy is 'error'"
            )
        log.warning("backend %s is text-only; dropping image attachments", self.cfg.id)
        return _strip_images(req), ("image attachments dropped: text-only backend",)

    def complete(self, req: ChatRequest) -> ChatResponse:
        req, warnings = self._resolve_images(req)
        key = digest(req)

        if self.replay:
            stored = self.store.get(key)
            if stored is None:
                raise ReplayMiss(f"no stored response for digest {key}")
            resp = stored["response"]
            return ChatResponse(
                text=resp["text"],
                backend_id=self.cfg.id,
                content_digest=key,
                token_usage=TokenUsage(**resp.get("token_usage", {})),
                latency_s=resp.get("latency_s", 0.0),
                warnings=warnings,
            )

        if not self.cfg.base_url:
            raise BackendUnavailable(f"backend {self.cfg.id!r} has no base_url configured")
        headers = {}
        if self.cfg.auth_env:
            token = os.environ.get(self.cfg.auth_env, "")
            if not token:
                raise BackendUnavailable(
                    f"credential variable {self.cfg.auth_env} is not set"
                )
            value = f"{self.cfg.auth_scheme} {token}".strip()
            headers[self.cfg.auth_header] = value

        body = _wire_body(self.cfg, req)
        url = self.cfg.base_url.rstrip("/") + "/chat/completions"
        last_error: Optional[str] = None
        start = time.monotonic()
        for attempt in range(self.cfg.retries):
            if self._bucket:
                self._bucket.acquire()
            with self._slots:
                try:
                    http = self._client.post(url, json=body, headers=headers)
                except httpx.TransportError as exc:
                    last_error = f"transport error: {exc}"
                    time.sleep(self.backoff_s * 2**attempt)
                    continue
            if http.status_code in RETRYABLE_STATUS:
                last_error = f"HTTP {http.status_code}"
                time.sleep(self.backoff_s * 2**attempt)
                continue
            if http.status_code != 200:
                raise BackendUnavailable(
                    f"backend {self.cfg.id}: HTTP {http.status_code}: {http.text[:500]}"
                )
            payload = http.json()
            try:
                text = payload["choices"][0]["message"]["content"] or ""
            except (KeyError, IndexError, TypeError) as exc:
                raise BackendUnavailable(
                    f"backend {self.cfg.id}: malformed completion payload: {exc}"
                ) from exc
            usage = payload.get("usage", {})
            response = ChatResponse(
                text=text,
                backend_id=self.cfg.id,
                content_digest=key,
                token_usage=TokenUsage(
                    prompt=int(usage.get("prompt_tokens", 0)),
                    completion=int(usage.get("completion_tokens", 0)),
                ),
                latency_s=time.monotonic() - start,
                warnings=warnings,
                error="" if text else "empty completion",
            )
            if self.record and self.store is not None:
                self.store.put(
                    key,
                    normalize_request(req),
                    {
                        "text": response.text,
                        "token_usage": {
                            "prompt": response.token_usage.prompt,
                            "completion": response.token_usage.completion,
                        },
                        "latency_s": response.latency_s,
                    },
                )
            return response
        raise BackendUnavailable(
            f"backend {self.cfg.id}: retries exhausted ({last_error})"
        )


def build_backend(
    cfg: BackendConfig,
    replay: bool = False,
    record: bool = False,
    store: Optional[ReplayStore] = None,
    transport: Optional[httpx.BaseTransport] = None,
) -> Backend:
    if cfg.kind == "mock":
        return MockBackend(cfg)
    return LiveBackend(cfg, replay=replay, record=record, store=store, transport=transport)


@dataclass(frozen=True)
class BackendsConfig:
    backends: dict[str, BackendConfig]
    generators: tuple[str, ...]
    assessors: tuple[str, ...]

    def require(self, backend_id: str) -> BackendConfig:
        if backend_id not in self.backends:
            raise BackendUnavailable(f"backend {backend_id!r} is not configured")
        return self.backends[backend_id]


def load_backends_config(path: Path) -> BackendsConfig:
    """Read the backends JSON file; see README for the schema."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    backends: dict[str, BackendConfig] = {}
    for entry in raw.get("backends", []):
        entry = dict(entry)
        script_file = entry.pop("script_file", None)
        if script_file:
            script_path = Path(path).parent / script_file
            entry["script"] = json.loads(script_path.read_text(encoding="utf-8"))
        cfg = BackendConfig(**entry)
        backends[cfg.id] = cfg
    generators = tuple(raw.get("generators", sorted(backends)))
    assessors = tuple(raw.get("assessors", ()))
    for name in tuple(generators) + tuple(assessors):
        if name not in backends:
            raise BackendUnavailable(f"role references unknown backend {name!r}")
    return BackendsConfig(backends=backends, generators=generators, assessors=assessors)
