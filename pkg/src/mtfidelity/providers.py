"""Clients for translation, embedding and sentiment endpoints.

All model calls go through :class:`ProviderClient`, which adds a
content-addressed response cache, bounded parallelism and retries with
jittered exponential backoff. Each item (one source text, one sentence to
embed, one sentence to classify) is cached separately so a warm cache
replays a run without any upstream request.

Wire protocols (``protocol`` field of a profile):

``chat``
    OpenAI-compatible chat completion. Request ``{"model", "messages", **params}``,
    response ``{"choices": [{"message": {"content": str}}]}``.
``google-v3``
    Cloud Translation v3 ``translateText``. Request ``{"contents": [str],
    "sourceLanguageCode", "targetLanguageCode", "mimeType"}``, response
    ``{"translations": [{"translatedText": str}]}``.
``embeddings``
    Request ``{"model", "input": [str], "granularity": "sentence"|"token"}``.
    Sentence responses are ``{"data": [{"index", "embedding": [float]}]}``;
    token responses are ``{"data": [{"index", "tokens": [str], "embeddings": [[float]]}]}``.
``scores``
    Request ``{"model", "inputs": [str]}``, response
    ``{"results": [{category: score}]}`` with all nine categories.
``mock``
    Answers any of the above shapes locally and deterministically.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import os
import random
import re
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence
from urllib.parse import urlparse

import httpx
import numpy as np

from .errors import (
    AuthError,
    DimensionDrift,
    NetworkError,
    ProviderError,
    ProviderRefusal,
)
from .lexical import tokenize
from .sentiment import EmotionCategory, normalize_scores
from .tokenmatch import TokenEmbeddingSequence

logger = logging.getLogger(__name__)

DEFAULT_TRANSLATION_PROMPT = (
    "Please translate the following Chinese text into English, it should be in the "
    "original meaning and style to render the translation consistent."
)

MAX_ATTEMPTS = 3
BACKOFF_BASE = 0.5

REFUSAL_PATTERNS = [
    re.compile(
        r"\b(?:sorry|apologi[sz]e)\b.{0,40}\b(?:can(?:'|’)?t|cannot|can not|unable to|won(?:'|’)?t)\b"
        r".{0,30}\b(?:assist|help|comply|provide|translate|fulfil{1,2})",
        re.IGNORECASE | re.DOTALL,
    ),
    re.compile(r"^\s*I(?:'|’)m (?:not able|unable) to (?:assist|help|translate)", re.IGNORECASE),
]


class ProviderKind(str, enum.Enum):
    TRANSLATION = "Translation"
    EMBEDDING = "Embedding"
    SENTIMENT = "SentimentClassifier"


class EmbedMode(str, enum.Enum):
    SENTENCE = "Sentence"
    PER_TOKEN = "PerToken"


PROTOCOLS = {"chat", "google-v3", "embeddings", "scores", "mock"}

# Named starting points; any field can be overridden in a profile file.
PRESETS: dict[str, dict[str, Any]] = {
    "google-v3": {
        "kind": "Translation",
        "protocol": "google-v3",
        "endpoint": "https://translation.googleapis.com/v3/projects/PROJECT_ID:translateText",
        "model": "nmt",
        "auth_env": "GOOGLE_TRANSLATE_TOKEN",
        "system_prompt": None,
    },
    "openai-chat": {
        "kind": "Translation",
        "protocol": "chat",
        "endpoint": "https://api.openai.com/v1/chat/completions",
        "model": "gpt-4o",
        "auth_env": "OPENAI_API_KEY",
        "system_prompt": DEFAULT_TRANSLATION_PROMPT,
    },
    "deepseek-chat": {
        "kind": "Translation",
        "protocol": "chat",
        "endpoint": "https://api.deepseek.com/chat/completions",
        "model": "deepseek-chat",
        "auth_env": "DEEPSEEK_API_KEY",
        "system_prompt": DEFAULT_TRANSLATION_PROMPT,
    },
    "openai-embeddings": {
        "kind": "Embedding",
        "protocol": "embeddings",
        "endpoint": "https://api.openai.com/v1/embeddings",
        "model": "text-embedding-3-small",
        "auth_env": "OPENAI_API_KEY",
    },
    "mock-translation": {"kind": "Translation", "protocol": "mock", "endpoint": "mock://translation", "model": "mock-mt"},
    "mock-embedding": {"kind": "Embedding", "protocol": "mock", "endpoint": "mock://embedding", "model": "mock-embed"},
    "mock-sentiment": {"kind": "SentimentClassifier", "protocol": "mock", "endpoint": "mock://sentiment", "model": "mock-senti"},
}


@dataclass(frozen=True)
class ProviderConfig:
    name: str
    kind: ProviderKind
    endpoint: str
    model: str
    protocol: str = "mock"
    auth_env: str | None = None  # name of the environment variable, never the secret
    system_prompt: str | None = None
    timeout: float = 60.0
    max_parallel: int = 4
    batch_size: int = 32
    params: Mapping[str, Any] = field(default_factory=dict)
    dimension: int = 64  # mock embeddings
    responses: Mapping[str, Any] = field(default_factory=dict)  # mock fixed outputs

    def __post_init__(self):
        object.__setattr__(self, "kind", ProviderKind(self.kind))
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"{self.name}: unknown protocol {self.protocol!r}")
        parsed = urlparse(self.endpoint)
        allowed = {"mock"} if self.protocol == "mock" else {"http", "https"}
        if parsed.scheme not in allowed or not (parsed.netloc or parsed.path):
            raise ValueError(f"{self.name}: malformed endpoint {self.endpoint!r}")
        if self.max_parallel < 1:
            raise ValueError(f"{self.name}: max_parallel must be >= 1")
        if self.batch_size < 1:
            raise ValueError(f"{self.name}: batch_size must be >= 1")
        if self.timeout <= 0:
            raise ValueError(f"{self.name}: timeout must be positive")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ProviderConfig":
        data = dict(data)
        preset = data.pop("preset", None)
        if preset is not None:
            if preset not in PRESETS:
                raise ValueError(f"unknown preset {preset!r}; known: {sorted(PRESETS)}")
            data = {**PRESETS[preset], **data}
        if "name" not in data:
            raise ValueError("provider profile needs a 'name'")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"{data['name']}: unknown profile fields {sorted(unknown)}")
        return cls(**data)

    def redacted(self) -> dict[str, Any]:
        """Profile as recorded in run manifests; only the env var name appears."""
        out = asdict(self)
        out["kind"] = self.kind.value
        out["params"] = dict(self.params)
        out.pop("responses")
        if self.protocol != "mock":
            out.pop("dimension")
        return out


def load_profiles(path: str | Path) -> list[ProviderConfig]:
    """Read ``{"providers": [...]}`` from a JSON profile file."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = raw.get("providers") if isinstance(raw, Mapping) else raw
    if not isinstance(entries, list):
        raise ValueError(f"{path}: expected a 'providers' list")
    profiles = [ProviderConfig.from_dict(e) for e in entries]
    names = [p.name for p in profiles]
    if len(set(names)) != len(names):
        raise ValueError(f"{path}: duplicate provider names")
    return profiles


# ---------------------------------------------------------------------------
# cache


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def cache_key(cfg: ProviderConfig, item: Mapping[str, Any]) -> str:
    material = {
        "kind": cfg.kind.value,
        "endpoint": cfg.endpoint,
        "model": cfg.model,
        "system_prompt": cfg.system_prompt,
        "params": dict(cfg.params),
        "request": item,
    }
    return hashlib.sha256(canonical_json(material).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    key: str
    response: Any
    created_at: str


class ResponseCache:
    """Files at ``<root>/<kind>/<first two hex digits>/<digest>.json``.

    Entries are written once via atomic rename and never replaced. Reads need
    no lock; writes are serialized.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._write_lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def path_for(self, kind: ProviderKind, key: str) -> Path:
        return self.root / kind.value / key[:2] / f"{key}.json"

    def get(self, kind: ProviderKind, key: str) -> CacheEntry | None:
        path = self.path_for(kind, key)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            self.misses += 1
            return None
        self.hits += 1
        return CacheEntry(data["key"], data["response"], data["created_at"])

    def put(self, kind: ProviderKind, key: str, response: Any) -> CacheEntry:
        path = self.path_for(kind, key)
        with self._write_lock:
            if path.exists():
                existing = self.get(kind, key)
                assert existing is not None
                return existing
            created = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
            entry = {"key": key, "kind": kind.value, "created_at": created, "response": response}
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(entry, sort_keys=True, ensure_ascii=False, indent=1))
                fh.write("\n")
            os.replace(tmp, path)
        return CacheEntry(key, response, created)


# ---------------------------------------------------------------------------
# transports

Transport = Callable[[ProviderConfig, dict], dict]


class _Retryable(Exception):
    pass


class HttpTransport:
    """POSTs JSON to the profile endpoint with a bearer token from the environment."""

    def __init__(self, client: httpx.Client | None = None):
        self._client = client
        self._lock = threading.Lock()

    def _http(self) -> httpx.Client:
        with self._lock:
            if self._client is None:
                self._client = httpx.Client()
            return self._client

    def __call__(self, cfg: ProviderConfig, body: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        if cfg.auth_env:
            token = os.environ.get(cfg.auth_env)
            if not token:
                raise AuthError(f"{cfg.name}: environment variable {cfg.auth_env} is not set")
            headers["Authorization"] = f"Bearer {token}"
        try:
            resp = self._http().post(cfg.endpoint, json=body, headers=headers, timeout=cfg.timeout)
        except httpx.TransportError as exc:
            raise _Retryable(f"{type(exc).__name__}: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"{cfg.name}: HTTP {resp.status_code} from {cfg.endpoint}")
        if resp.status_code == 429 or resp.status_code >= 500:
            raise _Retryable(f"HTTP {resp.status_code}")
        if resp.status_code >= 400:
            raise ProviderError(f"{cfg.name}: HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()
        except ValueError as exc:
            raise ProviderError(f"{cfg.name}: response is not JSON") from exc


def _seed_of(*parts: str) -> int:
    return int.from_bytes(hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()[:8], "big")


def mock_token_vector(model: str, token: str, dimension: int) -> np.ndarray:
    return np.random.default_rng(_seed_of(model, token)).standard_normal(dimension)


def _mock_units(text: str) -> list[str]:
    return list(tokenize(text).tokens) or [c for c in text if not c.isspace()] or [text]


_MOCK_CUES = {
    EmotionCategory.THANKFUL: ("thank", "grateful", "gratitude"),
    EmotionCategory.OPTIMISTIC: ("hope", "bright", "prosper", "progress", "growth"),
    EmotionCategory.SAD: ("weep", "tears", "grief", "sorrow", "mourn"),
    EmotionCategory.ANXIOUS: ("afraid", "fear", "worry", "trembl"),
    EmotionCategory.ANNOYED: ("angry", "curse", "damn", "shout"),
    EmotionCategory.HUMOUR: ("laugh", "joke", "smile", "grin"),
    EmotionCategory.EMPATHETIC: ("together", "friend", "share", "help"),
    EmotionCategory.PESSIMISTIC: ("never", "ruin", "doom", "lost"),
    EmotionCategory.DENIAL: ("deny", "refuse", "not true"),
}


class MockTransport:
    """Deterministic local stand-in answering every wire protocol.

    Translation returns ``cfg.responses[source]`` when present, otherwise a
    tagged echo of the source. Sentence embeddings are sums of per-word
    pseudo-random vectors, so texts sharing words point in similar
    directions. Classifier scores mix a keyword cue with a hash of the text.
    """

    def __call__(self, cfg: ProviderConfig, body: dict) -> dict:
        if cfg.kind is ProviderKind.TRANSLATION:
            if "contents" in body:
                return {"translations": [{"translatedText": self._translate(cfg, t)} for t in body["contents"]]}
            source = body["messages"][-1]["content"]
            return {"choices": [{"message": {"role": "assistant", "content": self._translate(cfg, source)}}]}
        if cfg.kind is ProviderKind.EMBEDDING:
            per_token = body.get("granularity") == "token"
            data = []
            for i, text in enumerate(body["input"]):
                if per_token:
                    toks, vecs = self._token_vectors(cfg, text)
                    data.append({"index": i, "tokens": toks, "embeddings": vecs})
                else:
                    data.append({"index": i, "embedding": self._sentence_vector(cfg, text)})
            return {"data": data}
        return {"results": [self._scores(cfg, s) for s in body["inputs"]]}

    @staticmethod
    def _translate(cfg: ProviderConfig, source: str) -> str:
        if source in cfg.responses:
            return cfg.responses[source]
        return f"[{cfg.model}] {source}"

    @staticmethod
    def _sentence_vector(cfg: ProviderConfig, text: str) -> list[float]:
        if text in cfg.responses:
            return [float(x) for x in cfg.responses[text]]
        vec = sum(mock_token_vector(cfg.model, u, cfg.dimension) for u in _mock_units(text))
        return [round(float(x), 8) for x in vec]

    @staticmethod
    def _token_vectors(cfg: ProviderConfig, text: str) -> tuple[list[str], list[list[float]]]:
        units = _mock_units(text)
        base = [mock_token_vector(cfg.model, u, cfg.dimension) for u in units]
        vecs = []
        for i, v in enumerate(base):
            ctx = v.copy()
            if i > 0:
                ctx += 0.25 * base[i - 1]
            if i + 1 < len(base):
                ctx += 0.25 * base[i + 1]
            vecs.append([round(float(x), 8) for x in ctx])
        return units, vecs

    @staticmethod
    def _scores(cfg: ProviderConfig, sentence: str) -> dict[str, float]:
        if sentence in cfg.responses:
            return dict(cfg.responses[sentence])
        lowered = sentence.lower()
        out = {}
        for cat in EmotionCategory:
            noise = (_seed_of(cfg.model, cat.value, sentence) % 10_000) / 10_000
            cue = 0.9 if any(c in lowered for c in _MOCK_CUES[cat]) else 0.0
            out[cat.value] = round(max(cue, 0.6 * noise), 4)
        return out


# ---------------------------------------------------------------------------
# client


class ProviderClient:
    """Cache lookup, bounded parallel submission and retrying for one profile."""

    def __init__(
        self,
        cfg: ProviderConfig,
        cache: ResponseCache | None = None,
        transport: Transport | None = None,
        *,
        sleep: Callable[[float], None] = time.sleep,
        seed: int = 0,
    ):
        self.cfg = cfg
        self.cache = cache
        if transport is None:
            transport = MockTransport() if cfg.protocol == "mock" else HttpTransport()
        self.transport = transport
        self._sleep = sleep
        self._rng = random.Random(seed)
        self._slots = threading.BoundedSemaphore(cfg.max_parallel)
        self._stats_lock = threading.Lock()
        self._memo: dict[str, Any] = {}
        self.requests = 0  # upstream attempts, including retries
        self.in_flight = 0
        self.peak_in_flight = 0

    def _send(self, body: dict) -> dict:
        last: Exception | None = None
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                delay = BACKOFF_BASE * 2 ** (attempt - 1)
                with self._stats_lock:
                    delay += self._rng.uniform(0, delay / 2)
                self._sleep(delay)
            with self._slots:
                with self._stats_lock:
                    self.requests += 1
                    self.in_flight += 1
                    self.peak_in_flight = max(self.peak_in_flight, self.in_flight)
                try:
                    return self.transport(self.cfg, body)
                except _Retryable as exc:
                    last = exc
                    logger.info("%s: attempt %d failed: %s", self.cfg.name, attempt + 1, exc)
                finally:
                    with self._stats_lock:
                        self.in_flight -= 1
        raise NetworkError(f"{self.cfg.name}: giving up after {MAX_ATTEMPTS} attempts: {last}")

    def fetch(
        self,
        items: Sequence[dict],
        build_body: Callable[[list[dict]], dict],
        split_response: Callable[[dict, int], list[Any]],
    ) -> list[Any]:
        """Resolve each item from cache or upstream, preserving order.

        Duplicate items are requested once. Misses are grouped into batches
        of ``cfg.batch_size`` and submitted with at most ``max_parallel`` in flight.
        """
        keys = [cache_key(self.cfg, item) for item in items]
        results: dict[str, Any] = {}
        missing: dict[str, dict] = {}
        for key, item in zip(keys, items):
            if key in results or key in missing:
                continue
            if key in self._memo:
                results[key] = self._memo[key]
                continue
            entry = self.cache.get(self.cfg.kind, key) if self.cache else None
            if entry is not None:
                results[key] = entry.response
            else:
                missing[key] = item

        pending = list(missing.items())
        batches = [pending[i : i + self.cfg.batch_size] for i in range(0, len(pending), self.cfg.batch_size)]

        def run(batch):
            response = self._send(build_body([item for _, item in batch]))
            parts = split_response(response, len(batch))
            if len(parts) != len(batch):
                raise ProviderError(f"{self.cfg.name}: expected {len(batch)} results, got {len(parts)}")
            return [(key, part) for (key, _), part in zip(batch, parts)]

        if len(batches) > 1 and self.cfg.max_parallel > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.max_parallel) as pool:
                done = list(pool.map(run, batches))
        else:
            done = [run(b) for b in batches]
        for pairs in done:
            for key, part in pairs:
                # round-trip through JSON so fresh and cached answers are identical
                part = json.loads(canonical_json(part))
                if self.cache is not None:
                    self.cache.put(self.cfg.kind, key, part)
                results[key] = part
        self._memo.update(results)
        return [results[k] for k in keys]


def _require(cfg: ProviderConfig, kind: ProviderKind) -> None:
    if cfg.kind is not kind:
        raise ValueError(f"profile {cfg.name} is a {cfg.kind.value} provider, not {kind.value}")


def is_refusal(text: str) -> bool:
    return any(p.search(text) for p in REFUSAL_PATTERNS)


class Translator:
    def __init__(self, cfg: ProviderConfig, cache: ResponseCache | None = None, transport: Transport | None = None, **kw):
        _require(cfg, ProviderKind.TRANSLATION)
        self.client = ProviderClient(cfg, cache, transport, **kw)
        self.cfg = cfg

    def _body(self, items: list[dict]) -> dict:
        cfg = self.cfg
        (item,) = items
        if cfg.protocol == "google-v3" or (cfg.protocol == "mock" and cfg.system_prompt is None):
            return {
                "contents": [item["text"]],
                "sourceLanguageCode": "zh-CN",
                "targetLanguageCode": "en",
                "mimeType": "text/plain",
                **cfg.params,
            }
        messages = []
        if cfg.system_prompt:
            messages.append({"role": "system", "content": cfg.system_prompt})
        messages.append({"role": "user", "content": item["text"]})
        return {"model": cfg.model, "messages": messages, **cfg.params}

    @staticmethod
    def _split(response: dict, n: int) -> list[str]:
        try:
            if "translations" in response:
                return [t["translatedText"] for t in response["translations"]]
            return [response["choices"][0]["message"]["content"]]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected translation response shape: {exc!r}") from exc

    def translate(self, source_zh: str) -> str:
        if not source_zh.strip():
            raise ValueError("source text is empty")
        # one text per request: chat endpoints take a single conversation
        (text,) = self.client.fetch([{"text": source_zh}], self._body, self._split)
        text = str(text).strip()
        if not text or is_refusal(text):
            raise ProviderRefusal(text)
        return text


class Embedder:
    def __init__(self, cfg: ProviderConfig, cache: ResponseCache | None = None, transport: Transport | None = None, **kw):
        _require(cfg, ProviderKind.EMBEDDING)
        self.client = ProviderClient(cfg, cache, transport, **kw)
        self.cfg = cfg
        self.dimension: int | None = None
        self._dim_lock = threading.Lock()

    def _check_dim(self, dim: int) -> None:
        with self._dim_lock:
            if self.dimension is None:
                self.dimension = dim
            elif dim != self.dimension:
                raise DimensionDrift(f"{self.cfg.name}: dimension changed from {self.dimension} to {dim}")

    def _body_for(self, granularity: str):
        def body(items: list[dict]) -> dict:
            return {"model": self.cfg.model, "input": [i["text"] for i in items], "granularity": granularity, **self.cfg.params}

        return body

    @staticmethod
    def _split(response: dict, n: int) -> list[Any]:
        try:
            data = sorted(response["data"], key=lambda d: d["index"])
        except (KeyError, TypeError) as exc:
            raise ProviderError(f"unexpected embedding response shape: {exc!r}") from exc
        return [{k: v for k, v in d.items() if k != "index"} for d in data]

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        if not texts:
            return []
        parts = self.client.fetch([{"text": t, "granularity": "sentence"} for t in texts], self._body_for("sentence"), self._split)
        out = []
        for part in parts:
            vec = np.asarray(part["embedding"], dtype=float)
            self._check_dim(vec.size)
            out.append(vec)
        return out

    def embed_tokens(self, texts: Sequence[str]) -> list[TokenEmbeddingSequence]:
        if not texts:
            return []
        parts = self.client.fetch([{"text": t, "granularity": "token"} for t in texts], self._body_for("token"), self._split)
        out = []
        for part in parts:
            seq = TokenEmbeddingSequence(tuple(part["tokens"]), np.asarray(part["embeddings"], dtype=float))
            self._check_dim(seq.dimension)
            out.append(seq)
        return out


class SentimentClassifier:
    def __init__(self, cfg: ProviderConfig, cache: ResponseCache | None = None, transport: Transport | None = None, **kw):
        _require(cfg, ProviderKind.SENTIMENT)
        self.client = ProviderClient(cfg, cache, transport, **kw)
        self.cfg = cfg

    def _body(self, items: list[dict]) -> dict:
        return {"model": self.cfg.model, "inputs": [i["text"] for i in items], **self.cfg.params}

    @staticmethod
    def _split(response: dict, n: int) -> list[Any]:
        try:
            return list(response["results"])
        except (KeyError, TypeError) as exc:
            raise ProviderError(f"unexpected classifier response shape: {exc!r}") from exc

    def classify(self, sentences: Sequence[str]) -> list[dict[EmotionCategory, float]]:
        if not sentences:
            return []
        parts = self.client.fetch([{"text": s} for s in sentences], self._body, self._split)
        return [normalize_scores(p) for p in parts]


# functional entry points ----------------------------------------------------


def translate(source_zh: str, cfg: ProviderConfig, cache: ResponseCache | None = None, *, transport: Transport | None = None) -> str:
    return Translator(cfg, cache, transport).translate(source_zh)


def embed(
    texts: Sequence[str],
    cfg: ProviderConfig,
    mode: EmbedMode | str = EmbedMode.SENTENCE,
    cache: ResponseCache | None = None,
    *,
    transport: Transport | None = None,
):
    embedder = Embedder(cfg, cache, transport)
    if EmbedMode(mode) is EmbedMode.PER_TOKEN:
        return embedder.embed_tokens(texts)
    return embedder.embed(texts)


def classify(
    sentences: Sequence[str], cfg: ProviderConfig, cache: ResponseCache | None = None, *, transport: Transport | None = None
) -> list[dict[EmotionCategory, float]]:
    return SentimentClassifier(cfg, cache, transport).classify(sentences)
