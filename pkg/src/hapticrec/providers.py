"""Model-provider boundary: completions, embeddings, tag extraction.

Every generative call in the system goes through one of the interfaces
here. The default implementations are deterministic offline mocks, so
the whole pipeline runs and tests without network access; the HTTP
completion adapter is the only code in the package that performs
network I/O.

Prompt sections the mock completion provider understands:

* ``[conversation] ... [/conversation]`` with ``user:`` lines — returns
  the user turns joined into one consolidated request.
* ``[block] ... [/block]`` sections — returns the first sentence of each
  block joined into a summary.
* ``[device:<id>] <name>`` reference headers — returns a fixed-format
  recommendation enumerating exactly those devices.
"""

from __future__ import annotations

import logging
import re
import time
import zlib
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .errors import ProviderError, SchemaValidationError
from .schema import TaxonomySchema
from .store import DEFAULT_EMBED_DIM, normalize

logger = logging.getLogger(__name__)

NO_MATCH_SENTINEL = "[no matching devices]"
NO_MATCH_ANSWER = (
    "No devices in the catalog matched this request. "
    "Try relaxing a constraint or describing the task differently."
)
OFF_DOMAIN_ANSWER = (
    "I can help with grounded force feedback device recommendations; "
    "ask about devices, forces, workspaces or degrees of freedom."
)

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")
_SENTENCE_END = re.compile(r"[.!?](?=\s|$)")
_DEVICE_HEADER = re.compile(r"^\[device:(\d+)\] (.+)$", re.MULTILINE)


class CompletionProvider(Protocol):
    def complete(self, prompt: str, max_tokens: int = 512) -> str: ...


class EmbeddingProvider(Protocol):
    def embed(self, text: str) -> np.ndarray: ...

    @property
    def dim(self) -> int: ...


class ExtractionProvider(Protocol):
    def tag(self, content: str, schema: TaxonomySchema) -> list[tuple[str, str]]: ...


def first_sentence(text: str) -> str:
    flat = " ".join(text.split())
    m = _SENTENCE_END.search(flat)
    return flat[: m.end()] if m else flat


def _sections(prompt: str, open_tag: str, close_tag: str) -> list[str]:
    out = []
    pos = 0
    while True:
        start = prompt.find(open_tag, pos)
        if start < 0:
            return out
        end = prompt.find(close_tag, start)
        if end < 0:
            return out
        out.append(prompt[start + len(open_tag) : end].strip())
        pos = end + len(close_tag)


class MockCompletionProvider:
    """Pure-function stand-in for a chat completion model."""

    def complete(self, prompt: str, max_tokens: int = 512) -> str:
        conversation = _sections(prompt, "[conversation]", "[/conversation]")
        if conversation:
            turns = [
                line[len("user: ") :].strip()
                for line in conversation[0].splitlines()
                if line.startswith("user: ")
            ]
            return " ".join(t for t in turns if t)

        blocks = _sections(prompt, "[block]", "[/block]")
        if blocks:
            return " ".join(first_sentence(b) for b in blocks if b.strip())

        if NO_MATCH_SENTINEL in prompt:
            return NO_MATCH_ANSWER

        headers = _DEVICE_HEADER.findall(prompt)
        if headers:
            lines = ["Here are the devices that best match the request:"]
            summaries = dict(_reference_summaries(prompt))
            for idx, (device_id, name) in enumerate(headers, start=1):
                summary = summaries.get(device_id, "")
                lines.append(f"{idx}. [device:{device_id}] {name} — {summary}".rstrip(" —"))
            return "\n".join(lines)

        return OFF_DOMAIN_ANSWER


def _reference_summaries(prompt: str) -> list[tuple[str, str]]:
    """(device id, summary line) pairs read from reference blocks."""
    out = []
    current: str | None = None
    for line in prompt.splitlines():
        m = _DEVICE_HEADER.match(line)
        if m:
            current = m.group(1)
            continue
        if current is not None and line.startswith("  summary: "):
            out.append((current, line[len("  summary: ") :].strip()))
            current = None
    return out


class MockEmbeddingProvider:
    """Hashed bag-of-words embedder.

    Lowercase, split on non-alphanumerics, hash each token into one of
    ``dim`` buckets (crc32, stable across runs and platforms), count,
    L2-normalize. Same text always yields the same unit vector.
    """

    def __init__(self, dim: int = DEFAULT_EMBED_DIM):
        self._dim = dim

    @property
    def dim(self) -> int:
        return self._dim

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise SchemaValidationError("cannot embed empty text")
        counts = np.zeros(self._dim, dtype=np.float64)
        for token in _TOKEN_SPLIT.split(text.lower()):
            if token:
                counts[zlib.crc32(token.encode("utf-8")) % self._dim] += 1.0
        if not counts.any():
            raise SchemaValidationError(f"no embeddable tokens in {text!r}")
        return normalize(counts, self._dim)


class RuleBasedExtractor:
    """Deterministic tag extractor driven by a per-attribute pattern table.

    The table maps attribute names to regex entries; ``value`` is either a
    literal or ``$1`` for the first capture group. Every schema attribute
    with patterns is interrogated against the block content; attributes
    without a match yield nothing. Only schema attributes ever come out.
    """

    def __init__(self, patterns: dict[str, list[dict]]):
        self._compiled: dict[str, list[tuple[re.Pattern, str]]] = {}
        for attr, entries in patterns.items():
            self._compiled[attr] = [
                (re.compile(e["pattern"], re.IGNORECASE), e["value"]) for e in entries
            ]

    def tag(self, content: str, schema: TaxonomySchema) -> list[tuple[str, str]]:
        found = []
        for attr in schema.names():
            for pattern, value in self._compiled.get(attr, ()):
                m = pattern.search(content)
                if m:
                    found.append((attr, m.group(1) if value == "$1" else value))
                    break
        return found


class LlmExtractor:
    """Tag extractor backed by a completion provider.

    Asks for one ``attribute = value`` line per detected attribute;
    malformed lines and non-schema attributes are skipped and logged, so
    a sloppy model never crashes the pipeline.
    """

    def __init__(self, completion: CompletionProvider):
        self._completion = completion

    def tag(self, content: str, schema: TaxonomySchema) -> list[tuple[str, str]]:
        prompt = (
            "Read the following excerpt from haptic device documentation and "
            "report every catalog attribute it gives evidence for, one per "
            "line, formatted exactly as 'attribute = value'. Consider each "
            "attribute in this catalog: "
            + ", ".join(schema.names())
            + "\n\nExcerpt:\n"
            + content
            + "\n\nAttributes:\n"
        )
        raw = self._completion.complete(prompt)
        found = []
        for line in raw.splitlines():
            if "=" not in line:
                continue
            attr, _, value = line.partition("=")
            attr = attr.strip().strip("-* ")
            value = value.strip()
            if attr in schema and value:
                found.append((attr, value))
            elif attr:
                logger.warning("extractor proposed unknown attribute %r; skipped", attr)
        return found


# -- live HTTP adapter -------------------------------------------------------

# transport(url, headers, json_body, timeout) -> (status_code, parsed_body)
Transport = Callable[[str, dict, dict, float], tuple[int, dict]]


def _requests_transport(url: str, headers: dict, body: dict, timeout: float):
    import requests

    try:
        resp = requests.post(url, headers=headers, json=body, timeout=timeout)
    except requests.RequestException as exc:
        raise TimeoutError(str(exc)) from exc
    try:
        payload = resp.json()
    except ValueError:
        payload = {"raw": resp.text}
    return resp.status_code, payload


@dataclass
class HttpCompletionProvider:
    """Chat-completion-style JSON-over-HTTP adapter.

    Request shape: ``{"model", "messages": [{"role", "content"}],
    "max_tokens"}``; the answer is read from
    ``choices[0].message.content``. Adjust ``transport`` for vendors with
    a different envelope. Timeouts and 5xx responses retry with
    exponential backoff (3 attempts); 4xx responses fail permanently.
    """

    endpoint: str
    api_key: str | None = None
    model: str = "default"
    timeout_s: float = 30.0
    attempts: int = 3
    backoff_s: float = 0.5
    transport: Transport = _requests_transport
    _sleep: Callable[[float], None] = time.sleep

    def complete(self, prompt: str, max_tokens: int = 512) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "max_tokens": max_tokens,
        }
        delay = self.backoff_s
        last_error = "no attempts made"
        for attempt in range(1, self.attempts + 1):
            started = time.perf_counter()
            try:
                status, payload = self.transport(
                    self.endpoint, headers, body, self.timeout_s
                )
            except TimeoutError as exc:
                last_error = f"transport failure: {exc}"
                logger.warning("completion attempt %d failed: %s", attempt, exc)
            else:
                latency_ms = (time.perf_counter() - started) * 1000.0
                logger.info(
                    "completion call status=%s latency=%.1fms attempt=%d",
                    status,
                    latency_ms,
                    attempt,
                )
                if 200 <= status < 300:
                    return _extract_answer(payload)
                if 400 <= status < 500:
                    raise ProviderError(
                        f"permanent provider error (HTTP {status})", retryable=False
                    )
                last_error = f"HTTP {status}"
            if attempt < self.attempts:
                self._sleep(delay)
                delay *= 2
        raise ProviderError(
            f"provider unavailable after {self.attempts} attempts: {last_error}",
            retryable=True,
        )


def _extract_answer(payload: dict) -> str:
    try:
        return payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        raise ProviderError(
            f"unexpected completion payload shape: {list(payload)}", retryable=False
        ) from None


def fit_turns(turns: list[str], reserved_chars: int, budget_chars: int) -> list[str]:
    """Drop oldest turns until the prompt fits the character budget.

    Only conversation history is ever dropped; the reserved portion
    (device references, instructions) is never truncated.
    """
    kept = list(turns)
    while kept and reserved_chars + sum(len(t) + 1 for t in kept) > budget_chars:
        kept.pop(0)
    return kept
