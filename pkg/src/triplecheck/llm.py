"""Prompt construction, LLM clients (fixture replay + minimal HTTP), fact extraction.

Replay mode answers prompts from files keyed by a content hash, so everything
CI-facing runs without network access or API keys.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass

import requests

from .errors import ProtocolError, TransportError
from .rdf import ParseReport, PrefixMap, parse_triples

ENTITY = "entity"
TEXT = "text"
QUESTION = "question"

_FENCE_RE = re.compile(r"^\s*```")
_LIST_MARKER_RE = re.compile(r"^\s*(?:\d+[.)]\s+|[-*•]\s+)")


@dataclass(frozen=True)
class PromptSpec:
    shape: str
    payload: str
    format_name: str = "DBpedia"

    def __post_init__(self) -> None:
        if self.shape not in (ENTITY, TEXT, QUESTION):
            raise ValueError(f"unknown prompt shape: {self.shape!r}")
        if not self.payload:
            raise ValueError("prompt payload must be non-empty")


@dataclass(frozen=True)
class LlmClientConfig:
    mode: str = "replay"  # "replay" | "http"
    fixtures_dir: str | None = None
    base_url: str = "https://api.openai.com/v1"
    model_name: str = "gpt-3.5-turbo"
    api_key_env_var: str = "OPENAI_API_KEY"
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if self.mode not in ("replay", "http"):
            raise ValueError(f"unknown llm mode: {self.mode!r}")
        if self.mode == "replay":
            if not self.fixtures_dir or not os.path.isdir(self.fixtures_dir):
                raise ValueError(f"replay mode needs an existing fixtures dir, got {self.fixtures_dir!r}")


class NoFixtureError(Exception):
    def __init__(self, prompt_hash: str, path: str):
        super().__init__(f"no fixture for prompt hash {prompt_hash} (expected {path})")
        self.prompt_hash = prompt_hash
        self.path = path


def build_prompt(spec: PromptSpec) -> str:
    if spec.shape == ENTITY:
        return f"Give me facts about entity {spec.payload} using RDF N-triples and {spec.format_name} format"
    if spec.shape == TEXT:
        return f"Give me facts using RDF N-triples and {spec.format_name} format for the text: {spec.payload}"
    return f"Give me facts using RDF N-triples and {spec.format_name} format about the question: {spec.payload}"


def bench_prompt(entity_name: str) -> str:
    """The benchmark-collection prompt shape (always DBpedia-format entities)."""
    return f"Give me facts in RDF N-Triples format for entity {entity_name} using DBpedia format"


def prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def fixture_path(fixtures_dir: str, prompt: str) -> str:
    return os.path.join(fixtures_dir, prompt_key(prompt) + ".txt")


def save_fixture(fixtures_dir: str, prompt: str, response: str) -> str:
    """Store a response under its prompt hash; returns the file path."""
    path = fixture_path(fixtures_dir, prompt)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(response)
    return path


def fetch_response(cfg: LlmClientConfig, prompt: str) -> str:
    if cfg.mode == "replay":
        assert cfg.fixtures_dir is not None
        path = fixture_path(cfg.fixtures_dir, prompt)
        if not os.path.exists(path):
            raise NoFixtureError(prompt_key(prompt), path)
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    return _fetch_http(cfg, prompt)


def _fetch_http(cfg: LlmClientConfig, prompt: str) -> str:
    api_key = os.environ.get(cfg.api_key_env_var)
    if not api_key:
        raise ValueError(f"environment variable {cfg.api_key_env_var} is not set")
    url = cfg.base_url.rstrip("/") + "/chat/completions"
    try:
        resp = requests.post(
            url,
            json={"model": cfg.model_name, "messages": [{"role": "user", "content": prompt}]},
            headers={"Authorization": f"Bearer {api_key}"},
            timeout=cfg.timeout,
        )
    except (requests.ConnectionError, requests.Timeout) as exc:
        raise TransportError(f"LLM request failed: {exc}") from exc
    if resp.status_code != 200:
        raise ProtocolError(f"LLM endpoint answered HTTP {resp.status_code}")
    try:
        return resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ProtocolError(f"unexpected chat-completion envelope: {exc}") from exc


def extract_facts(response: str, prefixes: PrefixMap | None = None) -> ParseReport:
    """Strip code fences and list markers, then parse line by line.

    Stripped decorations are blanked in place so diagnostic line numbers keep
    pointing into the original response.
    """
    cleaned = []
    for line in response.splitlines():
        if _FENCE_RE.match(line):
            cleaned.append("")
            continue
        cleaned.append(_LIST_MARKER_RE.sub("", line))
    return parse_triples("\n".join(cleaned), prefixes)
