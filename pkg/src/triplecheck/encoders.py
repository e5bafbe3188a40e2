"""Sentence encoders and cosine similarity.

Two backends share one contract (texts in, unit-norm fixed-dimension vectors
out): a deterministic hashed-trigram encoder that needs no model download,
and a client for the sidecar service speaking line-delimited JSON.
"""

from __future__ import annotations

import functools
import hashlib
import json
import socket
import threading

import numpy as np

from .errors import ProtocolError, TransportError

DEFAULT_DIMENSION = 384

_HASH_KEY = b"triplecheck-trigram-v1"


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """dot(u,v) / (|u||v|), clamped into [-1, 1] against rounding."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine of a zero vector is undefined")
    return float(np.clip(float(np.dot(u, v)) / (nu * nv), -1.0, 1.0))


@functools.lru_cache(maxsize=65536)
def _bucket(gram: str, dimension: int) -> int:
    digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8, key=_HASH_KEY).digest()
    return int.from_bytes(digest, "big") % dimension


def _char_trigrams(text: str) -> list[str]:
    s = text.lower()
    if len(s) < 3:
        return [s]
    return [s[i : i + 3] for i in range(len(s) - 2)]


def _check_texts(texts: list[str]) -> None:
    if not texts:
        raise ValueError("encode() needs at least one text")
    for i, t in enumerate(texts):
        if not t or not t.strip():
            raise ValueError(f"text {i} is empty")


class FallbackEncoder:
    """Counts hashed character trigrams of the lowercased text, L2-normalized.

    Fully deterministic across runs and platforms (keyed 64-bit blake2b, no
    process salt), so the whole test suite runs without any model.
    """

    backend = "fallback"

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self.model_name = f"hashed-trigram-{dimension}"

    def encode(self, texts: list[str]) -> list[np.ndarray]:
        _check_texts(texts)
        out = []
        for text in texts:
            vec = np.zeros(self.dimension, dtype=np.float64)
            for gram in _char_trigrams(text):
                vec[_bucket(gram, self.dimension)] += 1.0
            out.append(vec / np.linalg.norm(vec))
        return out

    def buckets(self, text: str) -> set[int]:
        """The nonzero buckets a text hashes into (handy for disjointness checks)."""
        return {_bucket(g, self.dimension) for g in _char_trigrams(text)}

    def close(self) -> None:
        pass


class SidecarEncoder:
    """Client for the encoder sidecar: newline-delimited JSON over a socket.

    One request in flight per connection; concurrent encode() calls serialize
    on an internal lock.
    """

    backend = "sidecar"

    def __init__(self, address: str, timeout: float = 30.0):
        self.address = address
        self.timeout = timeout
        self._lock = threading.Lock()
        self._next_id = 0
        self._sock: socket.socket | None = None
        self._reader = None
        self._connect()

    def _connect(self) -> None:
        try:
            if self.address.startswith("unix:"):
                sock = socket.socket(socket.AF_UNIX, socket.SOCK_STREAM)
                sock.settimeout(self.timeout)
                sock.connect(self.address[len("unix:"):])
            else:
                host, _, port = self.address.rpartition(":")
                sock = socket.create_connection((host, int(port)), timeout=self.timeout)
        except OSError as exc:
            raise TransportError(
                f"cannot reach encoder sidecar at {self.address}: {exc}; "
                "use --encoder fallback to run without it"
            ) from exc
        self._sock = sock
        self._reader = sock.makefile("r", encoding="utf-8", newline="\n")
        hello = self._roundtrip({"op": "hello"})
        dim = hello.get("dim")
        model = hello.get("model")
        if not isinstance(dim, int) or dim < 1 or not isinstance(model, str):
            raise ProtocolError(f"bad sidecar handshake: {hello!r}")
        self.dimension = dim
        self.model_name = model

    def _roundtrip(self, payload: dict) -> dict:
        assert self._sock is not None and self._reader is not None
        try:
            self._sock.sendall((json.dumps(payload) + "\n").encode("utf-8"))
            line = self._reader.readline()
        except OSError as exc:
            raise TransportError(f"sidecar connection failed: {exc}; use --encoder fallback") from exc
        if not line:
            raise TransportError("sidecar closed the connection; use --encoder fallback")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"sidecar sent malformed JSON: {line!r}") from exc
        if not isinstance(reply, dict):
            raise ProtocolError(f"sidecar sent a non-object reply: {reply!r}")
        return reply

    def encode(self, texts: list[str]) -> list[np.ndarray]:
        _check_texts(texts)
        with self._lock:
            self._next_id += 1
            request_id = self._next_id
            reply = self._roundtrip({"id": request_id, "texts": list(texts)})
        if reply.get("error"):
            raise ProtocolError(f"sidecar error: {reply['error']}")
        if reply.get("id") != request_id:
            raise ProtocolError(f"sidecar answered id {reply.get('id')!r} to request {request_id}")
        vectors = reply.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProtocolError("sidecar returned the wrong number of vectors")
        out = []
        for vec in vectors:
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dimension,) or not np.all(np.isfinite(arr)):
                raise ProtocolError("sidecar returned a malformed vector")
            out.append(arr)
        return out

    def close(self) -> None:
        if self._reader is not None:
            self._reader.close()
        if self._sock is not None:
            self._sock.close()
        self._sock = None
        self._reader = None


def open_encoder(spec: str = "fallback", dimension: int = DEFAULT_DIMENSION):
    """'fallback' or a sidecar address like '127.0.0.1:9377' / 'unix:/tmp/enc.sock'."""
    if spec == "fallback":
        return FallbackEncoder(dimension)
    return SidecarEncoder(spec)
