"""Remote knowledge-graph backends: SPARQL endpoints and fact services.

Both speak the same backend contract as the local store. Remote stores are
assumed to have equivalence closure precomputed on their side, so "equivalent"
remotely means exact-IRI matching.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass

import requests

from .errors import ProtocolError, TransportError
from .rdf import Term, Triple, iri, literal
from .store import ProvenancedTriple

log = logging.getLogger(__name__)

SPARQL = "sparql"
FACT_SERVICE = "fact-service"


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    kind: str = SPARQL
    name: str = ""
    timeout: float = 30.0
    max_retries: int = 2
    rate_limit: float = 4.0  # max requests per second
    candidate_cap: int = 5000

    def __post_init__(self) -> None:
        if self.kind not in (SPARQL, FACT_SERVICE):
            raise ValueError(f"unknown endpoint kind: {self.kind!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.rate_limit <= 0:
            raise ValueError("rate-limit must be positive")

    @property
    def source_name(self) -> str:
        return self.name or self.base_url


def load_endpoint_file(path: str) -> list[EndpointConfig]:
    """Endpoint config file: `name, kind, url[, timeout[, rate]]` per line."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) < 3:
                raise ValueError(f"{path}:{lineno}: expected `name, kind, url[, timeout[, rate]]`")
            cfg = EndpointConfig(
                base_url=parts[2],
                kind=parts[1],
                name=parts[0],
                timeout=float(parts[3]) if len(parts) > 3 else 30.0,
                rate_limit=float(parts[4]) if len(parts) > 4 else 4.0,
            )
            out.append(cfg)
    return out


class _RateLimiter:
    """Spaces requests so that at most `per_second` leave in any one second."""

    def __init__(self, per_second: float):
        self._interval = 1.0 / per_second
        self._lock = threading.Lock()
        self._earliest = 0.0

    def acquire(self) -> None:
        with self._lock:
            now = time.monotonic()
            wait = self._earliest - now
            self._earliest = max(now, self._earliest) + self._interval
        if wait > 0:
            time.sleep(wait)


def _sparql_term(t: Term) -> str:
    # Literal datatype/language are dropped: rule-level equality compares
    # lexical forms only, matching the local store's policy.
    if t.is_literal:
        return Term("literal", t.value).n3()
    return t.n3()


def _term_from_binding(b: dict) -> Term:
    kind = b.get("type")
    value = b.get("value")
    if not isinstance(value, str):
        raise ProtocolError(f"binding without a value: {b!r}")
    if kind == "uri":
        return iri(value)
    if kind in ("literal", "typed-literal"):
        return literal(value, datatype=b.get("datatype"), lang=b.get("xml:lang"))
    if kind == "bnode":
        return Term("blank", value)
    raise ProtocolError(f"unknown binding type: {b!r}")


class _HttpClient:
    """Shared GET plumbing: rate limiting, retries on transport errors, JSON parsing."""

    def __init__(self, cfg: EndpointConfig):
        self.cfg = cfg
        self._session = requests.Session()
        self._limiter = _RateLimiter(cfg.rate_limit)

    def get_json(self, url: str, params: dict, headers: dict) -> dict | list:
        last_exc: Exception | None = None
        for attempt in range(self.cfg.max_retries + 1):
            self._limiter.acquire()
            try:
                resp = self._session.get(url, params=params, headers=headers, timeout=self.cfg.timeout)
            except (requests.ConnectionError, requests.Timeout) as exc:
                last_exc = TransportError(f"request to {url} failed: {exc}")
            else:
                if resp.status_code >= 500:
                    last_exc = TransportError(f"{url} answered HTTP {resp.status_code}")
                elif resp.status_code != 200:
                    raise ProtocolError(f"{url} answered HTTP {resp.status_code}")
                else:
                    try:
                        return resp.json()
                    except ValueError as exc:
                        raise ProtocolError(f"{url} returned malformed JSON: {exc}") from exc
            if attempt < self.cfg.max_retries:
                log.warning("retrying %s after transport error (attempt %d/%d): %s",
                            url, attempt + 1, self.cfg.max_retries, last_exc)
        assert last_exc is not None
        raise last_exc

    def close(self) -> None:
        self._session.close()


class SparqlBackend:
    """SPARQL 1.1 protocol client implementing the candidate-retrieval contract."""

    def __init__(self, cfg: EndpointConfig):
        if cfg.kind != SPARQL:
            raise ValueError("SparqlBackend needs a sparql endpoint config")
        self.cfg = cfg
        self.name = cfg.source_name
        self._http = _HttpClient(cfg)

    def _query(self, query: str) -> dict:
        log.debug("sparql query to %s: %s", self.cfg.base_url, query)
        body = self._http.get_json(
            self.cfg.base_url,
            params={"query": query},
            headers={"Accept": "application/sparql-results+json"},
        )
        if not isinstance(body, dict):
            raise ProtocolError(f"SPARQL endpoint returned a non-object body: {body!r}")
        return body

    def _ask(self, query: str) -> bool:
        body = self._query(query)
        answer = body.get("boolean")
        if not isinstance(answer, bool):
            raise ProtocolError(f"ASK response without a boolean: {body!r}")
        return answer

    def _select(self, query: str) -> list[dict]:
        body = self._query(query)
        try:
            bindings = body["results"]["bindings"]
        except (KeyError, TypeError):
            raise ProtocolError(f"SELECT response without results.bindings: {body!r}") from None
        if not isinstance(bindings, list):
            raise ProtocolError("results.bindings is not a list")
        return bindings

    def ask_equivalent(self, t: Triple) -> bool:
        """Rule A remotely: does the triple exist verbatim?"""
        q = "ASK { %s %s %s }" % (_sparql_term(t.subject), _sparql_term(t.predicate), _sparql_term(t.object))
        return self._ask(q)

    def select_sp(self, e: Term, p: Term) -> list[ProvenancedTriple]:
        q = "SELECT ?o WHERE { %s %s ?o }" % (_sparql_term(e), _sparql_term(p))
        rows = self._select(q)
        found = {ProvenancedTriple(Triple(e, p, _term_from_binding(r["o"])), self.name)
                 for r in rows if "o" in r}
        return sorted(found, key=ProvenancedTriple.sort_key)

    def select_so(self, e: Term, o: Term) -> list[ProvenancedTriple]:
        q = "SELECT ?p WHERE { %s ?p %s }" % (_sparql_term(e), _sparql_term(o))
        rows = self._select(q)
        found = set()
        for r in rows:
            if "p" not in r:
                continue
            p = _term_from_binding(r["p"])
            if p.is_iri:
                found.add(ProvenancedTriple(Triple(e, p, o), self.name))
        return sorted(found, key=ProvenancedTriple.sort_key)

    def select_all(self, e: Term) -> tuple[list[ProvenancedTriple], bool]:
        """Rule C remotely: the entity's triples in both positions, capped."""
        found = set()
        for r in self._select("SELECT ?p ?o WHERE { %s ?p ?o }" % _sparql_term(e)):
            if "p" in r and "o" in r:
                p = _term_from_binding(r["p"])
                if p.is_iri:
                    found.add(ProvenancedTriple(Triple(e, p, _term_from_binding(r["o"])), self.name))
        for r in self._select("SELECT ?s ?p WHERE { ?s ?p %s }" % _sparql_term(e)):
            if "s" in r and "p" in r:
                s = _term_from_binding(r["s"])
                p = _term_from_binding(r["p"])
                if not s.is_literal and p.is_iri:
                    found.add(ProvenancedTriple(Triple(s, p, e), self.name))
        ordered = sorted(found, key=ProvenancedTriple.sort_key)
        if len(ordered) > self.cfg.candidate_cap:
            return ordered[: self.cfg.candidate_cap], True
        return ordered, False

    def check_dereferencable(self, uri: str) -> bool:
        """True if the endpoint holds at least one triple mentioning the URI."""
        u = iri(uri).n3()
        q = "ASK { { %s ?p ?o } UNION { ?s %s ?o } UNION { ?s ?p %s } }" % (u, u, u)
        return self._ask(q)

    # backend contract -----------------------------------------------------

    def find_equivalent(self, t: Triple) -> ProvenancedTriple | None:
        if self.ask_equivalent(t):
            return ProvenancedTriple(t, self.name)
        return None

    def sp_so_candidates(self, e: Term, p: Term, o: Term) -> list[ProvenancedTriple]:
        found = {pt for pt in self.select_sp(e, p)}
        found.update(self.select_so(e, o))
        return sorted(found, key=ProvenancedTriple.sort_key)

    def all_triples_of(self, e: Term) -> tuple[list[ProvenancedTriple], bool]:
        return self.select_all(e)

    def label_for(self, term: Term) -> str | None:
        return None

    def close(self) -> None:
        self._http.close()


class FactServiceBackend:
    """Client for an allFacts-style REST service.

    The service exposes a single entity-wide lookup, so rules A and B are
    answered by exact matching over the fetched fact set (the service is
    presumed to have applied its own closure before answering).
    """

    def __init__(self, cfg: EndpointConfig):
        if cfg.kind != FACT_SERVICE:
            raise ValueError("FactServiceBackend needs a fact-service endpoint config")
        self.cfg = cfg
        self.name = cfg.source_name
        self._http = _HttpClient(cfg)

    def select_all(self, e: Term) -> tuple[list[ProvenancedTriple], bool]:
        url = self.cfg.base_url.rstrip("/") + "/allFacts"
        log.debug("fact-service request: %s?uri=%s", url, e.value)
        body = self._http.get_json(url, params={"uri": e.value}, headers={"Accept": "application/json"})
        if not isinstance(body, list):
            raise ProtocolError(f"allFacts returned a non-array body: {type(body).__name__}")
        found = set()
        for i, rec in enumerate(body):
            if not isinstance(rec, dict):
                raise ProtocolError(f"allFacts record {i} is not an object")
            try:
                s = rec["s"]
                p = rec["p"]
                o = rec["o"]
                source = rec["source"]
            except KeyError as exc:
                raise ProtocolError(f"allFacts record {i} is missing {exc}") from None
            o_kind = rec.get("o_kind") or ("iri" if _looks_like_iri(o) else "literal")
            obj = iri(o) if o_kind == "iri" else literal(o)
            found.add(ProvenancedTriple(Triple(iri(s), iri(p), obj), str(source)))
        ordered = sorted(found, key=ProvenancedTriple.sort_key)
        if len(ordered) > self.cfg.candidate_cap:
            return ordered[: self.cfg.candidate_cap], True
        return ordered, False

    # backend contract -----------------------------------------------------

    def find_equivalent(self, t: Triple) -> ProvenancedTriple | None:
        facts, _ = self.select_all(t.subject)
        hits = [pt for pt in facts if _exact_triple_match(pt.triple, t)]
        return hits[0] if hits else None

    def sp_so_candidates(self, e: Term, p: Term, o: Term) -> list[ProvenancedTriple]:
        facts, _ = self.select_all(e)
        out = [
            pt for pt in facts
            if pt.triple.subject == e
            and (pt.triple.predicate == p or _object_match(pt.triple.object, o))
        ]
        return sorted(out, key=ProvenancedTriple.sort_key)

    def all_triples_of(self, e: Term) -> tuple[list[ProvenancedTriple], bool]:
        return self.select_all(e)

    def label_for(self, term: Term) -> str | None:
        return None

    def close(self) -> None:
        self._http.close()


def _looks_like_iri(s: str) -> bool:
    return bool(s) and not any(c.isspace() for c in s) and ":" in s and s[0].isalpha()


def _object_match(a: Term, b: Term) -> bool:
    if a.is_literal and b.is_literal:
        return a.value == b.value
    return a == b


def _exact_triple_match(a: Triple, b: Triple) -> bool:
    return a.subject == b.subject and a.predicate == b.predicate and _object_match(a.object, b.object)


def open_backend(cfg: EndpointConfig):
    if cfg.kind == SPARQL:
        return SparqlBackend(cfg)
    return FactServiceBackend(cfg)
