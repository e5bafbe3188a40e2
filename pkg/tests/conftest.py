"""Shared fixtures: random data generators, hypothesis strategies, stub servers."""

from __future__ import annotations

import json
import random
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

import pytest
from hypothesis import strategies as st

from triplecheck.rdf import Term, Triple, blank, iri, literal
from triplecheck.store import ProvenancedTriple

EX = "http://example.org/"
NAMESPACES = [
    "http://dbpedia.org/resource/",
    "http://dbpedia.org/ontology/",
    "http://yago-knowledge.org/resource/",
    "http://www.wikidata.org/entity/",
    EX,
]
SOURCES = ["alpha", "beta", "gamma"]
WORDS = ["sun", "wine", "olive", "sea", "stone", "ship", "agora", "myth"]


# ------------------------------------------------------- random generators


def rand_iri(rng: random.Random, pool: int = 24) -> Term:
    return iri(rng.choice(NAMESPACES) + f"Node_{rng.randrange(pool)}")


def rand_predicate(rng: random.Random, pool: int = 10) -> Term:
    return iri(rng.choice(NAMESPACES[:2]) + f"rel{rng.randrange(pool)}")


def rand_literal(rng: random.Random) -> Term:
    kind = rng.randrange(4)
    if kind == 0:
        return literal(f"{rng.randrange(1500, 2024)}-0{rng.randrange(1, 9)}-1{rng.randrange(9)}")
    if kind == 1:
        return literal(" ".join(rng.sample(WORDS, 3)))
    if kind == 2:
        return literal(str(rng.randrange(10000)), datatype="http://www.w3.org/2001/XMLSchema#integer")
    return literal(rng.choice(WORDS), lang=rng.choice(["en", "el"]))


def rand_object(rng: random.Random, pool: int = 24) -> Term:
    r = rng.random()
    if r < 0.5:
        return rand_iri(rng, pool)
    if r < 0.9:
        return rand_literal(rng)
    return blank(f"b{rng.randrange(6)}")


def rand_triple(rng: random.Random, pool: int = 24) -> Triple:
    return Triple(rand_iri(rng, pool), rand_predicate(rng), rand_object(rng, pool))


def rand_kg(rng: random.Random, size: int, pool: int = 24, links: int = 6
            ) -> list[ProvenancedTriple]:
    """A random provenanced KG with a few equivalence links over the same pools."""
    out = [ProvenancedTriple(rand_triple(rng, pool), rng.choice(SOURCES)) for _ in range(size)]
    link_preds = [
        "http://www.w3.org/2002/07/owl#sameAs",
        "http://www.w3.org/2002/07/owl#equivalentProperty",
        "http://www.w3.org/2002/07/owl#equivalentClass",
    ]
    for _ in range(links):
        p = rng.choice(link_preds)
        if p.endswith("equivalentProperty"):
            a, b = rand_predicate(rng), rand_predicate(rng)
        else:
            a, b = rand_iri(rng, pool), rand_iri(rng, pool)
        if a != b:
            out.append(ProvenancedTriple(Triple(a, iri(p), b), rng.choice(SOURCES)))
    return out


# ---------------------------------------------------- hypothesis strategies

_local_st = st.text(alphabet="abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_%-",
                    min_size=1, max_size=12)
iri_st = st.builds(lambda ns, local: iri(ns + local), st.sampled_from(NAMESPACES), _local_st)
_literal_text_st = st.text(max_size=40)
literal_st = st.one_of(
    st.builds(literal, _literal_text_st),
    st.builds(lambda v: literal(v, datatype="http://www.w3.org/2001/XMLSchema#date"), _literal_text_st),
    st.builds(lambda v: literal(v, lang="en"), _literal_text_st),
)
blank_st = st.builds(blank, st.from_regex(r"[A-Za-z0-9_][A-Za-z0-9_-]{0,8}", fullmatch=True))
subject_st = st.one_of(iri_st, blank_st)
object_st = st.one_of(iri_st, literal_st, blank_st)
triple_st = st.builds(Triple, subject_st, iri_st, object_st)


# ------------------------------------------------------------ stub servers


class StubServer:
    """Threaded HTTP server handing every request to one callable.

    handler(path, params, method, body) -> (status, content_type, body_bytes)
    """

    def __init__(self, handler):
        self.requests: list[tuple[str, dict]] = []
        self.request_times: list[float] = []
        outer = self

        class _Handler(BaseHTTPRequestHandler):
            def _serve(self, method: str):
                import time as _time
                parsed = urlparse(self.path)
                params = {k: v[0] for k, v in parse_qs(parsed.query).items()}
                length = int(self.headers.get("Content-Length") or 0)
                body = self.rfile.read(length) if length else b""
                outer.requests.append((parsed.path, params))
                outer.request_times.append(_time.monotonic())
                status, ctype, payload = handler(parsed.path, params, method, body)
                self.send_response(status)
                self.send_header("Content-Type", ctype)
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def do_GET(self):
                self._serve("GET")

            def do_POST(self):
                self._serve("POST")

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    @property
    def url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()


def _tokenize_pattern(pattern: str) -> list[str]:
    """Split a triple pattern into term/variable tokens, honoring quoted literals."""
    tokens = []
    i = 0
    while i < len(pattern):
        ch = pattern[i]
        if ch.isspace():
            i += 1
        elif ch == "<":
            j = pattern.index(">", i)
            tokens.append(pattern[i : j + 1])
            i = j + 1
        elif ch == '"':
            j = i + 1
            while pattern[j] != '"' or pattern[j - 1] == "\\":
                j += 1
            tokens.append(pattern[i : j + 1])
            i = j + 1
        elif ch == "?":
            j = i
            while j < len(pattern) and not pattern[j].isspace():
                j += 1
            tokens.append(pattern[i:j])
            i = j
        elif ch in "{}":
            i += 1
        else:
            j = i
            while j < len(pattern) and not pattern[j].isspace():
                j += 1
            tokens.append(pattern[i:j])
            i = j
    return tokens


def _term_token(t: Term) -> str:
    if t.is_literal:
        return Term("literal", t.value).n3()  # lexical form only, like the client sends
    return t.n3()


def _binding_json(t: Term) -> dict:
    if t.is_iri:
        return {"type": "uri", "value": t.value}
    if t.is_blank:
        return {"type": "bnode", "value": t.value}
    out = {"type": "literal", "value": t.value}
    if t.datatype:
        out["datatype"] = t.datatype
    if t.lang:
        out["xml:lang"] = t.lang
    return out


_DEREF_RE = re.compile(
    r"^ASK \{ \{ (<[^>]*>) \?p \?o \} UNION \{ \?s \1 \?o \} UNION \{ \?s \?p \1 \} \}$")


def sparql_stub_logic(triples: list[ProvenancedTriple]):
    """Interpret the exact query shapes the client emits against a seeded triple list."""

    def mentions(u: str) -> bool:
        for pt in triples:
            t = pt.triple
            if ((t.subject.is_iri and t.subject.value == u)
                    or t.predicate.value == u
                    or (t.object.is_iri and t.object.value == u)):
                return True
        return False

    def handler(path, params, method, body):
        query = params.get("query", "")
        m = _DEREF_RE.match(query)
        if m:
            payload = {"head": {}, "boolean": mentions(m.group(1)[1:-1])}
            return 200, "application/sparql-results+json", json.dumps(payload).encode()
        if query.startswith("ASK"):
            tokens = _tokenize_pattern(query[len("ASK") :])
            assert len(tokens) == 3, tokens
            found = any(
                [_term_token(pt.triple.subject), _term_token(pt.triple.predicate),
                 _term_token(pt.triple.object)] == tokens
                for pt in triples)
            payload = {"head": {}, "boolean": found}
            return 200, "application/sparql-results+json", json.dumps(payload).encode()
        m = re.match(r"^SELECT ((?:\?\w+ )+)WHERE (.+)$", query)
        assert m, query
        variables = m.group(1).split()
        tokens = _tokenize_pattern(m.group(2))
        assert len(tokens) == 3, tokens
        bindings = []
        for pt in triples:
            terms = (pt.triple.subject, pt.triple.predicate, pt.triple.object)
            row = {}
            for token, term in zip(tokens, terms):
                if token.startswith("?"):
                    row[token[1:]] = _binding_json(term)
                elif _term_token(term) != token:
                    break
            else:
                bindings.append({v[1:]: row[v[1:]] for v in variables if v[1:] in row})
        payload = {"head": {"vars": [v[1:] for v in variables]},
                   "results": {"bindings": bindings}}
        return 200, "application/sparql-results+json", json.dumps(payload).encode()

    return handler


def fact_service_stub_logic(triples: list[ProvenancedTriple]):
    def handler(path, params, method, body):
        assert path.endswith("/allFacts"), path
        uri = params.get("uri", "")
        records = []
        for pt in triples:
            t = pt.triple
            if (t.subject.is_iri and t.subject.value == uri) or \
                    (t.object.is_iri and t.object.value == uri):
                if t.subject.is_blank or t.object.is_blank:
                    continue
                records.append({
                    "s": t.subject.value,
                    "p": t.predicate.value,
                    "o": t.object.value,
                    "o_kind": "iri" if t.object.is_iri else "literal",
                    "source": pt.source,
                })
        records.sort(key=lambda r: (r["s"], r["p"], r["o"], r["source"]))
        return 200, "application/json", json.dumps(records).encode()

    return handler


@pytest.fixture
def stub_server():
    servers = []

    def start(handler) -> StubServer:
        server = StubServer(handler)
        servers.append(server)
        return server

    yield start
    for server in servers:
        server.close()


# ------------------------------------------------- acceptance summary lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for status in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            if status != "skipped" and getattr(rep, "when", "call") != "call":
                continue
            rows.append((nodeid.split("::")[-1], "PASS" if status == "passed" else status.upper()))
    if rows:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in sorted(set(rows)):
            terminalreporter.write_line(f"{status}: {name}")
