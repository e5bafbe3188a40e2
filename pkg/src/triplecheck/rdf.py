"""RDF terms, triples, canonical serialization, and a tolerant line parser.

The parser accepts plain N-Triples statements as well as statements written
with prefixed names (dbr:El_Greco ...), because LLM output routinely mixes
both with prose. Unparseable lines are reported as diagnostics, never raised.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

IRI = "iri"
LITERAL = "literal"
BLANK = "blank"

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_IRI_FORBIDDEN = set('<>"{}|^`\\')
# no trailing '.', which would be ambiguous with the statement terminator
_BLANK_LABEL_RE = re.compile(r"^[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?$")
_PNAME_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_.\-]*):(\S*)$")
_LANG_RE = re.compile(r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$")
# Local names that compact safely: survive the scanner and do not end in '.'
_SAFE_LOCAL_RE = re.compile(r"^[A-Za-z0-9_%][A-Za-z0-9_.%\-]*$")


@dataclass(frozen=True, slots=True)
class Term:
    """An RDF term: IRI, literal (with optional datatype or language), or blank node."""

    kind: str
    value: str
    datatype: str | None = None
    lang: str | None = None

    def __post_init__(self) -> None:
        if self.kind == IRI:
            if (not _SCHEME_RE.match(self.value)
                    or any(c.isspace() or c in _IRI_FORBIDDEN or ord(c) < 0x21 for c in self.value)):
                raise ValueError(f"not an absolute IRI: {self.value!r}")
            if self.datatype is not None or self.lang is not None:
                raise ValueError("IRI terms carry no datatype or language tag")
        elif self.kind == LITERAL:
            if self.datatype is not None and self.lang is not None:
                raise ValueError("literal has both datatype and language tag")
        elif self.kind == BLANK:
            if not _BLANK_LABEL_RE.match(self.value):
                raise ValueError(f"bad blank node label: {self.value!r}")
            if self.datatype is not None or self.lang is not None:
                raise ValueError("blank nodes carry no datatype or language tag")
        else:
            raise ValueError(f"unknown term kind: {self.kind!r}")

    @property
    def is_iri(self) -> bool:
        return self.kind == IRI

    @property
    def is_literal(self) -> bool:
        return self.kind == LITERAL

    @property
    def is_blank(self) -> bool:
        return self.kind == BLANK

    def n3(self) -> str:
        """Canonical N-Triples rendering of this term."""
        if self.kind == IRI:
            return f"<{self.value}>"
        if self.kind == BLANK:
            return f"_:{self.value}"
        quoted = '"%s"' % _escape_literal(self.value)
        if self.datatype is not None:
            return f"{quoted}^^<{self.datatype}>"
        if self.lang is not None:
            return f"{quoted}@{self.lang}"
        return quoted


def iri(value: str) -> Term:
    return Term(IRI, value)


def literal(value: str, datatype: str | None = None, lang: str | None = None) -> Term:
    return Term(LITERAL, value, datatype=datatype, lang=lang)


def blank(label: str) -> Term:
    return Term(BLANK, label)


@dataclass(frozen=True, slots=True)
class Triple:
    """A subject-predicate-object statement. Subjects are IRIs or blanks, predicates IRIs."""

    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self) -> None:
        if self.subject.is_literal:
            raise ValueError("triple subject must not be a literal")
        if not self.predicate.is_iri:
            raise ValueError("triple predicate must be an IRI")

    def canonical(self) -> str:
        """Canonical N-Triples serialization; also the deterministic sort key."""
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


@dataclass(frozen=True)
class PrefixMap:
    """Mapping from prefix labels (dbr, dbo, ...) to absolute IRI namespaces."""

    entries: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label, ns in self.entries.items():
            if not re.match(r"^[A-Za-z][A-Za-z0-9_.\-]*$", label):
                raise ValueError(f"bad prefix label: {label!r}")
            if not _SCHEME_RE.match(ns) or any(c.isspace() for c in ns):
                raise ValueError(f"prefix {label!r} maps to a non-absolute IRI: {ns!r}")

    def expand(self, prefix: str, local: str) -> str | None:
        ns = self.entries.get(prefix)
        if ns is None:
            return None
        return ns + local

    def compact(self, iri_value: str) -> str | None:
        """Return 'pfx:Local' for the longest matching namespace, or None."""
        best: tuple[int, str, str] | None = None
        for label, ns in self.entries.items():
            if iri_value.startswith(ns) and (best is None or len(ns) > best[0]):
                best = (len(ns), label, iri_value[len(ns):])
        if best is None:
            return None
        _, label, local = best
        if local and _SAFE_LOCAL_RE.match(local) and not local.endswith("."):
            return f"{label}:{local}"
        return None


DEFAULT_PREFIXES = PrefixMap({
    "dbr": "http://dbpedia.org/resource/",
    "dbo": "http://dbpedia.org/ontology/",
    "dbp": "http://dbpedia.org/property/",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "foaf": "http://xmlns.com/foaf/0.1/",
    "yago": "http://yago-knowledge.org/resource/",
    "wkd": "http://www.wikidata.org/entity/",
    "wkp": "http://www.wikidata.org/prop/direct/",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
})

OWL_SAME_AS = "http://www.w3.org/2002/07/owl#sameAs"
OWL_EQUIVALENT_PROPERTY = "http://www.w3.org/2002/07/owl#equivalentProperty"
OWL_EQUIVALENT_CLASS = "http://www.w3.org/2002/07/owl#equivalentClass"
RDFS_LABEL = "http://www.w3.org/2000/01/rdf-schema#label"


def load_prefix_file(path: str) -> PrefixMap:
    """Read a prefix map from a `label=namespace` config file ('#' comments allowed)."""
    entries = dict(DEFAULT_PREFIXES.entries)
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad prefix line (expected label=namespace): {line!r}")
            label, ns = line.split("=", 1)
            entries[label.strip()] = ns.strip()
    return PrefixMap(entries)


@dataclass(frozen=True, slots=True)
class Diagnostic:
    line: int
    severity: str  # "skipped" | "warning"
    message: str


@dataclass(frozen=True)
class ParseReport:
    """Parsed triples plus per-line diagnostics; blank_lines counts comment/empty lines."""

    triples: tuple[Triple, ...]
    diagnostics: tuple[Diagnostic, ...]
    blank_lines: int = 0

    @property
    def skipped(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "skipped")

    @property
    def warnings(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.severity == "warning")


_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _escape_literal(s: str) -> str:
    out = []
    for ch in s:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20 or ord(ch) in (0x85, 0x2028, 0x2029):
            # includes every codepoint str.splitlines() treats as a line break
            out.append("\\u%04X" % ord(ch))
        else:
            out.append(ch)
    return "".join(out)


class _LineSyntaxError(Exception):
    pass


class _Scanner:
    """Tokenizes one statement line into terms; raises _LineSyntaxError on bad input."""

    def __init__(self, line: str, prefixes: PrefixMap):
        self.line = line
        self.pos = 0
        self.prefixes = prefixes

    def _skip_ws(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self._skip_ws()
        return self.pos >= len(self.line)

    def next_token(self) -> Term | str:
        """Return the next Term, or '.' for the statement terminator."""
        self._skip_ws()
        ch = self.line[self.pos]
        if ch == "<":
            return self._read_iri()
        if ch == '"':
            return self._read_literal()
        if ch == "_" and self.line[self.pos : self.pos + 2] == "_:":
            return self._read_blank()
        if ch == ".":
            self.pos += 1
            return "."
        return self._read_pname()

    def _read_iri(self) -> Term:
        end = self.line.find(">", self.pos + 1)
        if end < 0:
            raise _LineSyntaxError("unterminated IRI")
        value = self.line[self.pos + 1 : end]
        self.pos = end + 1
        try:
            return iri(value)
        except ValueError as exc:
            raise _LineSyntaxError(str(exc)) from None

    def _read_string_body(self) -> str:
        # self.pos is at the opening quote
        out = []
        i = self.pos + 1
        while i < len(self.line):
            ch = self.line[i]
            if ch == "\\":
                if i + 1 >= len(self.line):
                    raise _LineSyntaxError("dangling escape in literal")
                nxt = self.line[i + 1]
                if nxt == "u" or nxt == "U":
                    width = 4 if nxt == "u" else 8
                    hexs = self.line[i + 2 : i + 2 + width]
                    if len(hexs) != width:
                        raise _LineSyntaxError("bad unicode escape")
                    try:
                        out.append(chr(int(hexs, 16)))
                    except ValueError:
                        raise _LineSyntaxError("bad unicode escape") from None
                    i += 2 + width
                elif nxt in _ESCAPES:
                    out.append(_ESCAPES[nxt])
                    i += 2
                else:
                    # tolerate unknown escapes by keeping the raw character
                    out.append(nxt)
                    i += 2
            elif ch == '"':
                self.pos = i + 1
                return "".join(out)
            else:
                out.append(ch)
                i += 1
        raise _LineSyntaxError("unterminated literal")

    def _read_literal(self) -> Term:
        body = self._read_string_body()
        datatype = None
        lang = None
        if self.line[self.pos : self.pos + 2] == "^^":
            self.pos += 2
            self._skip_ws()
            if self.pos < len(self.line) and self.line[self.pos] == "<":
                datatype = self._read_iri().value
            else:
                word = self._read_word()
                m = _PNAME_RE.match(word)
                expanded = m and self.prefixes.expand(m.group(1), m.group(2))
                if not expanded:
                    raise _LineSyntaxError(f"bad datatype: {word!r}")
                datatype = expanded
        elif self.pos < len(self.line) and self.line[self.pos] == "@":
            self.pos += 1
            tag = self._read_word()
            if not _LANG_RE.match(tag):
                raise _LineSyntaxError(f"bad language tag: {tag!r}")
            lang = tag
        return literal(body, datatype=datatype, lang=lang)

    def _read_blank(self) -> Term:
        self.pos += 2
        label = self._read_word()
        if label.endswith("."):
            label = label[:-1]
            self.pos -= 1
        try:
            return blank(label)
        except ValueError as exc:
            raise _LineSyntaxError(str(exc)) from None

    def _read_word(self) -> str:
        start = self.pos
        while self.pos < len(self.line) and not self.line[self.pos].isspace():
            self.pos += 1
        return self.line[start : self.pos]

    def _read_pname(self) -> Term:
        word = self._read_word()
        # A trailing '.' is the statement terminator, not part of the local name.
        if word.endswith(".") and len(word) > 1:
            word = word[:-1]
            self.pos -= 1
        m = _PNAME_RE.match(word)
        if not m:
            raise _LineSyntaxError(f"not a term: {word!r}")
        prefix, local = m.group(1), m.group(2)
        expanded = self.prefixes.expand(prefix, local)
        if expanded is None:
            raise _LineSyntaxError(f"unknown prefix: {prefix!r}")
        try:
            return iri(expanded)
        except ValueError as exc:
            raise _LineSyntaxError(str(exc)) from None


def _parse_line(line: str, prefixes: PrefixMap) -> Triple:
    scanner = _Scanner(line, prefixes)
    terms: list[Term] = []
    terminated = False
    while not scanner.at_end():
        if terminated:
            raise _LineSyntaxError("content after statement terminator")
        tok = scanner.next_token()
        if tok == ".":
            if len(terms) != 3:
                raise _LineSyntaxError("misplaced '.'")
            terminated = True
        elif isinstance(tok, Term):
            if len(terms) == 3:
                raise _LineSyntaxError("more than three terms")
            terms.append(tok)
    if len(terms) != 3:
        raise _LineSyntaxError(f"expected 3 terms, found {len(terms)}")
    s, p, o = terms
    if s.is_literal:
        raise _LineSyntaxError("literal subject")
    if not p.is_iri:
        raise _LineSyntaxError("predicate must be an IRI")
    return Triple(s, p, o)


def parse_triples(text: str, prefixes: PrefixMap | None = None) -> ParseReport:
    """Parse statements line by line; salvage what parses, report the rest.

    Every line ends up as exactly one of: a triple, a blank/comment line, or a
    "skipped" diagnostic. Lines with blank-node subjects additionally get a
    "warning" diagnostic because downstream validation needs an IRI anchor.
    """
    if prefixes is None:
        prefixes = DEFAULT_PREFIXES
    triples: list[Triple] = []
    diagnostics: list[Diagnostic] = []
    blanks = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            blanks += 1
            continue
        try:
            t = _parse_line(line, prefixes)
        except _LineSyntaxError as exc:
            diagnostics.append(Diagnostic(lineno, "skipped", str(exc)))
            continue
        triples.append(t)
        if t.subject.is_blank:
            diagnostics.append(Diagnostic(lineno, "warning", "blank-node subject; validation will reject this fact"))
    return ParseReport(tuple(triples), tuple(diagnostics), blanks)


def serialize_triple(t: Triple, prefixes: PrefixMap | None = None) -> str:
    """Serialize one triple; canonical N-Triples without prefixes, compacted with."""
    if prefixes is None:
        return t.canonical()
    parts = []
    for term in (t.subject, t.predicate, t.object):
        if term.is_iri:
            parts.append(prefixes.compact(term.value) or term.n3())
        else:
            parts.append(term.n3())
    return " ".join(parts) + " ."


def parse_fact(text: str, prefixes: PrefixMap | None = None) -> Triple:
    """Parse exactly one statement or raise ValueError (for CLI/benchmark input)."""
    report = parse_triples(text, prefixes)
    if len(report.triples) != 1:
        detail = "; ".join(d.message for d in report.skipped) or "no statement found"
        raise ValueError(f"expected exactly one triple, got {len(report.triples)} ({detail})")
    return report.triples[0]
