"""Turn triples into short sentences for the sentence encoder.

IRIs lose their namespaces and special characters; camelCase local names are
split into words; opaque identifiers (Q868, P569) are swapped for labels when
a label source is available. Literals pass through as their lexical form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from urllib.parse import unquote

from .rdf import Term, Triple
from .store import KnowledgeGraph

# Wikidata-style opaque local names: at most two letters, then digits only.
DEFAULT_OPAQUE_ID_RE = re.compile(r"^[A-Za-z]{0,2}[0-9]+$")

_CAMEL_RE = re.compile(r"(?<=[a-z])(?=[A-Z])")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class VerbalizedTriple:
    original: Triple
    sentence: str
    substitutions: tuple[tuple[str, str], ...] = ()


def _local_name(iri_value: str) -> str:
    cut = max(iri_value.rfind("/"), iri_value.rfind("#"))
    return iri_value[cut + 1 :] if cut >= 0 else iri_value


def convert_term(
    term: Term,
    label_source: KnowledgeGraph | None = None,
    opaque_id_re: re.Pattern[str] = DEFAULT_OPAQUE_ID_RE,
) -> str:
    """Render one term as plain words."""
    if term.is_literal:
        return term.value
    if term.is_blank:
        return term.value
    local = unquote(_local_name(term.value))
    if opaque_id_re.match(local):
        if label_source is not None:
            label = label_source.label_for(term)
            if label is not None:
                return label
        return local
    words = local.replace("_", " ")
    words = _CAMEL_RE.sub(" ", words)
    return _WS_RE.sub(" ", words).strip()


def convert_triple(
    t: Triple,
    label_source: KnowledgeGraph | None = None,
    opaque_id_re: re.Pattern[str] = DEFAULT_OPAQUE_ID_RE,
) -> VerbalizedTriple:
    """Space-join the three rendered terms into one sentence."""
    substitutions: list[tuple[str, str]] = []
    parts = []
    for term in (t.subject, t.predicate, t.object):
        rendered = convert_term(term, label_source, opaque_id_re)
        if term.is_iri and label_source is not None:
            local = unquote(_local_name(term.value))
            if opaque_id_re.match(local) and rendered != local:
                substitutions.append((term.n3(), rendered))
        parts.append(rendered)
    sentence = _WS_RE.sub(" ", " ".join(parts)).strip()
    return VerbalizedTriple(t, sentence, tuple(substitutions))
