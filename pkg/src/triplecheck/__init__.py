"""triplecheck: validate LLM-produced RDF facts against RDF knowledge graphs.

Pipeline: parse facts, retrieve candidate triples by three rules (equivalent
triple; same subject-predicate or subject-object; all triples of the entity),
verbalize, embed, rank by cosine similarity, return the top-K with provenance.
"""

from .bench import BenchmarkRecord, benchmark_stats, classify, evaluate, load_benchmark
from .encoders import FallbackEncoder, SidecarEncoder, cosine, open_encoder
from .rdf import (
    DEFAULT_PREFIXES,
    ParseReport,
    PrefixMap,
    Term,
    Triple,
    blank,
    iri,
    literal,
    parse_fact,
    parse_triples,
    serialize_triple,
)
from .remote import EndpointConfig, FactServiceBackend, SparqlBackend, open_backend
from .store import KnowledgeGraph, ProvenancedTriple, build, load, load_manifest
from .validator import (
    CandidateSet,
    FactFailure,
    RankedMatch,
    ValidationResult,
    find_candidates,
    rank,
    validate,
    validate_batch,
)
from .verbalize import VerbalizedTriple, convert_term, convert_triple

__version__ = "0.1.0"
