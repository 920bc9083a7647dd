"""fcarepo: tooling for a repository of formal contexts.

Modules:
    context: the formal context model and its derivation operators.
    formats: Burmeister (.cxt), binary CSV and JSON readers/writers.
    index: the contexts.yaml metadata index and repository validation.
    algorithms: NextClosure concept enumeration and the canonical basis.
    lattice: cover relation, layered layout, SVG/DOT diagrams.
    client: HTTP access to a hosted repository with a local cache.
    derivatives: generated statistics, concept lists, bases, diagrams, pages.
    cli: the ``fcarepo`` command.
"""
from .algorithms import (
    FormalConcept,
    Implication,
    canonical_basis,
    close_under_implications,
    enumerate_concepts,
    enumerate_concepts_bruteforce,
    implication_holds,
    next_closure,
)
from .client import RepoClient, RepoConfig, fetch_raw, list_contexts, load_dataset
from .context import (
    ContextStatistics,
    FormalContext,
    attribute_closure,
    attribute_derivation,
    compute_statistics,
    object_derivation,
    subcontext,
)
from .errors import (
    BudgetExceeded,
    ContextError,
    ContextNotFound,
    FcaRepoError,
    HTTPStatusError,
    MetadataError,
    NetworkError,
    OfflineError,
    ParseError,
    RepoError,
)
from .formats import (
    ContextFormat,
    ParseDiagnostic,
    convert,
    parse_burmeister,
    parse_csv,
    parse_json,
    read_context,
    serialize_burmeister,
    serialize_csv,
    serialize_json,
    write_context,
)
from .index import (
    ContextMetadata,
    RepositoryIndex,
    ValidationReport,
    parse_index,
    serialize_index,
    validate_filename,
    validate_repository,
)
from .lattice import (
    ConceptLattice,
    DiagramLayout,
    build_lattice,
    layout_layered,
    reduced_labels,
    render_dot,
    render_svg,
)

__all__ = [
    "FormalConcept",
    "Implication",
    "canonical_basis",
    "close_under_implications",
    "enumerate_concepts",
    "enumerate_concepts_bruteforce",
    "implication_holds",
    "next_closure",
    "RepoClient",
    "RepoConfig",
    "fetch_raw",
    "list_contexts",
    "load_dataset",
    "ContextStatistics",
    "FormalContext",
    "attribute_closure",
    "attribute_derivation",
    "compute_statistics",
    "object_derivation",
    "subcontext",
    "BudgetExceeded",
    "ContextError",
    "ContextNotFound",
    "FcaRepoError",
    "HTTPStatusError",
    "MetadataError",
    "NetworkError",
    "OfflineError",
    "ParseError",
    "RepoError",
    "ContextFormat",
    "ParseDiagnostic",
    "convert",
    "parse_burmeister",
    "parse_csv",
    "parse_json",
    "read_context",
    "serialize_burmeister",
    "serialize_csv",
    "serialize_json",
    "write_context",
    "ContextMetadata",
    "RepositoryIndex",
    "ValidationReport",
    "parse_index",
    "serialize_index",
    "validate_filename",
    "validate_repository",
    "ConceptLattice",
    "DiagramLayout",
    "build_lattice",
    "layout_layered",
    "reduced_labels",
    "render_dot",
    "render_svg",
]

__version__ = "0.1.0"
