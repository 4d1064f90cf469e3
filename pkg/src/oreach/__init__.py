"""Safety verification for artifact systems over RDFS+ ontologies."""

from .breach import Breach, UnsafeTrace, Verdict, breach, make_trace
from .cover import CoverResult, eliminate, eliminate_qff
from .errors import (
    InconclusiveError,
    MissingSymbolError,
    OReachError,
    ParseError,
    ResourceLimitError,
    TraceVerificationError,
    ValidationError,
)
from .grounding import entails, sat_qff
from .ontology import Ontology, UniversalTheory, standard_translate, undefined_value_closure, validate
from .parsing import parse_formula, parse_onto, parse_sas, print_onto, print_sas
from .sas import ArtifactSystem, build_unsafe_formula, eliminate_case_functions, preimage

__version__ = "0.1.0"

__all__ = [
    "ArtifactSystem",
    "Breach",
    "CoverResult",
    "InconclusiveError",
    "MissingSymbolError",
    "OReachError",
    "Ontology",
    "ParseError",
    "ResourceLimitError",
    "TraceVerificationError",
    "UniversalTheory",
    "UnsafeTrace",
    "ValidationError",
    "Verdict",
    "breach",
    "build_unsafe_formula",
    "eliminate",
    "eliminate_case_functions",
    "eliminate_qff",
    "entails",
    "make_trace",
    "parse_formula",
    "parse_onto",
    "parse_sas",
    "preimage",
    "print_onto",
    "print_sas",
    "sat_qff",
    "standard_translate",
    "undefined_value_closure",
    "validate",
]
