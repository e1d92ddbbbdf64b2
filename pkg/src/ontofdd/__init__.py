"""Ontology-driven Feature Driven Development pipeline."""
from .codegen import CodeModel, build_code_model, render_stubs
from .features import (
    Feature,
    FeatureSet,
    MajorFeatureSet,
    feature_from_property,
    generate_feature_list,
    long_form_sentence,
)
from .model import (
    Literal,
    Ontology,
    OntologyError,
    assertions_about,
    label_of,
    local_name,
    subclasses_of,
)
from .parser import (
    ParseError,
    SourceDocument,
    parse_ontology,
    parse_ontology_text,
    parse_query,
    parse_rules,
    serialize_ontology,
)
from .pipeline import materialize
from .planner import PlanConfig, build_plan, feature_owner, resolve_owners
from .reasoner import TypingMode, check_consistency, materialize_typing
from .rules import evaluate_body, fixpoint, naive_fixpoint, run_query

__version__ = "0.1.0"

__all__ = [
    "CodeModel", "build_code_model", "render_stubs",
    "Feature", "FeatureSet", "MajorFeatureSet", "feature_from_property", "generate_feature_list",
    "long_form_sentence",
    "Literal", "Ontology", "OntologyError", "assertions_about", "label_of", "local_name", "subclasses_of",
    "ParseError", "SourceDocument", "parse_ontology", "parse_ontology_text", "parse_query", "parse_rules",
    "serialize_ontology",
    "materialize",
    "PlanConfig", "build_plan", "feature_owner", "resolve_owners",
    "TypingMode", "check_consistency", "materialize_typing",
    "evaluate_body", "fixpoint", "naive_fixpoint", "run_query",
]
