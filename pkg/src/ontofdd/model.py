"""In-memory ontology: entities, axioms, prefixes and the lookups built on them."""
from __future__ import annotations

import datetime
import decimal
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional

RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"
SWRLB = "http://www.w3.org/2003/11/swrlb#"
SQWRL = "http://sqwrl.stanford.edu/ontologies/built-ins/3.4/sqwrl.owl#"
FDD = "urn:fdd#"

RESERVED_PREFIXES = {
    "rdfs": RDFS,
    "xsd": XSD,
    "swrlb": SWRLB,
    "sqwrl": SQWRL,
    "fdd": FDD,
}

RDFS_LABEL = RDFS + "label"
RDFS_COMMENT = RDFS + "comment"
FDD_ACTION = FDD + "action"
FDD_PREPOSITION = FDD + "preposition"
FDD_WEIGHT = FDD + "weight"
FDD_HAS_OWNER = FDD + "hasOwner"

# annotation properties usable without a Declaration
BUILTIN_ANNOTATION_PROPERTIES = frozenset(
    {RDFS_LABEL, RDFS_COMMENT, FDD_ACTION, FDD_PREPOSITION, FDD_WEIGHT, FDD_HAS_OWNER}
)

DATATYPES = ("string", "integer", "decimal", "boolean", "date")

_WS = re.compile(r"\s")


class OntologyError(Exception):
    """Raised when an ontology breaks a structural invariant."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


class UnknownEntityError(OntologyError, KeyError):
    pass


def check_iri(value: str) -> str:
    if not value or _WS.search(value):
        raise OntologyError(f"invalid IRI {value!r}")
    return value


def local_name(iri: str) -> str:
    """Return the part of ``iri`` after the last ``#`` or ``/``."""
    cut = max(iri.rfind("#"), iri.rfind("/"))
    return iri[cut + 1:] if cut >= 0 else iri


def datatype_iri(name: str) -> str:
    return XSD + name


def canonical_lexical(lexical: str, datatype: str) -> str:
    """Canonical lexical form; raises ValueError when ``lexical`` is ill-formed."""
    if datatype == "string":
        return lexical
    if datatype == "integer":
        if not re.fullmatch(r"[+-]?\d+", lexical.strip()):
            raise ValueError(f"{lexical!r} is not an integer")
        return str(int(lexical))
    if datatype == "decimal":
        if not re.fullmatch(r"[+-]?(\d+(\.\d*)?|\.\d+)", lexical.strip()):
            raise ValueError(f"{lexical!r} is not a decimal")
        value = decimal.Decimal(lexical.strip()).normalize()
        text = format(value, "f")
        return "0" if text in ("-0", "+0") else text
    if datatype == "boolean":
        if lexical in ("true", "1"):
            return "true"
        if lexical in ("false", "0"):
            return "false"
        raise ValueError(f"{lexical!r} is not a boolean")
    if datatype == "date":
        try:
            return datetime.date.fromisoformat(lexical).isoformat()
        except ValueError:
            raise ValueError(f"{lexical!r} is not a date (YYYY-MM-DD)") from None
    raise ValueError(f"unsupported datatype {datatype!r}")


@dataclass(frozen=True, order=True)
class Literal:
    """Typed literal, stored in canonical lexical form.

    ``Literal("05", "integer") == Literal("5", "integer")``.
    """

    lexical: str
    datatype: str = "string"

    def __post_init__(self):
        if self.datatype not in DATATYPES:
            raise ValueError(f"unsupported datatype {self.datatype!r}")
        object.__setattr__(self, "lexical", canonical_lexical(self.lexical, self.datatype))

    @property
    def value(self):
        if self.datatype == "integer":
            return int(self.lexical)
        if self.datatype == "decimal":
            return decimal.Decimal(self.lexical)
        if self.datatype == "boolean":
            return self.lexical == "true"
        if self.datatype == "date":
            return datetime.date.fromisoformat(self.lexical)
        return self.lexical

    def __str__(self):
        return self.lexical


class EntityKind(str, Enum):
    CLASS = "Class"
    OBJECT_PROPERTY = "ObjectProperty"
    DATA_PROPERTY = "DataProperty"
    ANNOTATION_PROPERTY = "AnnotationProperty"
    NAMED_INDIVIDUAL = "NamedIndividual"


_PUNNABLE = frozenset({EntityKind.CLASS, EntityKind.NAMED_INDIVIDUAL})


@dataclass(frozen=True, order=True)
class Entity:
    iri: str
    kind: EntityKind


# --- axioms -----------------------------------------------------------------
#
# Every axiom is a frozen dataclass. ``signature()`` lists (role, value) pairs
# used for validation, sorting and serialization.


class Axiom:
    __slots__ = ()

    @property
    def name(self) -> str:
        return type(self).__name__

    def signature(self) -> tuple:
        raise NotImplementedError

    def sort_key(self) -> tuple:
        return (self.name, tuple(_key_part(v) for _, v in self.signature()))


def _key_part(value) -> str:
    if isinstance(value, Literal):
        return f'"{value.lexical}"^^{value.datatype}'
    if isinstance(value, tuple):
        return " ".join(value)
    return value


@dataclass(frozen=True)
class SubClassOf(Axiom):
    sub: str
    sup: str

    def signature(self):
        return (("class", self.sub), ("class", self.sup))


@dataclass(frozen=True)
class ObjectPropertyDomain(Axiom):
    prop: str
    cls: str

    def signature(self):
        return (("object", self.prop), ("class", self.cls))


@dataclass(frozen=True)
class ObjectPropertyRange(Axiom):
    prop: str
    cls: str

    def signature(self):
        return (("object", self.prop), ("class", self.cls))


@dataclass(frozen=True)
class DataPropertyDomain(Axiom):
    prop: str
    cls: str

    def signature(self):
        return (("data", self.prop), ("class", self.cls))


@dataclass(frozen=True)
class DataPropertyRange(Axiom):
    prop: str
    datatype: str

    def signature(self):
        return (("data", self.prop), ("datatype", self.datatype))


@dataclass(frozen=True)
class DisjointClasses(Axiom):
    classes: tuple

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(sorted(set(self.classes))))
        if len(self.classes) < 2:
            raise OntologyError("DisjointClasses needs at least two distinct classes")

    def signature(self):
        return (("classes", self.classes),)


@dataclass(frozen=True)
class FunctionalObjectProperty(Axiom):
    prop: str

    def signature(self):
        return (("object", self.prop),)


@dataclass(frozen=True)
class FunctionalDataProperty(Axiom):
    prop: str

    def signature(self):
        return (("data", self.prop),)


@dataclass(frozen=True)
class ClassAssertion(Axiom):
    cls: str
    individual: str

    def signature(self):
        return (("class", self.cls), ("individual", self.individual))


@dataclass(frozen=True)
class ObjectPropertyAssertion(Axiom):
    prop: str
    subject: str
    object: str

    def signature(self):
        return (("object", self.prop), ("individual", self.subject), ("individual", self.object))


@dataclass(frozen=True)
class DataPropertyAssertion(Axiom):
    prop: str
    subject: str
    value: Literal

    def signature(self):
        return (("data", self.prop), ("individual", self.subject), ("literal", self.value))


@dataclass(frozen=True)
class AnnotationAssertion(Axiom):
    prop: str
    subject: str
    value: Literal

    def signature(self):
        return (("annotation", self.prop), ("entity", self.subject), ("literal", self.value))


AXIOM_TYPES = {
    cls.__name__: cls
    for cls in (
        SubClassOf,
        ObjectPropertyDomain,
        ObjectPropertyRange,
        DataPropertyDomain,
        DataPropertyRange,
        DisjointClasses,
        FunctionalObjectProperty,
        FunctionalDataProperty,
        ClassAssertion,
        ObjectPropertyAssertion,
        DataPropertyAssertion,
        AnnotationAssertion,
    )
}

ABOX_TYPES = (ClassAssertion, ObjectPropertyAssertion, DataPropertyAssertion)

_ROLE_KIND = {
    "class": EntityKind.CLASS,
    "object": EntityKind.OBJECT_PROPERTY,
    "data": EntityKind.DATA_PROPERTY,
    "annotation": EntityKind.ANNOTATION_PROPERTY,
    "individual": EntityKind.NAMED_INDIVIDUAL,
}


# --- prefixes -----------------------------------------------------------------


class PrefixMap:
    """Prefix label -> namespace. The reserved prefixes are always present."""

    def __init__(self, entries: Optional[dict] = None):
        self._user: dict[str, str] = {}
        for label, ns in (entries or {}).items():
            self.add(label, ns)

    def add(self, label: str, namespace: str) -> None:
        check_iri(namespace)
        if label in self._user and self._user[label] != namespace:
            raise OntologyError(f"prefix {label!r} bound twice")
        self._user[label] = namespace

    def get(self, label: str) -> Optional[str]:
        if label in self._user:
            return self._user[label]
        return RESERVED_PREFIXES.get(label)

    def user_entries(self) -> dict:
        return dict(sorted(self._user.items()))

    def resolve(self, prefixed: str) -> str:
        label, _, local = prefixed.partition(":")
        ns = self.get(label)
        if ns is None:
            raise KeyError(f"unknown prefix {label!r}")
        return ns + local

    def abbreviate(self, iri: str) -> Optional[str]:
        """Shortest prefixed form of ``iri`` or None when no prefix applies."""
        best = None
        candidates = dict(RESERVED_PREFIXES)
        candidates.update(self._user)
        for label, ns in sorted(candidates.items()):
            if iri.startswith(ns) and re.fullmatch(r"[A-Za-z_][\w.-]*", iri[len(ns):] or "-"):
                if best is None or len(ns) > len(best[1]):
                    best = (label, ns)
        if best is None:
            return None
        return best[0] + ":" + iri[len(best[1]):]

    def __eq__(self, other):
        return isinstance(other, PrefixMap) and self._user == other._user

    def __repr__(self):
        return f"PrefixMap({self._user!r})"


# --- ontology -----------------------------------------------------------------


@dataclass
class Ontology:
    """Axiom store for one ontology.

    Treated as immutable once :meth:`validate` has passed; derived facts go
    into a copy made with :meth:`extended`.
    """

    iri: str
    prefixes: PrefixMap = field(default_factory=PrefixMap)
    rules: list = field(default_factory=list)

    def __post_init__(self):
        check_iri(self.iri)
        self._kinds: dict[str, set] = {}
        self._axioms: dict[Axiom, None] = {}

    # -- construction

    def declare(self, iri: str, kind: EntityKind) -> None:
        check_iri(iri)
        kinds = self._kinds.setdefault(iri, set())
        kinds.add(EntityKind(kind))
        if len(kinds) > 1 and not kinds <= _PUNNABLE:
            names = ", ".join(sorted(k.value for k in kinds))
            raise OntologyError(f"{iri} declared with incompatible kinds: {names}")

    def add(self, axiom: Axiom) -> bool:
        """Insert ``axiom``; returns False when it was already present."""
        if axiom in self._axioms:
            return False
        self._axioms[axiom] = None
        return True

    def extended(self, axioms: Iterable[Axiom]) -> "Ontology":
        copy = Ontology(self.iri, self.prefixes, list(self.rules))
        copy._kinds = {k: set(v) for k, v in self._kinds.items()}
        copy._axioms = dict(self._axioms)
        for ax in axioms:
            copy.add(ax)
        return copy

    # -- queries

    @property
    def axioms(self) -> list:
        return list(self._axioms)

    @property
    def entities(self) -> set:
        return {Entity(iri, kind) for iri, kinds in self._kinds.items() for kind in kinds}

    def kinds_of(self, iri: str) -> frozenset:
        return frozenset(self._kinds.get(iri, ()))

    def has_kind(self, iri: str, kind: EntityKind) -> bool:
        if kind is EntityKind.ANNOTATION_PROPERTY and iri in BUILTIN_ANNOTATION_PROPERTIES:
            return True
        return kind in self._kinds.get(iri, ())

    def entities_of(self, kind: EntityKind) -> list:
        return sorted(iri for iri, kinds in self._kinds.items() if kind in kinds)

    @property
    def classes(self) -> list:
        return self.entities_of(EntityKind.CLASS)

    @property
    def object_properties(self) -> list:
        return self.entities_of(EntityKind.OBJECT_PROPERTY)

    @property
    def data_properties(self) -> list:
        return self.entities_of(EntityKind.DATA_PROPERTY)

    @property
    def individuals(self) -> list:
        return self.entities_of(EntityKind.NAMED_INDIVIDUAL)

    def axioms_of(self, *types) -> Iterator:
        return (ax for ax in self._axioms if isinstance(ax, types))

    def __contains__(self, axiom) -> bool:
        return axiom in self._axioms

    def __len__(self):
        return len(self._axioms)

    def direct_superclasses(self, cls: str) -> list:
        return sorted(ax.sup for ax in self.axioms_of(SubClassOf) if ax.sub == cls)

    def annotations(self, subject: str, prop: str) -> list:
        return sorted(
            ax.value
            for ax in self.axioms_of(AnnotationAssertion)
            if ax.subject == subject and ax.prop == prop
        )

    def __eq__(self, other):
        if not isinstance(other, Ontology):
            return NotImplemented
        return (
            self.iri == other.iri
            and self.prefixes == other.prefixes
            and self._kinds == other._kinds
            and set(self._axioms) == set(other._axioms)
            and self.rules == other.rules
        )

    __hash__ = None

    # -- validation

    def validate(self, locations: Optional[dict] = None) -> None:
        """Check entity kinds and hierarchy acyclicity.

        ``locations`` maps axioms to (line, column) for diagnostics.
        """
        locations = locations or {}
        for ax in self._axioms:
            line, col = locations.get(ax, (None, None))
            for role, value in ax.signature():
                if role == "datatype":
                    if value not in DATATYPES:
                        raise OntologyError(f"{ax.name}: unsupported datatype {value!r}", line, col)
                    continue
                if role == "literal":
                    continue
                values = value if role == "classes" else (value,)
                for iri in values:
                    self._check_role(ax, role, iri, line, col)
        cycle = self._find_cycle()
        if cycle:
            first = SubClassOf(cycle[0], cycle[1])
            line, col = locations.get(first, (None, None))
            path = " -> ".join(local_name(c) for c in cycle)
            raise OntologyError(f"SubClassOf cycle: {path}", line, col)

    def _check_role(self, ax, role, iri, line, col):
        if role == "entity":
            if not self._kinds.get(iri):
                raise OntologyError(f"{ax.name} names undeclared entity {iri}", line, col)
            return
        kind = EntityKind.CLASS if role == "classes" else _ROLE_KIND[role]
        if self.has_kind(iri, kind):
            return
        if not self._kinds.get(iri):
            raise OntologyError(f"{ax.name} names undeclared entity {iri}", line, col)
        raise OntologyError(f"{ax.name} expects {kind.value} but {iri} is not declared as one", line, col)

    def _find_cycle(self) -> Optional[list]:
        graph: dict[str, list] = {}
        for ax in self.axioms_of(SubClassOf):
            if ax.sub != ax.sup:
                graph.setdefault(ax.sub, []).append(ax.sup)
        state: dict[str, int] = {}
        stack: list = []

        def visit(node):
            state[node] = 1
            stack.append(node)
            for nxt in sorted(graph.get(node, ())):
                if state.get(nxt) == 1:
                    return stack[stack.index(nxt):] + [nxt]
                if nxt not in state:
                    found = visit(nxt)
                    if found:
                        return found
            stack.pop()
            state[node] = 2
            return None

        for node in sorted(graph):
            if node not in state:
                found = visit(node)
                if found:
                    return found
        return None


# --- lookups ------------------------------------------------------------------


def label_of(ontology: Ontology, iri: str) -> str:
    """Display name: least ``rdfs:label`` value, else the local name."""
    labels = ontology.annotations(iri, RDFS_LABEL)
    if labels:
        return min(lit.lexical for lit in labels)
    return local_name(iri)


def subclasses_of(ontology: Ontology, cls: str) -> list:
    """Reflexive-transitive subclasses of ``cls``, sorted."""
    if not ontology.has_kind(cls, EntityKind.CLASS):
        raise UnknownEntityError(f"unknown class {cls}")
    children: dict[str, set] = {}
    for ax in ontology.axioms_of(SubClassOf):
        children.setdefault(ax.sup, set()).add(ax.sub)
    seen = {cls}
    todo = [cls]
    while todo:
        for sub in children.get(todo.pop(), ()):
            if sub not in seen:
                seen.add(sub)
                todo.append(sub)
    return sorted(seen)


def superclasses_of(ontology: Ontology, cls: str) -> list:
    """Reflexive-transitive superclasses of ``cls``, sorted."""
    parents: dict[str, set] = {}
    for ax in ontology.axioms_of(SubClassOf):
        parents.setdefault(ax.sub, set()).add(ax.sup)
    seen = {cls}
    todo = [cls]
    while todo:
        for sup in parents.get(todo.pop(), ()):
            if sup not in seen:
                seen.add(sup)
                todo.append(sup)
    return sorted(seen)


def top_level_classes(ontology: Ontology) -> list:
    subs = {ax.sub for ax in ontology.axioms_of(SubClassOf) if ax.sub != ax.sup}
    return [c for c in ontology.classes if c not in subs]


def assertions_about(ontology: Ontology, individual: str) -> list:
    """ABox axioms whose subject is ``individual``, in insertion order."""
    if not ontology.has_kind(individual, EntityKind.NAMED_INDIVIDUAL):
        raise UnknownEntityError(f"unknown individual {individual}")
    out = []
    for ax in ontology.axioms_of(*ABOX_TYPES):
        subject = ax.individual if isinstance(ax, ClassAssertion) else ax.subject
        if subject == individual:
            out.append(ax)
    return out
