"""Structural typing inference and consistency checks.

Subsumption is the asserted SubClassOf closure; there is no tableau.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .model import (
    ClassAssertion,
    DataPropertyAssertion,
    DataPropertyDomain,
    DataPropertyRange,
    DisjointClasses,
    FunctionalDataProperty,
    FunctionalObjectProperty,
    ObjectPropertyAssertion,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    Ontology,
    SubClassOf,
    local_name,
)


class TypingMode(str, Enum):
    INFER = "infer"
    STRICT = "strict"


DISJOINT_MEMBERSHIP = "DISJOINT_MEMBERSHIP"
FUNCTIONAL_OBJECT_CARDINALITY = "FUNCTIONAL_OBJECT_CARDINALITY"
FUNCTIONAL_DATA_CARDINALITY = "FUNCTIONAL_DATA_CARDINALITY"
RANGE_DATATYPE_MISMATCH = "RANGE_DATATYPE_MISMATCH"
STRICT_DOMAIN_VIOLATION = "STRICT_DOMAIN_VIOLATION"
STRICT_RANGE_VIOLATION = "STRICT_RANGE_VIOLATION"


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    detail: str
    provenance: tuple

    def to_dict(self, render=str) -> dict:
        return {
            "code": self.code,
            "subject": self.subject,
            "detail": self.detail,
            "provenance": [render(ax) for ax in self.provenance],
        }

    def to_line(self, render=str) -> str:
        because = "; ".join(render(ax) for ax in self.provenance)
        return f"{self.code} {local_name(self.subject)}: {self.detail} [{because}]"


def _superclass_map(ontology: Ontology) -> dict:
    """class -> set of reflexive-transitive superclasses."""
    parents: dict[str, set] = {}
    for ax in ontology.axioms_of(SubClassOf):
        parents.setdefault(ax.sub, set()).add(ax.sup)
    closure: dict[str, set] = {}

    def up(cls):
        if cls in closure:
            return closure[cls]
        seen = {cls}
        todo = [cls]
        while todo:
            for sup in parents.get(todo.pop(), ()):
                if sup not in seen:
                    seen.add(sup)
                    todo.append(sup)
        closure[cls] = seen
        return seen

    for cls in ontology.classes:
        up(cls)
    return closure


def materialize_typing(ontology: Ontology, mode=TypingMode.INFER) -> list:
    """ClassAssertions implied by domain/range and SubClassOf, sorted.

    Strict mode derives nothing.
    """
    if TypingMode(mode) is TypingMode.STRICT:
        return []
    supers = _superclass_map(ontology)
    obj_domain: dict[str, set] = {}
    obj_range: dict[str, set] = {}
    data_domain: dict[str, set] = {}
    for ax in ontology.axioms_of(ObjectPropertyDomain):
        obj_domain.setdefault(ax.prop, set()).add(ax.cls)
    for ax in ontology.axioms_of(ObjectPropertyRange):
        obj_range.setdefault(ax.prop, set()).add(ax.cls)
    for ax in ontology.axioms_of(DataPropertyDomain):
        data_domain.setdefault(ax.prop, set()).add(ax.cls)

    typed = set()
    for ax in ontology.axioms_of(ClassAssertion):
        typed.add((ax.cls, ax.individual))
    for ax in ontology.axioms_of(ObjectPropertyAssertion):
        typed.update((c, ax.subject) for c in obj_domain.get(ax.prop, ()))
        typed.update((c, ax.object) for c in obj_range.get(ax.prop, ()))
    for ax in ontology.axioms_of(DataPropertyAssertion):
        typed.update((c, ax.subject) for c in data_domain.get(ax.prop, ()))

    closed = set()
    for cls, ind in typed:
        closed.update((sup, ind) for sup in supers.get(cls, {cls}))
    derived = [ClassAssertion(c, i) for c, i in closed if ClassAssertion(c, i) not in ontology]
    return sorted(derived, key=lambda a: a.sort_key())


def _types(ontology: Ontology, abox: Iterable, supers: dict) -> dict:
    """individual -> {class: [ClassAssertions supporting membership]}"""
    out: dict[str, dict] = {}
    for ax in abox:
        if isinstance(ax, ClassAssertion):
            for sup in supers.get(ax.cls, {ax.cls}):
                out.setdefault(ax.individual, {}).setdefault(sup, []).append(ax)
    return out


def check_consistency(ontology: Ontology, derived: Iterable = (), mode=TypingMode.INFER) -> list:
    """All violations over asserted plus ``derived`` facts, sorted by (code, subject)."""
    mode = TypingMode(mode)
    abox = list(ontology.axioms_of(ClassAssertion, ObjectPropertyAssertion, DataPropertyAssertion))
    known = set(abox)
    for ax in derived:
        if ax not in known:
            known.add(ax)
            abox.append(ax)
    supers = _superclass_map(ontology)
    types = _types(ontology, abox, supers)
    found: list[Violation] = []

    for dis in ontology.axioms_of(DisjointClasses):
        for ind, memberships in types.items():
            hit = [c for c in dis.classes if c in memberships]
            for i, a in enumerate(hit):
                for b in hit[i + 1:]:
                    support = sorted(set(memberships[a]) | set(memberships[b]), key=lambda x: x.sort_key())
                    found.append(
                        Violation(
                            DISJOINT_MEMBERSHIP,
                            ind,
                            f"{local_name(ind)} is a member of disjoint classes "
                            f"{local_name(a)} and {local_name(b)}",
                            (dis, *support),
                        )
                    )

    functional_obj = {ax.prop: ax for ax in ontology.axioms_of(FunctionalObjectProperty)}
    functional_data = {ax.prop: ax for ax in ontology.axioms_of(FunctionalDataProperty)}
    values: dict[tuple, list] = {}
    for ax in abox:
        if isinstance(ax, ObjectPropertyAssertion) and ax.prop in functional_obj:
            values.setdefault((ax.prop, ax.subject), []).append(ax)
        elif isinstance(ax, DataPropertyAssertion) and ax.prop in functional_data:
            values.setdefault((ax.prop, ax.subject), []).append(ax)
    for (prop, subject), axs in values.items():
        if len(axs) < 2:
            continue
        axs = sorted(axs, key=lambda x: x.sort_key())
        if isinstance(axs[0], ObjectPropertyAssertion):
            code, decl = FUNCTIONAL_OBJECT_CARDINALITY, functional_obj[prop]
            shown = ", ".join(local_name(a.object) for a in axs)
        else:
            code, decl = FUNCTIONAL_DATA_CARDINALITY, functional_data[prop]
            shown = ", ".join(a.value.lexical for a in axs)
        found.append(
            Violation(
                code,
                subject,
                f"functional property {local_name(prop)} has {len(axs)} values for "
                f"{local_name(subject)}: {shown}",
                (decl, *axs),
            )
        )

    ranges: dict[str, list] = {}
    for ax in ontology.axioms_of(DataPropertyRange):
        ranges.setdefault(ax.prop, []).append(ax)
    for ax in abox:
        if not isinstance(ax, DataPropertyAssertion):
            continue
        for rng in ranges.get(ax.prop, ()):
            if ax.value.datatype != rng.datatype:
                found.append(
                    Violation(
                        RANGE_DATATYPE_MISMATCH,
                        ax.subject,
                        f"{local_name(ax.prop)} value {ax.value.lexical!r} is {ax.value.datatype}, "
                        f"declared range is {rng.datatype}",
                        (rng, ax),
                    )
                )

    if mode is TypingMode.STRICT:
        found.extend(_strict_violations(ontology, abox, types))

    found.sort(key=lambda v: (v.code, v.subject, v.detail, tuple(a.sort_key() for a in v.provenance)))
    return found


def _strict_violations(ontology: Ontology, abox: list, types: dict) -> list:
    out = []
    checks = [
        (ObjectPropertyDomain, ObjectPropertyAssertion, "subject", STRICT_DOMAIN_VIOLATION, "domain"),
        (ObjectPropertyRange, ObjectPropertyAssertion, "object", STRICT_RANGE_VIOLATION, "range"),
        (DataPropertyDomain, DataPropertyAssertion, "subject", STRICT_DOMAIN_VIOLATION, "domain"),
    ]
    for decl_type, assertion_type, role, code, word in checks:
        decls: dict[str, list] = {}
        for ax in ontology.axioms_of(decl_type):
            decls.setdefault(ax.prop, []).append(ax)
        for ax in abox:
            if not isinstance(ax, assertion_type):
                continue
            ind = getattr(ax, role)
            for decl in decls.get(ax.prop, ()):
                if decl.cls not in types.get(ind, {}):
                    out.append(
                        Violation(
                            code,
                            ind,
                            f"{local_name(ind)} is used as {word} of {local_name(ax.prop)} "
                            f"but is not asserted to be a {local_name(decl.cls)}",
                            (decl, ax),
                        )
                    )
    return out
