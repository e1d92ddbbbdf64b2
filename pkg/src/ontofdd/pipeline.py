"""Glue for running the stages in order on one ontology."""
from __future__ import annotations

from dataclasses import dataclass, field

from .model import Ontology
from .parser import render_axiom
from .reasoner import TypingMode, check_consistency, materialize_typing
from .rules import forward_chain


@dataclass
class Materialized:
    source: Ontology
    ontology: Ontology
    typing: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def derived(self) -> list:
        return sorted(set(self.typing) | set(self.provenance), key=lambda a: a.sort_key())

    def log_lines(self) -> list:
        """One line per derived axiom: ``axiom <- rule [binding]`` or ``<- typing``."""
        p = self.ontology.prefixes
        lines = []
        for ax in self.derived:
            why = self.provenance.get(ax)
            lines.append(f"{render_axiom(ax, p)} <- {why if why else 'typing'}")
        return lines


def materialize(ontology: Ontology, rules=(), mode=TypingMode.INFER) -> Materialized:
    """Alternate typing materialization and rule fixpoint until nothing new appears."""
    mode = TypingMode(mode)
    current = ontology
    result = Materialized(ontology, ontology)
    while True:
        typed = materialize_typing(current, mode)
        result.typing.extend(typed)
        current = current.extended(typed)
        chained = forward_chain(current, rules)
        if not chained.provenance:
            break
        result.provenance.update(chained.provenance)
        current = current.extended(chained.axioms)
    result.ontology = current
    return result


def validate(ontology: Ontology, rules=(), mode=TypingMode.INFER):
    """Materialize, then check; returns ``(Materialized, violations)``."""
    mat = materialize(ontology, rules, mode)
    return mat, check_consistency(ontology, mat.derived, mode)
