"""DL-safe forward chaining and ``sqwrl:select`` query evaluation.

Facts are the ABox assertions of an :class:`~ontofdd.model.Ontology`.
:func:`fixpoint` runs semi-naive evaluation; :func:`naive_fixpoint` is the
restart-from-scratch evaluator kept as its oracle.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .model import (
    ClassAssertion,
    DataPropertyAssertion,
    Literal,
    ObjectPropertyAssertion,
    Ontology,
    local_name,
)

BUILTIN_OPS = (
    "equal",
    "notEqual",
    "lessThan",
    "lessThanOrEqual",
    "greaterThan",
    "greaterThanOrEqual",
)


class RuleError(Exception):
    pass


class DLSafetyError(RuleError):
    def __init__(self, message, variable=None, line=None):
        self.variable = variable
        self.line = line
        super().__init__(message)


class BuiltinTypeError(RuleError):
    def __init__(self, message, binding=None):
        self.binding = binding
        super().__init__(message)


# --- terms and atoms ----------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return "?" + self.name


@dataclass(frozen=True)
class IndividualRef:
    iri: str

    def __str__(self):
        return local_name(self.iri)


@dataclass(frozen=True)
class LiteralTerm:
    lit: Literal

    def __str__(self):
        if self.lit.datatype == "string":
            return json.dumps(self.lit.lexical)
        return f'"{self.lit.lexical}"^^xsd:{self.lit.datatype}'


Term = Union[Variable, IndividualRef, LiteralTerm]


@dataclass(frozen=True)
class ClassAtom:
    cls: str
    arg: Term

    @property
    def terms(self):
        return (self.arg,)

    def __str__(self):
        return f"{local_name(self.cls)}({self.arg})"


@dataclass(frozen=True)
class ObjectPropertyAtom:
    prop: str
    subject: Term
    object: Term

    @property
    def terms(self):
        return (self.subject, self.object)

    def __str__(self):
        return f"{local_name(self.prop)}({self.subject}, {self.object})"


@dataclass(frozen=True)
class DataPropertyAtom:
    prop: str
    subject: Term
    value: Term

    @property
    def terms(self):
        return (self.subject, self.value)

    def __str__(self):
        return f"{local_name(self.prop)}({self.subject}, {self.value})"


@dataclass(frozen=True)
class BuiltinAtom:
    op: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in BUILTIN_OPS:
            raise RuleError(f"unsupported builtin swrlb:{self.op}")

    @property
    def terms(self):
        return (self.left, self.right)

    def __str__(self):
        return f"swrlb:{self.op}({self.left}, {self.right})"


Atom = Union[ClassAtom, ObjectPropertyAtom, DataPropertyAtom, BuiltinAtom]


def atom_variables(atoms: Iterable) -> list:
    seen: dict[str, None] = {}
    for atom in atoms:
        for t in atom.terms:
            if isinstance(t, Variable):
                seen.setdefault(t.name)
    return list(seen)


def _bound_variables(body) -> set:
    return set(atom_variables(a for a in body if not isinstance(a, BuiltinAtom)))


@dataclass(frozen=True)
class Rule:
    name: str
    body: tuple
    head: tuple

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "head", tuple(self.head))
        if not self.body:
            raise RuleError(f"rule {self.name} has an empty body")
        if not self.head:
            raise RuleError(f"rule {self.name} has an empty head")
        if any(isinstance(a, BuiltinAtom) for a in self.head):
            raise RuleError(f"rule {self.name}: builtins are not allowed in the head")
        bound = _bound_variables(self.body)
        for var in atom_variables(self.head) + atom_variables(self.body):
            if var not in bound:
                raise DLSafetyError(
                    f"rule {self.name}: variable ?{var} does not occur in a body class or property atom",
                    variable=var,
                )

    def __str__(self):
        body = " ^ ".join(map(str, self.body))
        head = " ^ ".join(map(str, self.head))
        return f"{body} -> {head}"


@dataclass(frozen=True)
class Query:
    body: tuple
    projection: tuple

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "projection", tuple(self.projection))
        if not self.body:
            raise RuleError("query has an empty body")
        bound = _bound_variables(self.body)
        for var in atom_variables(self.body) + list(self.projection):
            if var not in bound:
                raise DLSafetyError(f"query variable ?{var} is not bound by the body", variable=var)


# --- fact store ---------------------------------------------------------------


class FactStore:
    """Indexed view of class/property assertions."""

    def __init__(self, axioms: Iterable = ()):
        self.classes: dict[str, set] = {}
        self.objects: dict[str, set] = {}
        self.data: dict[str, set] = {}
        for ax in axioms:
            self.add(ax)

    def add(self, ax) -> bool:
        if isinstance(ax, ClassAssertion):
            bucket, item = self.classes.setdefault(ax.cls, set()), ax.individual
        elif isinstance(ax, ObjectPropertyAssertion):
            bucket, item = self.objects.setdefault(ax.prop, set()), (ax.subject, ax.object)
        elif isinstance(ax, DataPropertyAssertion):
            bucket, item = self.data.setdefault(ax.prop, set()), (ax.subject, ax.value)
        else:
            return False
        if item in bucket:
            return False
        bucket.add(item)
        return True

    def __contains__(self, ax) -> bool:
        if isinstance(ax, ClassAssertion):
            return ax.individual in self.classes.get(ax.cls, ())
        if isinstance(ax, ObjectPropertyAssertion):
            return (ax.subject, ax.object) in self.objects.get(ax.prop, ())
        if isinstance(ax, DataPropertyAssertion):
            return (ax.subject, ax.value) in self.data.get(ax.prop, ())
        return False

    def tuples(self, atom) -> Iterable:
        if isinstance(atom, ClassAtom):
            return ((i,) for i in self.classes.get(atom.cls, ()))
        if isinstance(atom, ObjectPropertyAtom):
            return self.objects.get(atom.prop, ())
        return self.data.get(atom.prop, ())

    @classmethod
    def from_ontology(cls, ontology: Ontology) -> "FactStore":
        return cls(ontology.axioms)


def _value_of(term, binding):
    if isinstance(term, Variable):
        return binding.get(term.name)
    if isinstance(term, IndividualRef):
        return term.iri
    return term.lit


def _match(atom, row, binding) -> Optional[dict]:
    out = binding
    for term, value in zip(atom.terms, row):
        if isinstance(term, Variable):
            have = out.get(term.name)
            if have is None:
                if out is binding:
                    out = dict(binding)
                out[term.name] = value
            elif have != value:
                return None
        elif _value_of(term, out) != value:
            return None
    return out


_NUMERIC = ("integer", "decimal")


def _compare(op, a, b, binding):
    if op in ("equal", "notEqual"):
        same = a == b
        if isinstance(a, Literal) and isinstance(b, Literal):
            if a.datatype in _NUMERIC and b.datatype in _NUMERIC:
                same = a.value == b.value
        return same if op == "equal" else not same
    if not (isinstance(a, Literal) and isinstance(b, Literal)):
        raise BuiltinTypeError(f"swrlb:{op} needs literal arguments", binding)
    if a.datatype in _NUMERIC and b.datatype in _NUMERIC:
        x, y = a.value, b.value
    elif a.datatype == b.datatype and a.datatype in ("string", "date"):
        x, y = a.value, b.value
    else:
        raise BuiltinTypeError(
            f"swrlb:{op} cannot order {a.datatype} against {b.datatype}", binding
        )
    if op == "lessThan":
        return x < y
    if op == "lessThanOrEqual":
        return x <= y
    if op == "greaterThan":
        return x > y
    return x >= y


def eval_builtin(atom: BuiltinAtom, binding: dict) -> bool:
    a = _value_of(atom.left, binding)
    b = _value_of(atom.right, binding)
    return _compare(atom.op, a, b, binding)


def _schedule(body) -> list:
    """Join order: left to right, each builtin placed right after its variables are bound."""
    plan = []
    pending = []
    bound: set = set()
    for atom in body:
        if isinstance(atom, BuiltinAtom):
            pending.append(atom)
        else:
            plan.append(atom)
            bound.update(t.name for t in atom.terms if isinstance(t, Variable))
        ready = [b for b in pending if _vars(b) <= bound]
        for b in ready:
            pending.remove(b)
            plan.append(b)
    return plan + pending


def _vars(atom) -> set:
    return {t.name for t in atom.terms if isinstance(t, Variable)}


def _join(plan, sources, binding=None):
    """Yield bindings; ``sources[i]`` supplies the tuples for plan step i."""
    bindings = [binding or {}]
    for step, atom in enumerate(plan):
        if isinstance(atom, BuiltinAtom):
            bindings = [b for b in bindings if eval_builtin(atom, b)]
            continue
        rows = sources[step]
        nxt = []
        for b in bindings:
            for row in rows:
                m = _match(atom, row, b)
                if m is not None:
                    nxt.append(m)
        bindings = nxt
        if not bindings:
            break
    return bindings


def _check_predicates(ontology: Optional[Ontology], atoms) -> None:
    if ontology is None:
        return
    from .model import EntityKind

    expected = {
        ClassAtom: EntityKind.CLASS,
        ObjectPropertyAtom: EntityKind.OBJECT_PROPERTY,
        DataPropertyAtom: EntityKind.DATA_PROPERTY,
    }
    for atom in atoms:
        kind = expected.get(type(atom))
        if kind is None:
            continue
        iri = atom.cls if isinstance(atom, ClassAtom) else atom.prop
        if not ontology.has_kind(iri, kind):
            raise RuleError(f"unknown predicate {iri} (expected {kind.value})")


def evaluate_body(ontology, atoms) -> list:
    """All bindings satisfying ``atoms``, as a sorted list of dicts.

    ``ontology`` may be an :class:`Ontology` or a prepared :class:`FactStore`.
    """
    if isinstance(ontology, FactStore):
        store = ontology
    else:
        _check_predicates(ontology, atoms)
        store = FactStore.from_ontology(ontology)
    plan = _schedule(atoms)
    sources = [None if isinstance(a, BuiltinAtom) else list(store.tuples(a)) for a in plan]
    found = {_freeze(b) for b in _join(plan, sources)}
    return [dict(b) for b in sorted(found, key=_binding_key)]


def _freeze(binding: dict) -> tuple:
    return tuple(sorted(binding.items()))


def _binding_key(frozen) -> tuple:
    return tuple((k, _sort_value(v)) for k, v in frozen)


def _sort_value(v):
    if isinstance(v, Literal):
        return (1, v.datatype, v.lexical)
    return (0, "", v)


def _instantiate(atom, binding, rule_name):
    values = [_value_of(t, binding) for t in atom.terms]
    if isinstance(atom, ClassAtom):
        ind = values[0]
        if isinstance(ind, Literal):
            raise RuleError(f"rule {rule_name}: class atom {atom} bound to a literal")
        return ClassAssertion(atom.cls, ind)
    if isinstance(atom, ObjectPropertyAtom):
        if any(isinstance(v, Literal) for v in values):
            raise RuleError(f"rule {rule_name}: object property atom {atom} bound to a literal")
        return ObjectPropertyAssertion(atom.prop, values[0], values[1])
    if isinstance(values[0], Literal) or not isinstance(values[1], Literal):
        raise RuleError(f"rule {rule_name}: data property atom {atom} has ill-typed arguments")
    return DataPropertyAssertion(atom.prop, values[0], values[1])


@dataclass(frozen=True)
class Provenance:
    """Which rule derived an axiom, and under which binding."""

    rule: str
    binding: tuple

    def __str__(self):
        parts = ", ".join(f"?{k}={_display(v)}" for k, v in self.binding)
        return f"{self.rule} [{parts}]"


def _display(v) -> str:
    return v.lexical if isinstance(v, Literal) else local_name(v)


@dataclass
class Derivation:
    """Result of forward chaining: derived axioms with their provenance."""

    provenance: dict = field(default_factory=dict)

    @property
    def axioms(self) -> list:
        return sorted(self.provenance, key=lambda ax: ax.sort_key())

    def log_lines(self, render=str) -> list:
        return [f"{render(ax)} <- {self.provenance[ax]}" for ax in self.axioms]


def forward_chain(ontology: Ontology, rules) -> Derivation:
    """Semi-naive forward chaining to fixpoint.

    Each round evaluates every rule against the same frozen snapshot, with at
    least one body atom drawn from the previous round's new facts.
    """
    rules = list(rules)
    for rule in rules:
        _check_predicates(ontology, rule.body + rule.head)
    store = FactStore.from_ontology(ontology)
    result = Derivation()
    plans = [(_schedule(r.body), r) for r in rules]

    # round 0: plain evaluation; afterwards only joins touching the delta.
    delta = None
    while True:
        candidates: dict = {}
        for plan, rule in plans:
            for binding in _rule_bindings(plan, store, delta):
                frozen = _freeze(binding)
                for atom in rule.head:
                    ax = _instantiate(atom, binding, rule.name)
                    if ax in store:
                        continue
                    prov = Provenance(rule.name, frozen)
                    old = candidates.get(ax)
                    if old is None or (prov.rule, _binding_key(prov.binding)) < (
                        old.rule,
                        _binding_key(old.binding),
                    ):
                        candidates[ax] = prov
        if not candidates:
            return result
        delta = FactStore()
        for ax in sorted(candidates, key=lambda a: a.sort_key()):
            store.add(ax)
            delta.add(ax)
            result.provenance[ax] = candidates[ax]


def _rule_bindings(plan, store, delta):
    if delta is None:
        sources = [None if isinstance(a, BuiltinAtom) else list(store.tuples(a)) for a in plan]
        return _join(plan, sources)
    out = []
    positions = [i for i, a in enumerate(plan) if not isinstance(a, BuiltinAtom)]
    for k in positions:
        delta_rows = list(delta.tuples(plan[k]))
        if not delta_rows:
            continue
        sources = []
        for i, atom in enumerate(plan):
            if isinstance(atom, BuiltinAtom):
                sources.append(None)
            elif i == k:
                sources.append(delta_rows)
            elif i < k:
                # facts known before the last round: excludes delta so each
                # binding is produced by the first delta position it uses
                fresh = set(delta.tuples(atom))
                sources.append([r for r in store.tuples(atom) if r not in fresh])
            else:
                sources.append(list(store.tuples(atom)))
        out.extend(_join(plan, sources))
    return out


def fixpoint(ontology: Ontology, rules) -> list:
    """Derived assertions (sorted) from iterating ``rules`` to fixpoint."""
    return forward_chain(ontology, rules).axioms


def naive_fixpoint(ontology: Ontology, rules) -> list:
    """Restart-from-scratch evaluation: every round re-matches every rule
    against all facts with a plain backtracking matcher. Used as an oracle."""
    facts = set(ontology.axioms_of(ClassAssertion, ObjectPropertyAssertion, DataPropertyAssertion))
    base = set(facts)
    while True:
        new = set()
        for rule in rules:
            for binding in _naive_matches(list(rule.body), facts, {}):
                for atom in rule.head:
                    ax = _instantiate(atom, binding, rule.name)
                    if ax not in facts:
                        new.add(ax)
        if not new:
            return sorted(facts - base, key=lambda a: a.sort_key())
        facts |= new


def _naive_matches(atoms, facts, binding):
    if not atoms:
        yield binding
        return
    # builtins wait until their variables are bound
    for idx, atom in enumerate(atoms):
        if not isinstance(atom, BuiltinAtom):
            break
        if all(t.name in binding for t in atom.terms if isinstance(t, Variable)):
            if eval_builtin(atom, binding):
                yield from _naive_matches(atoms[:idx] + atoms[idx + 1:], facts, binding)
            return
    else:
        for atom in atoms:
            if not eval_builtin(atom, binding):
                return
        yield binding
        return
    first = next(i for i, a in enumerate(atoms) if not isinstance(a, BuiltinAtom))
    atom = atoms[first]
    rest = atoms[:first] + atoms[first + 1:]
    for fact in facts:
        if isinstance(atom, ClassAtom) and isinstance(fact, ClassAssertion) and fact.cls == atom.cls:
            row = (fact.individual,)
        elif isinstance(atom, ObjectPropertyAtom) and isinstance(fact, ObjectPropertyAssertion) and fact.prop == atom.prop:
            row = (fact.subject, fact.object)
        elif isinstance(atom, DataPropertyAtom) and isinstance(fact, DataPropertyAssertion) and fact.prop == atom.prop:
            row = (fact.subject, fact.value)
        else:
            continue
        extended = dict(binding)
        ok = True
        for term, value in zip(atom.terms, row):
            if isinstance(term, Variable):
                if term.name in extended and extended[term.name] != value:
                    ok = False
                    break
                extended[term.name] = value
            elif isinstance(term, IndividualRef):
                if term.iri != value:
                    ok = False
                    break
            elif term.lit != value:
                ok = False
                break
        if ok:
            yield from _naive_matches(rest, facts, extended)


# --- queries ------------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    display: str
    value: object


@dataclass
class ResultTable:
    columns: tuple
    rows: list

    def display_rows(self) -> list:
        return [tuple(c.display for c in row) for row in self.rows]

    def to_tsv(self) -> str:
        lines = ["\t".join("?" + c for c in self.columns)]
        lines += ["\t".join(r) for r in self.display_rows()]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.display_rows()]}


def run_query(ontology: Ontology, query: Query) -> ResultTable:
    bindings = evaluate_body(ontology, list(query.body))
    seen = set()
    rows = []
    for b in bindings:
        values = tuple(b[v] for v in query.projection)
        if values in seen:
            continue
        seen.add(values)
        rows.append(tuple(Cell(_display(v), v) for v in values))
    rows.sort(key=lambda r: (tuple(c.display for c in r), tuple(_sort_value(c.value) for c in r)))
    return ResultTable(tuple(query.projection), rows)
