"""Random small ontologies and DL-safe rule sets for oracle comparisons."""
import random

from ontofdd.model import (
    ClassAssertion,
    DataPropertyAssertion,
    EntityKind,
    Literal,
    ObjectPropertyAssertion,
    Ontology,
)
from ontofdd.rules import (
    BuiltinAtom,
    ClassAtom,
    DataPropertyAtom,
    IndividualRef,
    LiteralTerm,
    ObjectPropertyAtom,
    Rule,
    Variable,
)

NS = "http://example.org/rand#"
IND_VARS = ("x", "y", "z")
DATA_VARS = ("a", "b")


def random_case(rng: random.Random):
    n_ind = rng.randint(1, 30)
    n_cls = rng.randint(1, 6)
    n_obj = rng.randint(0, 4)
    n_data = rng.randint(0, 4 - n_obj)
    o = Ontology("http://example.org/rand")
    inds = [f"{NS}i{k}" for k in range(n_ind)]
    classes = [f"{NS}C{k}" for k in range(n_cls)]
    objs = [f"{NS}p{k}" for k in range(n_obj)]
    datas = [f"{NS}d{k}" for k in range(n_data)]
    for iri in inds:
        o.declare(iri, EntityKind.NAMED_INDIVIDUAL)
    for iri in classes:
        o.declare(iri, EntityKind.CLASS)
    for iri in objs:
        o.declare(iri, EntityKind.OBJECT_PROPERTY)
    for iri in datas:
        o.declare(iri, EntityKind.DATA_PROPERTY)
    lits = [Literal(str(v), "integer") for v in range(4)]
    for _ in range(rng.randint(0, 3 * n_ind)):
        kind = rng.random()
        if kind < 0.5 or not (objs or datas):
            o.add(ClassAssertion(rng.choice(classes), rng.choice(inds)))
        elif objs and (kind < 0.8 or not datas):
            o.add(ObjectPropertyAssertion(rng.choice(objs), rng.choice(inds), rng.choice(inds)))
        else:
            o.add(DataPropertyAssertion(rng.choice(datas), rng.choice(inds), rng.choice(lits)))
    ruleset = [
        _random_rule(rng, f"r{k}", classes, objs, datas, inds, lits) for k in range(rng.randint(0, 5))
    ]
    return o, ruleset


def _ind_term(rng, inds):
    if rng.random() < 0.1:
        return IndividualRef(rng.choice(inds))
    return Variable(rng.choice(IND_VARS))


def _random_atom(rng, classes, objs, datas, inds, lits):
    choice = rng.random()
    if choice < 0.45 or not (objs or datas):
        return ClassAtom(rng.choice(classes), _ind_term(rng, inds))
    if objs and (choice < 0.8 or not datas):
        return ObjectPropertyAtom(rng.choice(objs), _ind_term(rng, inds), _ind_term(rng, inds))
    value = Variable(rng.choice(DATA_VARS)) if rng.random() < 0.8 else LiteralTerm(rng.choice(lits))
    return DataPropertyAtom(rng.choice(datas), _ind_term(rng, inds), value)


def _vars(atom):
    return {t.name for t in atom.terms if isinstance(t, Variable)}


def _random_rule(rng, name, classes, objs, datas, inds, lits):
    body = [_random_atom(rng, classes, objs, datas, inds, lits) for _ in range(rng.randint(1, 3))]
    bound = set().union(*(_vars(a) for a in body))
    data_bound = sorted(bound & set(DATA_VARS))
    if data_bound and rng.random() < 0.4:
        op = rng.choice(["equal", "notEqual", "lessThan", "lessThanOrEqual", "greaterThan", "greaterThanOrEqual"])
        body.insert(rng.randint(0, len(body)), BuiltinAtom(op, Variable(rng.choice(data_bound)), LiteralTerm(rng.choice(lits))))
    ind_bound = sorted(bound & set(IND_VARS))
    head = []
    for _ in range(rng.randint(1, 2)):
        head.append(_random_head(rng, ind_bound, data_bound, classes, objs, datas, inds, lits))
    return Rule(name, body, head)


def _random_head(rng, ind_bound, data_bound, classes, objs, datas, inds, lits):
    def ind():
        if ind_bound and rng.random() < 0.85:
            return Variable(rng.choice(ind_bound))
        return IndividualRef(rng.choice(inds))

    choice = rng.random()
    if choice < 0.5 or not (objs or datas):
        return ClassAtom(rng.choice(classes), ind())
    if objs and (choice < 0.8 or not datas):
        return ObjectPropertyAtom(rng.choice(objs), ind(), ind())
    value = Variable(rng.choice(data_bound)) if data_bound else LiteralTerm(rng.choice(lits))
    return DataPropertyAtom(rng.choice(datas), ind(), value)
