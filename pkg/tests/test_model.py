import pytest

from conftest import e, onto
from ontofdd.model import (
    ClassAssertion,
    DataPropertyAssertion,
    DisjointClasses,
    EntityKind,
    Literal,
    ObjectPropertyAssertion,
    Ontology,
    OntologyError,
    PrefixMap,
    SubClassOf,
    UnknownEntityError,
    assertions_about,
    label_of,
    local_name,
    subclasses_of,
)


@pytest.mark.parametrize(
    "iri, expected",
    [
        ("http://example.org/edu#Department", "Department"),
        ("http://example.org/education", "education"),
        ("urn:swrl#p", "p"),
        ("plain", "plain"),
    ],
)
def test_local_name(iri, expected):
    assert local_name(iri) == expected


def test_label_prefers_rdfs_label():
    o = onto('Declaration(Class(:StudyProg)) AnnotationAssertion(rdfs:label :StudyProg "StudyProgram")')
    assert label_of(o, e("StudyProg")) == "StudyProgram"


def test_label_falls_back_to_local_name():
    o = onto("Declaration(Class(:Department))")
    assert label_of(o, e("Department")) == "Department"


def test_label_tie_break_is_least_label():
    o = onto(
        'Declaration(Class(:X)) AnnotationAssertion(rdfs:label :X "Zeta") '
        'AnnotationAssertion(rdfs:label :X "Alpha")'
    )
    labels = sorted(["Zeta", "Alpha"])
    assert label_of(o, e("X")) == labels[0] == "Alpha"


def _brute_closure(axioms, top):
    """Repeatedly add any sub whose super is already in the set."""
    out = {top}
    changed = True
    while changed:
        changed = False
        for sub, sup in axioms:
            if sup in out and sub not in out:
                out.add(sub)
                changed = True
    return out


def test_subclasses_one_level():
    o = onto(
        "Declaration(Class(:Person)) Declaration(Class(:Student)) Declaration(Class(:Instructor)) "
        "SubClassOf(:Student :Person) SubClassOf(:Instructor :Person)"
    )
    assert subclasses_of(o, e("Person")) == sorted(e(c) for c in ("Person", "Student", "Instructor"))


def test_subclasses_leaf_is_reflexive():
    o = onto("Declaration(Class(:Course))")
    assert subclasses_of(o, e("Course")) == [e("Course")]


def test_subclasses_chain_matches_brute_force():
    o = onto(
        "Declaration(Class(:A)) Declaration(Class(:B)) Declaration(Class(:C)) "
        "SubClassOf(:A :B) SubClassOf(:B :C)"
    )
    pairs = [(ax.sub, ax.sup) for ax in o.axioms_of(SubClassOf)]
    assert set(subclasses_of(o, e("C"))) == _brute_closure(pairs, e("C")) == {e("A"), e("B"), e("C")}


def test_subclasses_unknown_class():
    with pytest.raises(UnknownEntityError):
        subclasses_of(onto(""), e("Nope"))


def test_assertions_about():
    o = onto(
        "Declaration(DataProperty(:salary)) Declaration(NamedIndividual(:p1)) "
        'DataPropertyAssertion(:salary :p1 "5000"^^xsd:integer)'
    )
    got = assertions_about(o, e("p1"))
    assert got == [DataPropertyAssertion(e("salary"), e("p1"), Literal("5000", "integer"))]


def test_assertions_about_fresh_and_object_only():
    o = onto(
        "Declaration(ObjectProperty(:knows)) Declaration(NamedIndividual(:a)) "
        "Declaration(NamedIndividual(:b)) Declaration(NamedIndividual(:c)) "
        "ObjectPropertyAssertion(:knows :a :b)"
    )
    assert assertions_about(o, e("c")) == []
    # oracle: scan every axiom for ones naming :b in subject position
    scanned = [ax for ax in o.axioms if getattr(ax, "subject", getattr(ax, "individual", None)) == e("b")]
    assert assertions_about(o, e("b")) == scanned == []
    with pytest.raises(UnknownEntityError):
        assertions_about(o, e("zz"))


def test_add_is_idempotent():
    o = Ontology("http://example.org/x")
    ax = ClassAssertion("http://example.org/x#C", "http://example.org/x#i")
    assert o.add(ax)
    assert not o.add(ax)
    assert len(o) == 1


def test_subclasses_monotone_under_addition():
    o = onto("Declaration(Class(:A)) Declaration(Class(:B)) Declaration(Class(:C)) SubClassOf(:A :B)")
    before = set(subclasses_of(o, e("B")))
    bigger = o.extended([SubClassOf(e("C"), e("B"))])
    assert before <= set(subclasses_of(bigger, e("B")))
    assert e("B") in before


def test_punning_class_and_individual_allowed():
    o = Ontology("http://example.org/x")
    o.declare("http://example.org/x#Instructor", EntityKind.CLASS)
    o.declare("http://example.org/x#Instructor", EntityKind.NAMED_INDIVIDUAL)
    assert o.kinds_of("http://example.org/x#Instructor") == {EntityKind.CLASS, EntityKind.NAMED_INDIVIDUAL}


def test_other_kind_collision_rejected():
    o = Ontology("http://example.org/x")
    o.declare("http://example.org/x#p", EntityKind.OBJECT_PROPERTY)
    with pytest.raises(OntologyError, match="incompatible kinds"):
        o.declare("http://example.org/x#p", EntityKind.DATA_PROPERTY)


def test_literal_canonical_equality():
    assert Literal("05", "integer") == Literal("5", "integer")
    assert Literal("5.50", "decimal") == Literal("5.5", "decimal")
    assert Literal("1", "boolean") == Literal("true", "boolean")
    assert Literal("5", "integer") != Literal("5", "string")


@pytest.mark.parametrize("lexical, dt", [("x", "integer"), ("1.2.3", "decimal"), ("yes", "boolean"), ("2024-13-01", "date")])
def test_literal_rejects_ill_formed(lexical, dt):
    with pytest.raises(ValueError):
        Literal(lexical, dt)


def test_literal_rejects_unknown_datatype():
    with pytest.raises(ValueError):
        Literal("x", "float")


def test_disjoint_needs_two_classes():
    with pytest.raises(OntologyError):
        DisjointClasses(("a", "a"))


def test_invalid_iri():
    with pytest.raises(OntologyError):
        Ontology("has space")
    with pytest.raises(OntologyError):
        Ontology("")


def test_prefix_round_trip():
    p = PrefixMap({"": "http://example.org/edu#", "ex": "http://example.org/other/"})
    for name in (":Person", "ex:thing", "xsd:integer"):
        assert p.abbreviate(p.resolve(name)) == name


def test_object_assertion_validation_names_undeclared():
    with pytest.raises(OntologyError, match="undeclared"):
        onto("Declaration(ObjectProperty(:p)) Declaration(NamedIndividual(:a)) ObjectPropertyAssertion(:p :a :b)")


def test_kind_mismatch_in_axiom_position():
    with pytest.raises(OntologyError, match="expects Class"):
        onto("Declaration(NamedIndividual(:a)) Declaration(Class(:B)) SubClassOf(:a :B)")


def test_class_assertion_equality_by_value():
    assert ObjectPropertyAssertion("p", "a", "b") == ObjectPropertyAssertion("p", "a", "b")
    assert ClassAssertion("C", "i") != ObjectPropertyAssertion("C", "i", "i")
