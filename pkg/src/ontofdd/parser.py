"""Readers and writer for the ontology, rule and query text formats.

Ontology files use a subset of OWL functional-style syntax::

    Prefix(:=<http://example.org/edu#>)
    Ontology(<http://example.org/education>
        Declaration(Class(:Person))
        SubClassOf(:Student :Person)
    )

Rule files hold one rule per line, e.g. ``Person(?p) ^ salary(?p, ?s) -> Employee(?p)``,
optionally preceded by a ``[name]`` label. Query files hold a single rule whose
head is ``sqwrl:select(?v, ...)``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import model
from .model import (
    DATATYPES,
    XSD,
    AnnotationAssertion,
    ClassAssertion,
    DataPropertyAssertion,
    DataPropertyRange,
    DisjointClasses,
    EntityKind,
    FunctionalDataProperty,
    FunctionalObjectProperty,
    Literal,
    ObjectPropertyAssertion,
    Ontology,
    OntologyError,
    PrefixMap,
    SubClassOf,
)
from .rules import (
    BUILTIN_OPS,
    BuiltinAtom,
    ClassAtom,
    DataPropertyAtom,
    DLSafetyError,
    IndividualRef,
    LiteralTerm,
    ObjectPropertyAtom,
    Query,
    Rule,
    RuleError,
    Variable,
    atom_variables,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int, snippet: str = "", path: str = "<string>"):
        self.message = message
        self.line = line
        self.column = column
        self.snippet = snippet
        self.path = path
        super().__init__(f"{path}:{line}:{column}: {message}" + (f" (at {snippet!r})" if snippet else ""))


class ProjectionError(DLSafetyError):
    pass


@dataclass(frozen=True)
class SourceDocument:
    path: str
    text: str
    kind: str = "ontology"

    def __post_init__(self):
        if self.kind not in ("ontology", "rules", "query"):
            raise ValueError(f"unknown document kind {self.kind!r}")

    @classmethod
    def read(cls, path, kind: str) -> "SourceDocument":
        path = Path(path)
        return cls(str(path), path.read_text(encoding="utf-8"), kind)


# --- tokenizer ----------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    type: str
    text: str
    line: int
    column: int


_LOCAL = r"[A-Za-z_0-9][\w-]*(?:\.[\w-]+)*"
_TOKEN_SPEC = [
    ("IRI", r"<[^<>\"{}|^`\\\s]*>"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("DCARET", r"\^\^"),
    ("CARET", r"\^"),
    ("ARROW", r"->"),
    ("NUMBER", r"[+-]?(?:\d+\.\d+|\d+)(?![\w:])"),
    ("VAR", r"\?[A-Za-z][A-Za-z0-9_]*"),
    ("PNAME", rf"(?:[A-Za-z][\w-]*)?:(?:{_LOCAL})?"),
    ("NAME", r"[A-Za-z_][\w-]*"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("EQ", r"="),
    ("LBRACK", r"\["),
    ("RBRACK", r"\]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))


def tokenize(text: str, comment: str, path: str = "<string>", newlines: bool = False) -> list:
    tokens = []
    line, line_start, pos = 1, 0, 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "\n":
            if newlines:
                tokens.append(Token("NEWLINE", "\n", line, pos - line_start + 1))
            line += 1
            pos += 1
            line_start = pos
            continue
        if ch.isspace():
            pos += 1
            continue
        if text.startswith(comment, pos):
            end = text.find("\n", pos)
            pos = n if end < 0 else end
            continue
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            snippet = text[pos:pos + 20].split("\n")[0]
            if ch == '"':
                raise ParseError("unterminated string literal", line, col, snippet, path)
            raise ParseError(f"unexpected character {ch!r}", line, col, snippet, path)
        tokens.append(Token(m.lastgroup, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


def _unescape(quoted: str) -> str:
    return re.sub(r"\\(.)", r"\1", quoted[1:-1])


def _escape(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


class _Cursor:
    def __init__(self, tokens, path):
        self.tokens = tokens
        self.i = 0
        self.path = path

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset=1) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.type != "EOF":
            self.i += 1
        return tok

    def error(self, message, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column, tok.text, self.path)

    def expect(self, type_, what=None) -> Token:
        if self.tok.type != type_:
            found = "end of input" if self.tok.type == "EOF" else repr(self.tok.text)
            raise self.error(f"expected {what or type_}, found {found}")
        return self.next()

    def keyword(self, *words) -> Token:
        if self.tok.type != "NAME" or self.tok.text not in words:
            raise self.error(f"expected {' or '.join(words)}")
        return self.next()


# --- ontology -----------------------------------------------------------------

_DECL_KINDS = {k.value: k for k in EntityKind}


def _resolve(cur: _Cursor, prefixes: PrefixMap, tok: Token) -> str:
    if tok.type == "IRI":
        iri = tok.text[1:-1]
        if not iri:
            raise cur.error("empty IRI", tok)
        return iri
    if tok.type == "PNAME":
        try:
            return prefixes.resolve(tok.text)
        except KeyError as exc:
            raise cur.error(str(exc.args[0]), tok) from None
    raise cur.error("expected an IRI or prefixed name", tok)


class _OntologyParser:
    def __init__(self, doc: SourceDocument):
        self.path = doc.path
        self.cur = _Cursor(tokenize(doc.text, "//", doc.path), doc.path)
        self.prefixes = PrefixMap()
        self.locations: dict = {}

    def iri(self) -> str:
        return _resolve(self.cur, self.prefixes, self.cur.next())

    def literal(self) -> Literal:
        tok = self.cur.expect("STRING", "a quoted literal")
        lexical = _unescape(tok.text)
        datatype = "string"
        if self.cur.tok.type == "DCARET":
            self.cur.next()
            datatype = _datatype_name(self.cur, self.iri())
        try:
            return Literal(lexical, datatype)
        except ValueError as exc:
            raise self.cur.error(str(exc), tok) from None

    def parse(self) -> Ontology:
        cur = self.cur
        while cur.tok.type == "NAME" and cur.tok.text == "Prefix":
            cur.next()
            cur.expect("LPAREN", "'('")
            label_tok = cur.expect("PNAME", "a prefix name ending in ':'")
            if not label_tok.text.endswith(":") or label_tok.text.count(":") != 1:
                raise cur.error("prefix name must end with ':'", label_tok)
            cur.expect("EQ", "'='")
            ns_tok = cur.expect("IRI", "a namespace IRI")
            try:
                self.prefixes.add(label_tok.text[:-1], ns_tok.text[1:-1])
            except OntologyError as exc:
                raise cur.error(exc.message, label_tok) from None
            cur.expect("RPAREN", "')'")
        cur.keyword("Ontology")
        cur.expect("LPAREN", "'('")
        onto_iri = self.iri()
        onto = Ontology(onto_iri, self.prefixes)
        while cur.tok.type != "RPAREN":
            if cur.tok.type == "EOF":
                raise cur.error("missing ')' closing Ontology(")
            self.axiom(onto)
        cur.next()
        if cur.tok.type != "EOF":
            raise cur.error("unexpected text after Ontology(...)")
        try:
            onto.validate(self.locations)
        except OntologyError as exc:
            raise _validation_error(exc, self.path) from None
        return onto

    def axiom(self, onto: Ontology) -> None:
        cur = self.cur
        head = cur.tok
        if head.type != "NAME":
            raise cur.error("expected an axiom")
        name = head.text
        cur.next()
        cur.expect("LPAREN", "'('")
        if name == "Declaration":
            kind_tok = cur.tok
            cur.keyword(*_DECL_KINDS)
            cur.expect("LPAREN", "'('")
            iri = self.iri()
            cur.expect("RPAREN", "')'")
            try:
                onto.declare(iri, _DECL_KINDS[kind_tok.text])
            except OntologyError as exc:
                raise _validation_error(
                    OntologyError(exc.message, kind_tok.line, kind_tok.column), self.path
                ) from None
        else:
            ax = self.axiom_body(name, head)
            if onto.add(ax):
                self.locations[ax] = (head.line, head.column)
        cur.expect("RPAREN", "')'")

    def axiom_body(self, name: str, head: Token):
        cur = self.cur
        if name == "SubClassOf":
            return SubClassOf(self.iri(), self.iri())
        if name in ("ObjectPropertyDomain", "ObjectPropertyRange", "DataPropertyDomain"):
            return model.AXIOM_TYPES[name](self.iri(), self.iri())
        if name == "DataPropertyRange":
            prop = self.iri()
            return DataPropertyRange(prop, _datatype_name(cur, self.iri(), cur.tokens[cur.i - 1]))
        if name == "DisjointClasses":
            classes = [self.iri()]
            while cur.tok.type != "RPAREN":
                classes.append(self.iri())
            if len(set(classes)) < 2:
                raise cur.error("DisjointClasses needs at least two distinct classes", head)
            return DisjointClasses(tuple(classes))
        if name == "FunctionalObjectProperty":
            return FunctionalObjectProperty(self.iri())
        if name == "FunctionalDataProperty":
            return FunctionalDataProperty(self.iri())
        if name == "ClassAssertion":
            return ClassAssertion(self.iri(), self.iri())
        if name == "ObjectPropertyAssertion":
            return ObjectPropertyAssertion(self.iri(), self.iri(), self.iri())
        if name == "DataPropertyAssertion":
            return DataPropertyAssertion(self.iri(), self.iri(), self.literal())
        if name == "AnnotationAssertion":
            return AnnotationAssertion(self.iri(), self.iri(), self.literal())
        raise cur.error(f"unsupported axiom {name}", head)


def _datatype_name(cur: _Cursor, iri: str, tok: Optional[Token] = None) -> str:
    if iri.startswith(XSD) and iri[len(XSD):] in DATATYPES:
        return iri[len(XSD):]
    tok = tok or cur.tokens[cur.i - 1]
    raise cur.error(f"unsupported datatype {iri}; expected one of xsd:{', xsd:'.join(DATATYPES)}", tok)


def _validation_error(exc: OntologyError, path: str) -> OntologyError:
    exc.path = path
    return exc


def parse_ontology(doc: SourceDocument) -> Ontology:
    """Parse and load-validate an ontology document."""
    if doc.kind != "ontology":
        raise ValueError(f"expected an ontology document, got {doc.kind}")
    return _OntologyParser(doc).parse()


def parse_ontology_text(text: str, path: str = "<string>") -> Ontology:
    return parse_ontology(SourceDocument(path, text, "ontology"))


def load_ontology(path) -> Ontology:
    return parse_ontology(SourceDocument.read(path, "ontology"))


# --- rules and queries ----------------------------------------------------------


class _RuleParser:
    def __init__(self, doc: SourceDocument, ontology: Ontology):
        self.doc = doc
        self.onto = ontology
        self.cur = _Cursor(tokenize(doc.text, "#", doc.path, newlines=True), doc.path)

    def skip_newlines(self):
        while self.cur.tok.type == "NEWLINE":
            self.cur.next()

    def at_end_of_rule(self):
        return self.cur.tok.type in ("NEWLINE", "EOF")

    def atoms(self, allow_select=False):
        out = [self.atom(allow_select)]
        while self.cur.tok.type == "CARET":
            self.cur.next()
            out.append(self.atom(allow_select))
        return out

    def predicate(self, tok: Token) -> str:
        if tok.type == "NAME":
            if self.onto.prefixes.get("") is None:
                raise self.cur.error(f"bare name {tok.text!r} needs a default ':' prefix", tok)
            return self.onto.prefixes.get("") + tok.text
        return _resolve(self.cur, self.onto.prefixes, tok)

    def atom(self, allow_select):
        cur = self.cur
        tok = cur.tok
        if tok.type not in ("NAME", "PNAME", "IRI"):
            raise cur.error("expected an atom")
        cur.next()
        iri = self.predicate(tok)
        cur.expect("LPAREN", "'('")
        args = [self.term()]
        while cur.tok.type == "COMMA":
            cur.next()
            args.append(self.term())
        cur.expect("RPAREN", "')'")
        if iri == model.SQWRL + "select":
            if not allow_select:
                raise cur.error("sqwrl:select is only allowed in a query head", tok)
            for a in args:
                if not isinstance(a, Variable):
                    raise cur.error("sqwrl:select takes variables only", tok)
            return ("select", tok, [a.name for a in args])
        if iri.startswith(model.SWRLB):
            op = iri[len(model.SWRLB):]
            if op not in BUILTIN_OPS:
                raise cur.error(f"unsupported builtin swrlb:{op}", tok)
            if len(args) != 2:
                raise cur.error(f"swrlb:{op} takes two arguments", tok)
            for a in args:
                if isinstance(a, IndividualRef):
                    raise cur.error("builtin arguments must be variables or literals", tok)
            return BuiltinAtom(op, args[0], args[1])
        kinds = self.onto.kinds_of(iri)
        if len(args) == 1:
            if EntityKind.CLASS not in kinds:
                raise cur.error(f"unknown class {model.local_name(iri)!r}", tok)
            self.check_individual_term(args[0], tok)
            return ClassAtom(iri, args[0])
        if len(args) == 2:
            self.check_individual_term(args[0], tok)
            if EntityKind.OBJECT_PROPERTY in kinds:
                self.check_individual_term(args[1], tok)
                return ObjectPropertyAtom(iri, args[0], args[1])
            if EntityKind.DATA_PROPERTY in kinds:
                if isinstance(args[1], IndividualRef):
                    raise cur.error("data property value must be a variable or literal", tok)
                return DataPropertyAtom(iri, args[0], args[1])
            raise cur.error(f"unknown property {model.local_name(iri)!r}", tok)
        raise cur.error(f"atom {tok.text} has {len(args)} arguments; expected 1 or 2", tok)

    def check_individual_term(self, term, tok):
        if isinstance(term, LiteralTerm):
            raise self.cur.error("literal used where an individual is expected", tok)

    def term(self):
        cur = self.cur
        tok = cur.next()
        if tok.type == "VAR":
            return Variable(tok.text[1:])
        if tok.type in ("PNAME", "IRI"):
            iri = _resolve(cur, self.onto.prefixes, tok)
            if not self.onto.has_kind(iri, EntityKind.NAMED_INDIVIDUAL):
                raise cur.error(f"{tok.text} is not a declared individual", tok)
            return IndividualRef(iri)
        if tok.type == "STRING":
            lexical = _unescape(tok.text)
            datatype = "string"
            if cur.tok.type == "DCARET":
                cur.next()
                datatype = _datatype_name(cur, _resolve(cur, self.onto.prefixes, cur.next()))
            try:
                return LiteralTerm(Literal(lexical, datatype))
            except ValueError as exc:
                raise cur.error(str(exc), tok) from None
        if tok.type == "NUMBER":
            return LiteralTerm(Literal(tok.text, "decimal" if "." in tok.text else "integer"))
        if tok.type == "NAME":
            if tok.text in ("true", "false"):
                return LiteralTerm(Literal(tok.text, "boolean"))
            raise cur.error(
                f"bare name {tok.text!r} is not a term; variables start with '?' (did you mean ?{tok.text}?)",
                tok,
            )
        raise cur.error("expected a term", tok)

    def rule_line(self, index: int):
        """Parse one rule; returns (name, body, head_atoms, arrow_token)."""
        cur = self.cur
        start = cur.tok
        name = None
        if cur.tok.type == "LBRACK":
            cur.next()
            parts = []
            while cur.tok.type not in ("RBRACK", "NEWLINE", "EOF"):
                parts.append(cur.next().text)
            cur.expect("RBRACK", "']'")
            name = "".join(parts)
            if not name:
                raise cur.error("empty rule label", start)
        if cur.tok.type == "ARROW":
            raise cur.error("rule body is empty")
        body = self.atoms()
        cur.expect("ARROW", "'->'")
        if self.at_end_of_rule():
            raise cur.error("rule head is empty")
        head = self.atoms(allow_select=True)
        if not self.at_end_of_rule():
            raise cur.error("expected '^' or end of line")
        return name or f"R{index}", body, head, start


def parse_rules(doc: SourceDocument, ontology: Ontology) -> list:
    """Parse a rules document against ``ontology`` (for prefixes and predicate kinds)."""
    if doc.kind != "rules":
        raise ValueError(f"expected a rules document, got {doc.kind}")
    p = _RuleParser(doc, ontology)
    rules = []
    names = set()
    while True:
        p.skip_newlines()
        if p.cur.tok.type == "EOF":
            return rules
        name, body, head, start = p.rule_line(len(rules) + 1)
        for atom in head:
            if isinstance(atom, tuple):
                raise p.cur.error("sqwrl:select is only allowed in query files", atom[1])
        if name in names:
            raise p.cur.error(f"duplicate rule name {name!r}", start)
        names.add(name)
        try:
            rules.append(Rule(name, tuple(body), tuple(head)))
        except DLSafetyError as exc:
            exc.line = start.line
            exc.args = (f"{doc.path}:{start.line}: {exc.args[0]}",)
            raise
        except RuleError as exc:
            raise ParseError(str(exc), start.line, start.column, start.text, doc.path) from None


def parse_query(doc: SourceDocument, ontology: Ontology) -> Query:
    """Parse a single ``body -> sqwrl:select(?v, ...)`` query."""
    if doc.kind != "query":
        raise ValueError(f"expected a query document, got {doc.kind}")
    tokens = [t for t in tokenize(doc.text, "#", doc.path) if t.type != "NEWLINE"]
    p = _RuleParser(doc, ontology)
    p.cur = _Cursor(tokens, doc.path)
    if p.cur.tok.type == "EOF":
        raise p.cur.error("query file is empty")
    _, body, head, start = p.rule_line(1)
    if len(head) != 1 or not isinstance(head[0], tuple):
        raise ParseError("query head must be a single sqwrl:select(...)", start.line, start.column, start.text, doc.path)
    _, select_tok, projection = head[0]
    if not projection:
        raise ParseError("sqwrl:select needs at least one variable", select_tok.line, select_tok.column, select_tok.text, doc.path)
    for atom in body:
        if isinstance(atom, tuple):
            raise ParseError("sqwrl:select is only allowed in the head", atom[1].line, atom[1].column, atom[1].text, doc.path)
    bound = set(atom_variables(a for a in body if not isinstance(a, BuiltinAtom)))
    for var in projection:
        if var not in bound:
            raise ProjectionError(f"{doc.path}:{select_tok.line}: selected variable ?{var} is not bound by the query body", variable=var, line=select_tok.line)
    try:
        return Query(tuple(body), tuple(projection))
    except DLSafetyError as exc:
        exc.line = start.line
        raise


def load_rules(path, ontology: Ontology) -> list:
    return parse_rules(SourceDocument.read(path, "rules"), ontology)


def load_query(path, ontology: Ontology) -> Query:
    return parse_query(SourceDocument.read(path, "query"), ontology)


# --- serialization --------------------------------------------------------------

_KIND_ORDER = [k for k in EntityKind]


def render_iri(iri: str, prefixes: PrefixMap) -> str:
    return prefixes.abbreviate(iri) or f"<{iri}>"


def render_literal(lit: Literal, prefixes: Optional[PrefixMap] = None) -> str:
    if lit.datatype == "string":
        return _escape(lit.lexical)
    dt = render_iri(model.datatype_iri(lit.datatype), prefixes or PrefixMap())
    return f"{_escape(lit.lexical)}^^{dt}"


def render_axiom(ax, prefixes: Optional[PrefixMap] = None) -> str:
    prefixes = prefixes or PrefixMap()
    parts = []
    for role, value in ax.signature():
        if role == "literal":
            parts.append(render_literal(value, prefixes))
        elif role == "datatype":
            parts.append(render_iri(model.datatype_iri(value), prefixes))
        elif role == "classes":
            parts.extend(render_iri(v, prefixes) for v in value)
        else:
            parts.append(render_iri(value, prefixes))
    return f"{ax.name}({' '.join(parts)})"


def serialize_ontology(ontology: Ontology) -> str:
    """Canonical text: user prefixes, declarations, then axioms in sorted order."""
    p = ontology.prefixes
    lines = [f"Prefix({label}:=<{ns}>)" for label, ns in p.user_entries().items()]
    lines.append(f"Ontology(<{ontology.iri}>")
    decls = sorted(ontology.entities, key=lambda e: (_KIND_ORDER.index(e.kind), e.iri))
    for ent in decls:
        lines.append(f"    Declaration({ent.kind.value}({render_iri(ent.iri, p)}))")
    for ax in sorted(ontology.axioms, key=lambda a: a.sort_key()):
        lines.append("    " + render_axiom(ax, p))
    lines.append(")")
    return "\n".join(lines) + "\n"


def render_rule(rule: Rule) -> str:
    return f"[{rule.name}] {rule}"


def literal_json(lit: Literal) -> dict:
    return {"lexical": lit.lexical, "datatype": lit.datatype}


def dumps(data) -> str:
    """JSON with a stable layout for artifact files."""
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
