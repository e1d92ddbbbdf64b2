"""Map ontology classes to an object model and render accessor stubs.

The neutral :class:`CodeModel` is what ``domain-model.json`` stores; the
``oo-stub`` target renders one interface and one ``Default`` class per type.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .model import (
    DataPropertyDomain,
    DataPropertyRange,
    FunctionalDataProperty,
    FunctionalObjectProperty,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    Ontology,
    local_name,
)

TARGETS = ("oo-stub", "json")
MODEL_FILE = "domain-model.json"

RANGE_TOKENS = {
    "string": "String",
    "integer": "int",
    "decimal": "double",
    "boolean": "boolean",
    "date": "Date",
}
UNTYPED = "Object"
RANGE_KEY_UNTYPED = "any"


class CodeModelError(Exception):
    pass


def capitalize(word: str) -> str:
    return word[:1].upper() + word[1:]


@dataclass(frozen=True)
class CodeProperty:
    name: str
    kind: str  # data | object
    range: str
    functional: bool

    @property
    def accessor_base(self) -> str:
        return capitalize(self.name)

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind, "range": self.range, "functional": self.functional}


@dataclass
class CodeType:
    name: str
    source_class: str
    extends: Optional[str] = None
    properties: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"name": self.name}
        if self.extends is not None:
            out["extends"] = self.extends
        out["source_class"] = self.source_class
        out["properties"] = [p.to_dict() for p in self.properties]
        return out


@dataclass
class CodeModel:
    types: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def get(self, name: str) -> CodeType:
        for t in self.types:
            if t.name == name:
                return t
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"types": [t.to_dict() for t in self.types]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "CodeModel":
        types = []
        for t in data["types"]:
            props = [
                CodeProperty(p["name"], p["kind"], p["range"], bool(p["functional"]))
                for p in t["properties"]
            ]
            types.append(CodeType(t["name"], t["source_class"], t.get("extends"), props))
        model = cls(types)
        model.check()
        return model

    def check(self) -> None:
        names = [t.name for t in self.types]
        if len(set(names)) != len(names):
            raise CodeModelError("duplicate type names in code model")
        known = set(names)
        for t in self.types:
            if t.extends is not None and t.extends not in known:
                raise CodeModelError(f"{t.name} extends unknown type {t.extends}")


def build_code_model(ontology: Ontology) -> CodeModel:
    model = CodeModel()
    names: dict[str, str] = {}
    for cls in ontology.classes:
        name = local_name(cls)
        if name in names:
            raise CodeModelError(f"classes {names[name]} and {cls} share the type name {name}")
        names[name] = cls

    extends: dict[str, Optional[str]] = {}
    for cls in ontology.classes:
        supers = [s for s in ontology.direct_superclasses(cls) if s != cls]
        if len(supers) > 1:
            picked = min(supers, key=lambda s: (local_name(s), s))
            model.warnings.append(
                f"{local_name(cls)} has {len(supers)} superclasses; extending {local_name(picked)}"
            )
            supers = [picked]
        extends[cls] = supers[0] if supers else None

    def chain(cls):
        out = []
        cur = extends.get(cls)
        while cur is not None:
            out.append(cur)
            cur = extends.get(cur)
        return out

    attached: dict[str, dict] = {cls: {} for cls in ontology.classes}
    functional = {ax.prop for ax in ontology.axioms_of(FunctionalObjectProperty, FunctionalDataProperty)}
    specs = []
    for prop in ontology.data_properties:
        ranges = sorted({ax.datatype for ax in ontology.axioms_of(DataPropertyRange) if ax.prop == prop})
        domains = sorted({ax.cls for ax in ontology.axioms_of(DataPropertyDomain) if ax.prop == prop})
        rng = RANGE_KEY_UNTYPED if not ranges else ranges[0]
        specs.append((prop, "data", domains, ranges, rng))
    for prop in ontology.object_properties:
        ranges = sorted({ax.cls for ax in ontology.axioms_of(ObjectPropertyRange) if ax.prop == prop})
        domains = sorted({ax.cls for ax in ontology.axioms_of(ObjectPropertyDomain) if ax.prop == prop})
        rng = RANGE_KEY_UNTYPED if not ranges else local_name(ranges[0])
        specs.append((prop, "object", domains, ranges, rng))

    for prop, kind, domains, ranges, rng in sorted(specs):
        if not domains:
            model.warnings.append(f"{local_name(prop)} has no domain; not attached to any type")
            continue
        if len(ranges) > 1:
            model.warnings.append(f"{local_name(prop)} has {len(ranges)} ranges; using {rng}")
        cp = CodeProperty(local_name(prop), kind, rng, prop in functional)
        for cls in domains:
            # inherited through extends: declared once, on the topmost domain
            if not any(a in domains for a in chain(cls)):
                attached[cls][cp.name] = cp

    for cls in ontology.classes:
        sup = extends[cls]
        model.types.append(
            CodeType(
                name=local_name(cls),
                source_class=cls,
                extends=local_name(sup) if sup else None,
                properties=[attached[cls][k] for k in sorted(attached[cls])],
            )
        )
    model.types.sort(key=lambda t: t.name)
    return model


def range_token(prop: CodeProperty) -> str:
    if prop.range == RANGE_KEY_UNTYPED:
        return UNTYPED
    if prop.kind == "data":
        return RANGE_TOKENS.get(prop.range, UNTYPED)
    return prop.range


def _interface(t: CodeType) -> str:
    head = f"public interface {t.name}"
    if t.extends:
        head += f" extends {t.extends}"
    lines = [head + " {"]
    for p in t.properties:
        tok, acc = range_token(p), p.accessor_base
        if p.functional:
            lines.append(f"    {tok} get{acc}();")
            lines.append(f"    void set{acc}({tok} value);")
        else:
            lines.append(f"    void add{acc}({tok} value);")
            lines.append(f"    void remove{acc}({tok} value);")
            lines.append(f"    List<{tok}> list{acc}();")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _lookup(name: str) -> str:
    return f'        RDFProperty property = getOWLModel().getRDFProperty("{name}");'


def _default_class(t: CodeType) -> str:
    base = f"Default{t.extends}" if t.extends else "DefaultOWLIndividual"
    lines = [
        f"public class Default{t.name} extends {base} implements {t.name} {{",
        f"    public Default{t.name}(KnowledgeBase kb, FrameID id) {{",
        "        super(kb, id);",
        "    }",
    ]
    for p in t.properties:
        tok, acc = range_token(p), p.accessor_base
        if p.functional:
            bodies = [
                (f"public {tok} get{acc}()", [f"        return ({tok}) getPropertyValue(property);"]),
                (f"public void set{acc}({tok} value)", ["        setPropertyValue(property, value);"]),
            ]
        else:
            bodies = [
                (f"public void add{acc}({tok} value)", ["        addPropertyValue(property, value);"]),
                (f"public void remove{acc}({tok} value)", ["        removePropertyValue(property, value);"]),
                (
                    f"public List<{tok}> list{acc}()",
                    [f"        return (List<{tok}>) getPropertyValues(property);"],
                ),
            ]
        for signature, body in bodies:
            lines += ["", f"    {signature} {{", _lookup(p.name), *body, "    }"]
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_stubs(model: CodeModel, target: str = "oo-stub") -> dict:
    """Rendered files as a ``{relative path: text}`` mapping, sorted by path."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {', '.join(TARGETS)}")
    if target == "json":
        return {MODEL_FILE: model.to_json()}
    files = {}
    for t in model.types:
        files[f"{t.name}.txt"] = _interface(t)
        files[f"Default{t.name}.txt"] = _default_class(t)
    return dict(sorted(files.items()))


def write_files(files: dict, out_dir) -> list:
    out_dir = Path(out_dir)
    written = []
    for rel, text in files.items():
        path = out_dir / rel
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
        written.append(path)
    return written


def load_code_model(path) -> CodeModel:
    return CodeModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
