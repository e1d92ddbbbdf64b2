"""Feature list generation.

Object properties become features, top-level classes become feature sets and
the ontology itself becomes the major feature set::

    Offering of StudyProgram by Department
    Department module including all subclass of Department
    education management
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from .model import (
    FDD_ACTION,
    FDD_PREPOSITION,
    FDD_WEIGHT,
    ObjectPropertyDomain,
    ObjectPropertyRange,
    Ontology,
    label_of,
    local_name,
    superclasses_of,
    top_level_classes,
)

PREPOSITIONS = ("by", "for", "of", "to")
DEFAULT_PREPOSITION = "by"


class FeatureError(Exception):
    def __init__(self, prop: str, message: str):
        self.prop = prop
        super().__init__(f"{local_name(prop)}: {message}")


class MissingDomainRangeError(FeatureError):
    pass


class AmbiguousPropertyError(FeatureError):
    pass


@dataclass(frozen=True)
class Feature:
    id: str
    action: str
    preposition: str
    domain_class: str
    range_class: str
    sentence: str
    weight: int
    source_property: str
    domain_label: str = ""
    range_label: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "sentence": self.sentence,
            "action": self.action,
            "domain": self.domain_class,
            "range": self.range_class,
            "preposition": self.preposition,
            "weight": self.weight,
        }


@dataclass
class FeatureSet:
    class_iri: str
    title: str
    features: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "class": self.class_iri,
            "title": self.title,
            "features": [f.to_dict() for f in self.features],
        }


@dataclass
class MajorFeatureSet:
    title: str
    feature_sets: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def features(self) -> list:
        return [f for fs in self.feature_sets for f in fs.features]

    def to_dict(self) -> dict:
        return {
            "major": {
                "title": self.title,
                "feature_sets": [fs.to_dict() for fs in self.feature_sets],
            },
            "warnings": list(self.warnings),
        }

    def to_markdown(self) -> str:
        lines = [f"# {self.title}", ""]
        for fs in self.feature_sets:
            lines += [f"## {fs.title}", ""]
            lines += [f"- {f.sentence}" for f in fs.features]
            lines.append("")
        if self.warnings:
            lines += ["## Warnings", ""]
            lines += [f"- {w}" for w in self.warnings]
            lines.append("")
        return "\n".join(lines)


def feature_id(prop: str) -> str:
    digest = hashlib.sha1(prop.encode("utf-8")).hexdigest()[:8]
    return f"{local_name(prop)}-{digest}"


def fallback_action(prop: str) -> str:
    """``hasStudyProg`` -> ``Study Prog``; a leading has/is token is dropped."""
    words = re.findall(r"[A-Z]+(?![a-z])|[A-Z]?[a-z]+|\d+", local_name(prop))
    if len(words) > 1 and words[0].lower() in ("has", "is"):
        words = words[1:]
    if not words:
        return local_name(prop)
    text = " ".join(words)
    return text[0].upper() + text[1:]


def _annotation(ontology: Ontology, prop: str, annotation: str):
    values = ontology.annotations(prop, annotation)
    return values[0].lexical if values else None


def _feature_parts(ontology: Ontology, prop: str):
    """Resolve (domain, range, action, preposition, weight, lint) for ``prop``."""
    domains = sorted({ax.cls for ax in ontology.axioms_of(ObjectPropertyDomain) if ax.prop == prop})
    ranges = sorted({ax.cls for ax in ontology.axioms_of(ObjectPropertyRange) if ax.prop == prop})
    missing = [w for w, vals in (("domain", domains), ("range", ranges)) if not vals]
    if missing:
        raise MissingDomainRangeError(prop, f"no declared {' or '.join(missing)}; property skipped")
    if len(domains) > 1 or len(ranges) > 1:
        raise AmbiguousPropertyError(
            prop,
            f"{len(domains)} domains and {len(ranges)} ranges declared; expected exactly one of each",
        )
    lint = []
    action = _annotation(ontology, prop, FDD_ACTION)
    if action is None:
        action = fallback_action(prop)
        lint.append(f"{local_name(prop)}: no fdd:action annotation; using fallback action {action!r}")
    preposition = _annotation(ontology, prop, FDD_PREPOSITION)
    if preposition is None:
        preposition = DEFAULT_PREPOSITION
    elif preposition not in PREPOSITIONS:
        lint.append(
            f"{local_name(prop)}: fdd:preposition {preposition!r} is not one of "
            f"{', '.join(PREPOSITIONS)}; using {DEFAULT_PREPOSITION!r}"
        )
        preposition = DEFAULT_PREPOSITION
    weight_text = _annotation(ontology, prop, FDD_WEIGHT)
    weight = 1
    if weight_text is not None:
        try:
            weight = int(weight_text)
        except ValueError:
            weight = 0
        if weight < 1:
            raise FeatureError(prop, f"fdd:weight must be a positive integer, got {weight_text!r}")
    return domains[0], ranges[0], action, preposition, weight, lint


def feature_from_property(ontology: Ontology, prop: str) -> Feature:
    """Build the feature for object property ``prop``.

    Raises :class:`MissingDomainRangeError` or :class:`AmbiguousPropertyError`
    when ``prop`` lacks exactly one domain and one range.
    """
    return _build(ontology, prop)[0]


def _build(ontology, prop):
    domain, rng, action, prep, weight, lint = _feature_parts(ontology, prop)
    d_label, r_label = label_of(ontology, domain), label_of(ontology, rng)
    sentence = f"{action} of {r_label} {prep} {d_label}"
    feature = Feature(
        id=feature_id(prop),
        action=action,
        preposition=prep,
        domain_class=domain,
        range_class=rng,
        sentence=sentence,
        weight=weight,
        source_property=prop,
        domain_label=d_label,
        range_label=r_label,
    )
    return feature, lint


def long_form_sentence(feature: Feature) -> str:
    """``<action> the <range> <prep> a(n) <domain>``."""
    domain = feature.domain_label or local_name(feature.domain_class)
    rng = feature.range_label or local_name(feature.range_class)
    article = "an" if domain[:1].lower() in "aeiou" and domain else "a"
    return f"{feature.action} the {rng} {feature.preposition} {article} {domain}"


def _anchor(ontology: Ontology, cls: str, tops: set) -> str:
    candidates = [c for c in superclasses_of(ontology, cls) if c in tops]
    return min(candidates) if candidates else cls


def generate_feature_list(ontology: Ontology) -> MajorFeatureSet:
    major = MajorFeatureSet(f"{local_name(ontology.iri)} management")
    props = ontology.object_properties
    if not props:
        major.warnings.append("no object properties to transform into features")
        return major
    tops = set(top_level_classes(ontology))
    groups: dict[str, list] = {}
    for prop in props:
        try:
            feature, lint = _build(ontology, prop)
        except FeatureError as exc:
            major.warnings.append(str(exc))
            continue
        major.warnings.extend(lint)
        groups.setdefault(_anchor(ontology, feature.domain_class, tops), []).append(feature)
    for cls, features in groups.items():
        title = f"{label_of(ontology, cls)} module including all subclass of {label_of(ontology, cls)}"
        features.sort(key=lambda f: (f.sentence, f.id))
        major.feature_sets.append(FeatureSet(cls, title, features))
    major.feature_sets.sort(key=lambda fs: (fs.title, fs.class_iri))
    return major
