"""Development plan: class owners, feature sequence and completion dates."""
from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from typing import Optional

from .features import Feature, MajorFeatureSet
from .model import (
    FDD_HAS_OWNER,
    DataPropertyAssertion,
    EntityKind,
    ObjectPropertyAssertion,
    Ontology,
    label_of,
    local_name,
)

UNASSIGNED = "UNASSIGNED"


class OwnerConflictError(Exception):
    def __init__(self, cls: str, owners):
        self.cls = cls
        self.owners = sorted(owners)
        super().__init__(f"conflicting owners for class {local_name(cls)}: {', '.join(self.owners)}")


@dataclass(frozen=True)
class OwnerAssignment:
    class_iri: str
    owner: Optional[str]
    source: str  # annotation | query | unassigned

    def to_dict(self) -> dict:
        return {"class": self.class_iri, "owner": self.owner, "source": self.source}


@dataclass(frozen=True)
class ScheduleEntry:
    feature_id: str
    owner: str
    sequence_index: int
    completion_date: datetime.date
    sentence: str = ""

    def to_dict(self) -> dict:
        return {
            "feature_id": self.feature_id,
            "sentence": self.sentence,
            "owner": self.owner,
            "sequence_index": self.sequence_index,
            "completion_date": self.completion_date.isoformat(),
        }


@dataclass(frozen=True)
class PlanConfig:
    start_date: datetime.date
    iteration_length_days: int = 14
    default_owner: Optional[str] = None

    def __post_init__(self):
        if self.iteration_length_days < 1:
            raise ValueError("iteration_length_days must be >= 1")


@dataclass
class Plan:
    overall_completion: datetime.date
    major_feature_set_completion: tuple
    feature_set_entries: list
    schedule: list
    class_owners: list
    feature_sets: list = field(default_factory=list, repr=False)

    @property
    def unassigned(self) -> list:
        return [e for e in self.schedule if e.owner == UNASSIGNED]

    def to_dict(self) -> dict:
        title, date = self.major_feature_set_completion
        return {
            "overall_completion": self.overall_completion.isoformat(),
            "major_feature_set": {"title": title, "completion": date.isoformat()},
            "feature_sets": [
                {"title": t, "owner": o, "completion": d.isoformat()}
                for t, o, d in self.feature_set_entries
            ],
            "schedule": [e.to_dict() for e in self.schedule],
            "class_owners": [a.to_dict() for a in self.class_owners],
        }

    def to_markdown(self) -> str:
        title, date = self.major_feature_set_completion
        by_id = {e.feature_id: e for e in self.schedule}
        lines = [
            "# Development plan",
            "",
            f"Overall completion: {self.overall_completion.isoformat()}",
            "",
            f"## {title} (completion {date.isoformat()})",
            "",
        ]
        for (fs_title, owner, fs_date), fs in zip(self.feature_set_entries, self.feature_sets):
            lines += [
                f"### {fs_title}",
                "",
                f"Chief programmer: {owner}; completion {fs_date.isoformat()}",
                "",
                "| Feature | Owner | Completion |",
                "| --- | --- | --- |",
            ]
            for f in fs.features:
                e = by_id[f.id]
                lines.append(f"| {f.sentence} | {e.owner} | {e.completion_date.isoformat()} |")
            lines.append("")
        lines += ["## Class owners", "", "| Class | Owner | Source |", "| --- | --- | --- |"]
        for a in self.class_owners:
            lines.append(f"| {local_name(a.class_iri)} | {a.owner or '-'} | {a.source} |")
        lines.append("")
        return "\n".join(lines)


def _is_owner_property(iri: str) -> bool:
    return local_name(iri).lower() == "hasowner"


def resolve_owners(ontology: Ontology) -> list:
    """One OwnerAssignment per declared class, sorted by class IRI.

    The ``fdd:hasOwner`` annotation wins; otherwise a ``hasOwner`` property
    assertion on the individual punned with the class IRI is used. Both present
    and disagreeing raises :class:`OwnerConflictError`.
    """
    punned_values: dict[str, set] = {}
    for ax in ontology.axioms_of(DataPropertyAssertion, ObjectPropertyAssertion):
        if not _is_owner_property(ax.prop):
            continue
        if isinstance(ax, DataPropertyAssertion):
            value = ax.value.lexical
        else:
            value = label_of(ontology, ax.object)
        punned_values.setdefault(ax.subject, set()).add(value)

    out = []
    for cls in ontology.classes:
        annotated = {lit.lexical for lit in ontology.annotations(cls, FDD_HAS_OWNER)}
        queried = set()
        if ontology.has_kind(cls, EntityKind.NAMED_INDIVIDUAL):
            queried = punned_values.get(cls, set())
        if len(annotated) > 1:
            raise OwnerConflictError(cls, annotated)
        if len(queried) > 1:
            raise OwnerConflictError(cls, queried)
        if annotated and queried and annotated != queried:
            raise OwnerConflictError(cls, annotated | queried)
        if annotated:
            out.append(OwnerAssignment(cls, annotated.pop(), "annotation"))
        elif queried:
            out.append(OwnerAssignment(cls, queried.pop(), "query"))
        else:
            out.append(OwnerAssignment(cls, None, "unassigned"))
    return out


def _owner_lookup(assignments) -> dict:
    return {a.class_iri: a.owner for a in assignments if a.source != "unassigned" and a.owner}


def feature_owner(feature: Feature, assignments, default_owner: Optional[str] = None) -> str:
    """Owner of the domain class, else the range class, else ``default_owner``."""
    owners = _owner_lookup(assignments)
    return (
        owners.get(feature.domain_class)
        or owners.get(feature.range_class)
        or default_owner
        or UNASSIGNED
    )


def development_order(features) -> list:
    """Heavier features first; ties broken by sentence then id."""
    return sorted(features, key=lambda f: (-f.weight, f.sentence, f.id))


def build_plan(major: MajorFeatureSet, assignments, config: PlanConfig) -> Plan:
    step = datetime.timedelta(days=config.iteration_length_days)
    queue_length: dict[str, int] = {}
    schedule = []
    for index, feature in enumerate(development_order(major.features)):
        owner = feature_owner(feature, assignments, config.default_owner)
        slot = queue_length.get(owner, 0)
        queue_length[owner] = slot + 1
        done = config.start_date + (slot + 1) * step
        schedule.append(ScheduleEntry(feature.id, owner, index, done, feature.sentence))

    by_id = {e.feature_id: e for e in schedule}
    owners = _owner_lookup(assignments)
    fs_entries = []
    for fs in major.feature_sets:
        dates = [by_id[f.id].completion_date for f in fs.features]
        owner = owners.get(fs.class_iri) or config.default_owner or UNASSIGNED
        fs_entries.append((fs.title, owner, max(dates, default=config.start_date)))

    overall = max((e.completion_date for e in schedule), default=config.start_date)
    return Plan(
        overall_completion=overall,
        major_feature_set_completion=(major.title, overall),
        feature_set_entries=fs_entries,
        schedule=schedule,
        class_owners=list(assignments),
        feature_sets=list(major.feature_sets),
    )
