"""Bundled example inputs.

``education`` reconstructs the university example; ``education-broken`` adds a
disjointness contradiction and must fail validation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

FIXTURE_ROOT = Path(__file__).resolve().parent


@dataclass(frozen=True)
class Fixture:
    name: str
    directory: Path
    ontology_text: str
    rules_text: str = ""
    queries: dict = field(default_factory=dict)

    @property
    def ontology_path(self) -> Path:
        return self.directory / "education.ofnx"

    @property
    def rules_path(self) -> Path:
        return self.directory / "rules.swrl"

    @property
    def expected_dir(self) -> Path:
        return self.directory / "expected"

    @property
    def broken(self) -> bool:
        return self.name.endswith("-broken")


def load_fixture(name: str) -> Fixture:
    directory = FIXTURE_ROOT / name
    if not directory.is_dir():
        raise FileNotFoundError(f"no fixture named {name!r}")
    rules = directory / "rules.swrl"
    queries = {p.stem: p.read_text(encoding="utf-8") for p in sorted(directory.glob("*.sqwrl"))}
    return Fixture(
        name=name,
        directory=directory,
        ontology_text=(directory / "education.ofnx").read_text(encoding="utf-8"),
        rules_text=rules.read_text(encoding="utf-8") if rules.exists() else "",
        queries=queries,
    )


def education_fixture(broken: bool = False) -> Fixture:
    return load_fixture("education-broken" if broken else "education")
