"""Command line pipeline: validate, infer, features, query, plan, codegen, report.

Exit codes: 0 success, 1 violations or rule/owner errors, 2 parse, IO or usage errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import datetime
import hashlib
import sys
from collections import Counter
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import codegen
from .features import generate_feature_list
from .model import EntityKind, OntologyError, local_name
from .parser import (
    ParseError,
    SourceDocument,
    dumps,
    parse_ontology,
    parse_query,
    parse_rules,
    render_axiom,
    serialize_ontology,
)
from .pipeline import materialize
from .planner import OwnerConflictError, PlanConfig, build_plan, resolve_owners
from .reasoner import TypingMode, check_consistency
from .rules import RuleError, run_query

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

FORMATS = ("json", "markdown", "both")


class UsageError(Exception):
    pass


@dataclasses.dataclass
class RunConfig:
    ontology: Path
    rules: Optional[Path] = None
    typing: TypingMode = TypingMode.INFER
    out: Path = Path("out")
    format: str = "both"
    start_date: Optional[datetime.date] = None
    iteration_days: int = 14
    default_owner: Optional[str] = None
    query: Optional[Path] = None
    target: str = "oo-stub"

    @property
    def wants_json(self) -> bool:
        return self.format in ("json", "both")

    @property
    def wants_markdown(self) -> bool:
        return self.format in ("markdown", "both")

    def plan_config(self) -> PlanConfig:
        if self.start_date is None:
            raise UsageError("--start-date is required for planning")
        if self.iteration_days < 1:
            raise UsageError("--iteration-days must be at least 1")
        return PlanConfig(self.start_date, self.iteration_days, self.default_owner)


_PATH_KEYS = ("ontology", "rules", "out", "query")


def _load_config_file(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"{path}: {exc}") from None
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise UsageError(f"{path}: unknown config keys: {', '.join(unknown)}")
    for key in _PATH_KEYS:
        if key in data:
            data[key] = path.parent / data[key]
    return data


def make_config(args: argparse.Namespace) -> RunConfig:
    """Flags override the config file, which overrides defaults."""
    values: dict = {}
    if args.config:
        values.update(_load_config_file(Path(args.config)))
    for f in dataclasses.fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    if "ontology" not in values:
        raise UsageError("an ontology file is required (-o/--ontology)")
    try:
        if isinstance(values.get("start_date"), str):
            values["start_date"] = datetime.date.fromisoformat(values["start_date"])
        if "typing" in values:
            values["typing"] = TypingMode(values["typing"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if values.get("format", "both") not in FORMATS:
        raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
    if values.get("target", "oo-stub") not in codegen.TARGETS:
        raise UsageError(f"--target must be one of {', '.join(codegen.TARGETS)}")
    for key in _PATH_KEYS:
        if values.get(key) is not None:
            values[key] = Path(values[key])
    return RunConfig(**values)


# --- shared loading -------------------------------------------------------------


def _read(path: Path, kind: str) -> SourceDocument:
    try:
        return SourceDocument.read(path, kind)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise UsageError(f"{path} is not valid UTF-8") from None


class _Session:
    """Parsed inputs and cached stage results for one invocation."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.ontology = parse_ontology(_read(config.ontology, "ontology"))
        self.rules = []
        if config.rules is not None:
            self.rules = parse_rules(_read(config.rules, "rules"), self.ontology)
        self._mat = None

    @property
    def materialized(self):
        if self._mat is None:
            self._mat = materialize(self.ontology, self.rules, self.config.typing)
        return self._mat

    def violations(self):
        return check_consistency(self.ontology, self.materialized.derived, self.config.typing)

    def render(self, ax) -> str:
        return render_axiom(ax, self.ontology.prefixes)

    def out(self, rel: str) -> Path:
        path = self.config.out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        return path


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# --- stage writers --------------------------------------------------------------


def _write_violations(s: _Session, violations) -> None:
    if s.config.wants_json:
        _write(s.out("violations.json"), dumps([v.to_dict(s.render) for v in violations]))
    if s.config.wants_markdown:
        _write(s.out("violations.txt"), "".join(v.to_line(s.render) + "\n" for v in violations))


def _write_features(s: _Session, major) -> None:
    if s.config.wants_json:
        _write(s.out("features.json"), dumps(major.to_dict()))
    if s.config.wants_markdown:
        _write(s.out("features.md"), major.to_markdown())
    _write(s.out("feature-warnings.txt"), "".join(w + "\n" for w in major.warnings))


def _write_plan(s: _Session, plan) -> None:
    if s.config.wants_json:
        _write(s.out("plan.json"), dumps(plan.to_dict()))
    if s.config.wants_markdown:
        _write(s.out("plan.md"), plan.to_markdown())


def _stub_files(s: _Session, target: str) -> dict:
    model = codegen.build_code_model(s.ontology)
    for w in model.warnings:
        print(f"warning: {w}", file=sys.stderr)
    files = codegen.render_stubs(model, target)
    files.update(codegen.render_stubs(model, "json"))
    return dict(sorted(files.items()))


# --- commands -------------------------------------------------------------------


def cmd_validate(config: RunConfig) -> int:
    s = _Session(config)
    violations = s.violations()
    _write_violations(s, violations)
    for v in violations:
        print(v.to_line(s.render), file=sys.stderr)
    return EXIT_FAILED if violations else EXIT_OK


def cmd_infer(config: RunConfig) -> int:
    s = _Session(config)
    mat = s.materialized
    _write(s.out("materialized.ofnx"), serialize_ontology(mat.ontology))
    _write(s.out("derivations.log"), "".join(line + "\n" for line in mat.log_lines()))
    if config.wants_json:
        log = [
            {
                "axiom": s.render(ax),
                "rule": mat.provenance[ax].rule if ax in mat.provenance else None,
                "binding": {
                    k: str(v) if not isinstance(v, str) else local_name(v)
                    for k, v in (mat.provenance[ax].binding if ax in mat.provenance else ())
                },
            }
            for ax in mat.derived
        ]
        _write(s.out("derivations.json"), dumps(log))
    return EXIT_OK


def cmd_features(config: RunConfig) -> int:
    s = _Session(config)
    major = generate_feature_list(s.ontology)
    _write_features(s, major)
    for w in major.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_query(config: RunConfig, query_path: Optional[Path] = None) -> int:
    s = _Session(config)
    query_path = query_path or config.query
    if query_path is None:
        raise UsageError("a query file is required (-q/--query)")
    query = parse_query(_read(Path(query_path), "query"), s.ontology)
    table = run_query(s.materialized.ontology, query)
    tsv = table.to_tsv()
    _write(s.out("query-result.tsv"), tsv)
    _write(s.out("query-result.json"), dumps(table.to_json()))
    sys.stdout.write(tsv)
    return EXIT_OK


def _plan(s: _Session):
    major = generate_feature_list(s.ontology)
    owners = resolve_owners(s.materialized.ontology)
    return major, build_plan(major, owners, s.config.plan_config())


def cmd_plan(config: RunConfig) -> int:
    s = _Session(config)
    config.plan_config()
    _, plan = _plan(s)
    _write_plan(s, plan)
    if plan.unassigned:
        for e in plan.unassigned:
            print(f"unassigned feature: {e.sentence}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_codegen(config: RunConfig, target: Optional[str] = None) -> int:
    s = _Session(config)
    files = _stub_files(s, target or config.target)
    codegen.write_files(files, config.out)
    return EXIT_OK


def cmd_report(config: RunConfig) -> int:
    s = _Session(config)
    config.plan_config()
    violations = s.violations()
    major, plan = _plan(s)
    stubs = _stub_files(s, config.target)

    _write_violations(s, violations)
    _write_features(s, major)
    _write_plan(s, plan)
    codegen.write_files(stubs, config.out / "stubs")
    _write(s.out("report.md"), render_report(s, violations, major, plan, stubs))
    failed = bool(violations) or bool(plan.unassigned)
    return EXIT_FAILED if failed else EXIT_OK


def render_report(s: _Session, violations, major, plan, stubs: dict) -> str:
    onto = s.ontology
    mat = s.materialized
    counts = Counter(e.kind for e in onto.entities)
    lines = [
        f"# FDD report: {local_name(onto.iri)}",
        "",
        "## 1. Overall Model",
        "",
        f"Ontology: <{onto.iri}>",
        "",
        "| Entity kind | Count |",
        "| --- | --- |",
    ]
    lines += [f"| {k.value} | {counts.get(k, 0)} |" for k in EntityKind]
    lines += [
        "",
        f"Asserted axioms: {len(onto)}",
        f"Rules: {len(s.rules)}",
        f"Derived axioms: {len(mat.derived)} ({len(mat.typing)} by typing, {len(mat.provenance)} by rules)",
        f"Typing mode: {s.config.typing.value}",
        f"Violations: {len(violations)}",
        "",
    ]
    if violations:
        lines += [f"- {v.to_line(s.render)}" for v in violations] + [""]
    else:
        lines += ["The model is consistent.", ""]

    lines += [
        "## 2. Feature List & Plan",
        "",
        f"Major feature set: {major.title}",
        f"Feature sets: {len(major.feature_sets)}",
        f"Features: {len(major.features)}",
        f"Overall completion: {plan.overall_completion.isoformat()}",
        "",
    ]
    by_id = {e.feature_id: e for e in plan.schedule}
    for (title, owner, date), fs in zip(plan.feature_set_entries, major.feature_sets):
        lines += [
            f"### {title}",
            "",
            f"Chief programmer: {owner}; completion {date.isoformat()}",
            "",
            "| Feature | Owner | Completion |",
            "| --- | --- | --- |",
        ]
        for f in fs.features:
            e = by_id[f.id]
            lines.append(f"| {f.sentence} | {e.owner} | {e.completion_date.isoformat()} |")
        lines.append("")
    if major.warnings:
        lines += ["### Feature warnings", ""] + [f"- {w}" for w in major.warnings] + [""]
    lines += ["### Class owners", "", "| Class | Owner | Source |", "| --- | --- | --- |"]
    lines += [f"| {local_name(a.class_iri)} | {a.owner or '-'} | {a.source} |" for a in plan.class_owners]
    lines += [
        "",
        "## 3. Component Stubs",
        "",
        f"Target: {s.config.target}; {len(stubs)} files under stubs/",
        "",
        "| File | Bytes | SHA-256 |",
        "| --- | --- | --- |",
    ]
    for rel, text in stubs.items():
        data = text.encode("utf-8")
        lines.append(f"| {rel} | {len(data)} | {hashlib.sha256(data).hexdigest()[:16]} |")
    lines.append("")
    return "\n".join(lines)


# --- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--ontology", help="ontology file (functional syntax)")
    common.add_argument("-r", "--rules", help="rules file, one rule per line")
    common.add_argument("--typing", choices=[m.value for m in TypingMode], help="domain/range semantics")
    common.add_argument("--out", help="output directory (created if absent)")
    common.add_argument("--format", choices=FORMATS, help="artifact format")
    common.add_argument("--config", help="TOML file with default option values")

    planning = argparse.ArgumentParser(add_help=False)
    planning.add_argument("--start-date", dest="start_date", help="YYYY-MM-DD")
    planning.add_argument("--iteration-days", dest="iteration_days", type=int)
    planning.add_argument("--default-owner", dest="default_owner")

    parser = argparse.ArgumentParser(prog="ontofdd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="consistency check")
    sub.add_parser("infer", parents=[common], help="write the materialized ontology")
    sub.add_parser("features", parents=[common], help="write the feature list")
    q = sub.add_parser("query", parents=[common], help="run a sqwrl:select query")
    q.add_argument("-q", "--query", help="query file")
    sub.add_parser("plan", parents=[common, planning], help="write the development plan")
    c = sub.add_parser("codegen", parents=[common], help="write code stubs")
    c.add_argument("--target", choices=codegen.TARGETS)
    r = sub.add_parser("report", parents=[common, planning], help="run every stage")
    r.add_argument("--target", choices=codegen.TARGETS)
    return parser


COMMANDS = {
    "validate": cmd_validate,
    "infer": cmd_infer,
    "features": cmd_features,
    "query": cmd_query,
    "plan": cmd_plan,
    "codegen": cmd_codegen,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        config = make_config(args)
        return COMMANDS[args.command](config)
    except (ParseError, OntologyError, UsageError, OSError, codegen.CodeModelError) as exc:
        where = getattr(exc, "path", None)
        prefix = f"{where}: " if isinstance(exc, OntologyError) and where else ""
        print(f"error: {prefix}{exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuleError, OwnerConflictError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
