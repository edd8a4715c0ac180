"""The hkdiag command line tool.

Subcommands mirror the library layers: enumerate and classify work on
characteristic diagrams, symmetry reads the bound table, loop and family
build spatial graph codes, linking and analyze interrogate them. Exit codes
are 0 for success, 1 for rule violations or contradicted assertions, and 2
for malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

from .diagram import StructureError, classify_type, enumerate_valid, realization_status
from .diagram import diagram_to_json_dict
from .labeling import (
    annulus_to_json_dict,
    derived_facts,
    label_catalog,
    parse_annulus,
    symmetry_bounds,
    validate_labels,
)
from .spatial import (
    ContradictionError,
    FactSet,
    GraphClass,
    Unclassified,
    bridge_of,
    classify_atoroidal,
    constituent_links,
    family_odd_ringed,
    family_torus_link,
    format_code,
    linking_number,
    loop_at,
    looping_kind,
    looping_transition,
    mirror_code,
    parse_code,
    predicted_annulus,
    resolve_end,
    type_three_two_linking_test,
    validate_code,
    _prov_items,
)
from .wirtinger import alexander_polynomial, attach_evidence, h1_complement

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_STRUCTURE = 2

_BOOL_FACTS = ("atoroidal", "planar", "split", "trivial-link")
_EDGE_FACTS = ("tunnel", "knotting-arc")


class _FileReport:
    """Collected output for one input file."""

    def __init__(self, path: str):
        self.path = path
        self.lines: list[str] = []
        self.data: dict = {"file": path}
        self.code = EXIT_OK

    def say(self, line: str) -> None:
        self.lines.append(line)

    def fail(self, code: int, message: str) -> None:
        self.code = max(self.code, code)
        self.say(message)
        self.data.setdefault("errors", []).append(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as err:
        raise StructureError(f"cannot read {path}: {err.strerror}")


def _emit(reports: list[_FileReport], fmt: str) -> int:
    if fmt == "json":
        payload = [r.data for r in reports]
        print(json.dumps(payload[0] if len(payload) == 1 else payload, indent=2))
    else:
        chunks = []
        for r in reports:
            chunks.append("\n".join(r.lines))
        print("\n\n".join(chunks))
    return max((r.code for r in reports), default=EXIT_OK)


def _run_per_file(paths, worker, jobs: int, fmt: str) -> int:
    if jobs > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(worker, paths))
    else:
        reports = [worker(p) for p in paths]
    return _emit(reports, fmt)


# --- enumerate -------------------------------------------------------------------


def _cmd_enumerate(args) -> int:
    report = _FileReport("enumerate")
    del report.data["file"]
    if args.labels:
        entries = label_catalog()
        report.data["count"] = len(entries)
        report.data["entries"] = [
            {
                "type": str(entry.dtype),
                "labels": list(entry.kinds),
                "realization": entry.realization,
                "constrained": entry.constrained,
                "diagram": annulus_to_json_dict(entry.diagram),
            }
            for entry in entries
        ]
        report.say(f"{len(entries)} labeled diagrams")
        for entry in entries:
            marker = " *" if entry.constrained else ""
            report.say(f"  {entry.dtype} {{{', '.join(entry.kinds)}}}{marker}")
        report.say("entries marked * carry a symmetry bound")
    else:
        diagrams = enumerate_valid(single_bigon_rule=not args.drop_bigon_rule)
        report.data["count"] = len(diagrams)
        report.data["diagrams"] = [
            {
                "type": str(classify_type(d)),
                "realization": realization_status(classify_type(d)),
                "diagram": diagram_to_json_dict(d),
            }
            for d in diagrams
        ]
        report.say(f"{len(diagrams)} diagram classes")
        for d in diagrams:
            t = classify_type(d)
            report.say(f"  {t} realization={realization_status(t)}")
    return _emit([report], args.format)


# --- validate / classify / symmetry ----------------------------------------------


def _load_annulus(report: _FileReport):
    try:
        ad = parse_annulus(_read(report.path))
    except StructureError as err:
        report.fail(EXIT_STRUCTURE, f"{report.path}: {err}")
        return None
    problems = validate_labels(ad)
    report.data["violations"] = [
        {"code": v.code, "message": v.message} for v in problems
    ]
    if problems:
        report.code = max(report.code, EXIT_VIOLATION)
        for v in problems:
            report.say(f"{report.path}: violation [{v.code}] {v.message}")
        return None
    return ad


def _validate_worker(path: str) -> _FileReport:
    report = _FileReport(path)
    ad = _load_annulus(report)
    if ad is not None:
        t = classify_type(ad.base)
        report.data["type"] = str(t)
        report.say(f"{path}: ok, type {t}")
    return report


def _classify_worker(path: str) -> _FileReport:
    report = _FileReport(path)
    ad = _load_annulus(report)
    if ad is None:
        return report
    t = classify_type(ad.base)
    report.data["type"] = str(t)
    report.data["realization"] = realization_status(t)
    report.say(f"{path}: type {t}")
    report.say(f"realization: {realization_status(t)}")
    facts = derived_facts(ad)
    report.data["facts"] = [
        {"code": f.code, "text": f.text, "provenance": f.provenance} for f in facts
    ]
    for f in facts:
        report.say(f"  [{f.provenance}] {f.text}")
    return report


def _symmetry_worker(path: str) -> _FileReport:
    report = _FileReport(path)
    ad = _load_annulus(report)
    if ad is None:
        return report
    bounds = symmetry_bounds(ad)
    if bounds is None:
        report.data["bounds"] = None
        report.say(f"{path}: no bound derived")
        return report
    report.data["bounds"] = {
        "sym_plus": bounds.sym_plus.value,
        "sym": bounds.sym.value,
        "exact": bounds.exact,
    }
    report.say(f"{path}:")
    report.say(f"  sym+ {bounds.sym_plus.value}")
    report.say(f"  sym  {bounds.sym.value}")
    report.say(f"  exact: {'yes' if bounds.exact else 'no'}")
    return report


# --- loop / family ----------------------------------------------------------------


def _write_code(g, out: str | None, fmt: str) -> None:
    text = format_code(g)
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}")
    elif fmt == "json":
        print(json.dumps({"code": text}))
    else:
        sys.stdout.write(text)


def _cmd_loop(args) -> int:
    try:
        g = parse_code(_read(args.file))
        tokens = args.pair.split(",")
        if len(tokens) != 2:
            raise StructureError("--pair needs two comma-separated edge ends")
        pair = (
            resolve_end(g, args.vertex, tokens[0].strip()),
            resolve_end(g, args.vertex, tokens[1].strip()),
        )
        kind = looping_kind(g, pair, args.tunnel)
        result = loop_at(g, args.vertex, pair, kind=kind, mirror=args.mirror)
    except StructureError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_STRUCTURE
    except (ContradictionError, ValueError) as err:
        print(f"rejected: {err}", file=sys.stderr)
        return EXIT_VIOLATION
    _write_code(result, args.out, args.format)
    return EXIT_OK


def _data_text(name: str) -> str:
    override = os.environ.get("HKDIAG_DATA")
    if override:
        candidate = Path(override) / name
        if candidate.exists():
            return candidate.read_text()
    return resources.files("hkdiag").joinpath("data", name).read_text()


def _cmd_family(args) -> int:
    try:
        if args.name == "torus-link":
            if args.n is None:
                raise StructureError("torus-link needs --n")
            g = family_torus_link(args.n, tunnel=args.tunnel, mirror=args.mirror)
        elif args.name == "odd-ringed":
            if args.n is None:
                raise StructureError("odd-ringed needs --n")
            g = family_odd_ringed(args.n, ring=args.ring, mirror=args.mirror)
        else:
            g = parse_code(_data_text("spine_5_2.txt"))
            if args.mirror:
                g = mirror_code(g)
    except StructureError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_STRUCTURE
    _write_code(g, args.out, args.format)
    return EXIT_OK


# --- linking ----------------------------------------------------------------------


def _cmd_linking(args) -> int:
    report = _FileReport(args.file)
    try:
        g = parse_code(_read(args.file))
        names = [t.strip() for t in args.components.split(",")]
        if len(names) != 2:
            raise StructureError("--components needs two comma-separated names")
        if g.kind == "link":
            link = g
        elif g.kind == "handcuff":
            (link,) = constituent_links(g)
        else:
            report.fail(EXIT_VIOLATION,
                        f"{args.file}: a theta-curve has knot constituents, no linking number")
            return _emit([report], args.format)
        lk = linking_number(link, names[0], names[1])
    except StructureError as err:
        report.fail(EXIT_STRUCTURE, f"{args.file}: {err}")
        return _emit([report], args.format)
    report.data["linking_number"] = lk
    ok = type_three_two_linking_test(lk)
    report.data["mixed_type_annulus_possible"] = ok
    report.say(f"lk({names[0]}, {names[1]}) = {lk}")
    report.say("mixed-type annulus obstruction: "
               + ("satisfied" if ok else "violated (linking number is a unit)"))
    return _emit([report], args.format)


# --- analyze ----------------------------------------------------------------------


def _parse_assertion(token: str, facts: FactSet) -> None:
    key, eq, value = token.partition("=")
    if not eq:
        raise StructureError(f"assertion {token!r} needs key=value")
    if key in _BOOL_FACTS:
        if value not in ("true", "false"):
            raise StructureError(f"assertion {key} needs true or false")
        facts.set(key, value == "true")
    elif key in _EDGE_FACTS:
        facts.set(key, value)
    elif key == "trivial-knot":
        facts.set(f"knot-trivial:{value}", True)
    elif key == "nontrivial-knot":
        facts.set(f"knot-trivial:{value}", False)
    else:
        raise StructureError(f"unknown assertion key {key!r}")


def _diagram_summary(ad) -> str:
    t = classify_type(ad.base)
    kinds = ", ".join(str(lab) for lab in ad.labels)
    return f"{t} labels {{{kinds}}}"


def _analyze_worker(path: str, assertions: tuple[str, ...]) -> _FileReport:
    report = _FileReport(path)
    try:
        g = parse_code(_read(path))
    except StructureError as err:
        report.fail(EXIT_STRUCTURE, f"{path}: {err}")
        return report

    report.data["kind"] = g.kind
    report.say(f"file: {path}")
    report.say(f"kind: {g.kind}, {len(g.edges)} edges, {len(g.crossings)} crossings")
    if g.provenance is not None:
        summary = " ".join(f"{k}={v}" for k, v in _prov_items(g.provenance))
        report.data["provenance"] = dict(_prov_items(g.provenance))
        report.say(f"provenance: {summary}")

    problems = validate_code(g)
    report.data["violations"] = [{"code": v.code, "message": v.message} for v in problems]
    if problems:
        report.code = EXIT_VIOLATION
        for v in problems:
            report.say(f"violation [{v.code}] {v.message}")
        return report

    facts = FactSet()
    try:
        for token in assertions:
            _parse_assertion(token, facts)
    except StructureError as err:
        report.fail(EXIT_STRUCTURE, f"{path}: {err}")
        return report
    except ContradictionError as err:
        report.fail(EXIT_VIOLATION, f"contradiction: {err}")
        return report

    try:
        if g.kind in ("theta", "handcuff"):
            attach_evidence(g, facts)
    except ContradictionError as err:
        report.fail(EXIT_VIOLATION, f"contradiction: {err}")
        return report

    report.say("constituents:")
    constituents = []
    for piece in constituent_links(g):
        if len(piece.edges) == 1:
            name = piece.edges[0].id
            delta = alexander_polynomial(piece)
            constituents.append({"component": name, "alexander": str(delta)})
            report.say(f"  knot {name}: alexander {delta}")
        else:
            a, b = (e.id for e in piece.edges)
            lk = linking_number(piece, a, b)
            constituents.append({"components": [a, b], "linking_number": lk})
            report.say(f"  link {{{a}, {b}}}: lk = {lk}")
    report.data["constituents"] = constituents

    group, mm = h1_complement(g)
    report.data["homology"] = {
        "group": str(group),
        "meridians": {e.id: list(mm.edge_class(e.id).coords) for e in g.edges},
    }
    report.say(f"homology of the complement: {group}")
    for e in g.edges:
        report.say(f"  meridian {e.id} -> {mm.edge_class(e.id).coords}")

    if facts.entries():
        report.say("facts:")
        for entry in facts.entries():
            report.say(f"  [{entry.provenance}] {entry.key} = {entry.value}")

    classification = None
    if g.kind in ("theta", "handcuff"):
        try:
            classification = classify_atoroidal(g, facts)
        except ContradictionError as err:
            report.fail(EXIT_VIOLATION, f"contradiction: {err}")
            return report
        if isinstance(classification, GraphClass):
            report.data["class"] = classification.code
            report.say(f"class: {classification.code} ({classification.description})")
            transition = looping_transition(classification)
            targets = " or ".join(t.code for t in transition.targets)
            report.data["looping_targets"] = [t.code for t in transition.targets]
            report.say(f"looping lands in: {targets}")
            if transition.note:
                report.say(f"  note: {transition.note}")
        else:
            assert isinstance(classification, Unclassified)
            report.data["class"] = None
            report.data["unclassified"] = {
                "reason": classification.reason,
                "needed": list(classification.needed),
            }
            report.say(f"unclassified: {classification.reason}")
        if g.kind == "handcuff":
            report.data["bridge"] = bridge_of(g).id

    report.data["facts"] = [
        {"key": e.key, "value": e.value, "provenance": e.provenance}
        for e in facts.entries()
    ]

    if g.provenance is not None and g.provenance.origin == "looping":
        prediction = predicted_annulus(g, facts)
        pdata = {
            "annulus_type": prediction.annulus_type,
            "annulus_count": prediction.annulus_count,
            "unknotting": prediction.unknotting,
            "exterior_irreducible_atoroidal": prediction.exterior_irreducible_atoroidal,
            "unique": prediction.unique,
            "diagram": _diagram_summary(prediction.diagram) if prediction.diagram else None,
            "notes": list(prediction.notes),
        }
        report.data["prediction"] = pdata
        report.say("ring annulus prediction:")
        report.say(f"  type: {prediction.annulus_type}, count: {prediction.annulus_count}")

        def show(flag):
            return {True: "yes", False: "no", None: "unknown"}[flag]

        report.say(f"  unknotting: {show(prediction.unknotting)}")
        report.say("  exterior irreducible and atoroidal: "
                   f"{show(prediction.exterior_irreducible_atoroidal)}")
        report.say(f"  unique of its type: {show(prediction.unique)}")
        if prediction.diagram is not None:
            report.say(f"  diagram: {_diagram_summary(prediction.diagram)}")
        for note in prediction.notes:
            report.say(f"  note: {note}")
    return report


# --- parser -----------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hkdiag",
        description="annulus diagrams, loopings and homology bounds "
                    "for genus-2 handlebody-knots",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text",
                        help="output format (default text)")
    multi = argparse.ArgumentParser(add_help=False)
    multi.add_argument("--jobs", type=int, default=1,
                       help="process files concurrently")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common],
                       help="list the valid diagram classes")
    p.add_argument("--labels", action="store_true",
                   help="list the labeled catalog instead of the bare classes")
    p.add_argument("--drop-bigon-rule", action="store_true",
                   help="skip the single-bigon exclusion to see what it removes")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("validate", parents=[common, multi],
                       help="check diagram files against the constraints")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=lambda args: _run_per_file(
        args.files, _validate_worker, args.jobs, args.format))

    p = sub.add_parser("classify", parents=[common, multi],
                       help="type, realization and derived facts of diagrams")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=lambda args: _run_per_file(
        args.files, _classify_worker, args.jobs, args.format))

    p = sub.add_parser("symmetry", parents=[common, multi],
                       help="symmetry-group bounds from the label table")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=lambda args: _run_per_file(
        args.files, _symmetry_worker, args.jobs, args.format))

    p = sub.add_parser("loop", parents=[common],
                       help="loop a graph code at a vertex")
    p.add_argument("file")
    p.add_argument("--vertex", required=True)
    p.add_argument("--pair", required=True,
                   help="two edge ends to splice, e.g. a,b or k.0,t")
    p.add_argument("--tunnel", default=None,
                   help="designated tunnel edge, to name the looping kind")
    p.add_argument("--mirror", action="store_true",
                   help="reverse the handedness of the new ring")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=_cmd_loop)

    p = sub.add_parser("family", parents=[common],
                       help="emit a member of a built-in family")
    p.add_argument("name", choices=("torus-link", "odd-ringed", "spine-5-2"))
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--tunnel", action="store_true",
                   help="torus-link: join the components with a tunnel")
    p.add_argument("--ring", choices=("one", "both"), default="one",
                   help="odd-ringed: how many strands the ring encircles")
    p.add_argument("--mirror", action="store_true")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("linking", parents=[common],
                       help="linking number of two components")
    p.add_argument("file")
    p.add_argument("--components", required=True, help="two names, e.g. a,b")
    p.set_defaults(func=_cmd_linking)

    p = sub.add_parser("analyze", parents=[common, multi],
                       help="full report on a graph code")
    p.add_argument("files", nargs="+")
    p.add_argument("--assert", dest="assertions", action="append", default=[],
                   metavar="KEY=VALUE",
                   help="facts about the looping source: atoroidal, planar, "
                        "split, trivial-link, tunnel=<edge>, knotting-arc=<edge>, "
                        "trivial-knot=<comp>, nontrivial-knot=<comp>")
    p.set_defaults(func=lambda args: _run_per_file(
        args.files,
        lambda path: _analyze_worker(path, tuple(args.assertions)),
        args.jobs, args.format))

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
