"""Command line interface: ``glc <command> ...`` (or ``python -m glc``).

Exit codes: 0 for a certified positive verdict, 1 for a certified
negative one, 2 when undetermined, 3 for usage, input or validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .circuits import cycle_decomposition
from .embed import build_embedding, freudenthal_truncations, trace_to_dot
from .errors import (
    ConstructionInvariantViolated,
    GLCError,
    InvalidSystem,
    NoOddCut,
    OddCutPresent,
    PreconditionViolated,
    TooLarge,
)
from .euler import (
    CLOSED,
    GROWING,
    OPEN,
    STABILIZED,
    count_euler,
    dichotomy_probe,
    euler_chain,
    is_closed_eulerian,
    is_open_eulerian,
)
from .generators import KINDS, NAMED_GRAPHS, GeneratorSpec, generate, named_graph
from .menger import menger
from .multigraph import graph_to_dot
from .parity import (
    EVEN_CERTIFIED,
    NEITHER_CERTIFIED,
    ODD_CERTIFIED,
    STRONGLY_EVEN,
    STRONGLY_ODD,
    UNSTABLE,
    strong_degree,
    vertex_parity,
)
from .prosys import CylinderSet, system_digest, system_from_json, system_to_json, validate
from .regions import contraction_machine, make_region, minimal_odd_region, odd_region_chase

OK, NEGATIVE, UNDETERMINED, ERROR = 0, 1, 2, 3

DECISION_DEPTH = 5
ENUMERATION_DEPTH = 3


class UsageError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def render_text(obj, prefix: str = "") -> list:
    """One ``key: value`` line per leaf, keys joined with dots."""
    if isinstance(obj, dict):
        if not obj:
            return [f"{prefix}: {{}}"] if prefix else []
        lines = []
        for k in sorted(obj, key=str):
            lines += render_text(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return lines
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        lines = []
        for i, x in enumerate(obj):
            lines += render_text(x, f"{prefix}[{i}]")
        return lines or [f"{prefix}: []"]
    return [f"{prefix}: {json.dumps(obj, sort_keys=True)}"]


def parse_cells(text: str) -> CylinderSet:
    level, sep, cells = text.partition(":")
    if not sep or not level.strip().isdigit() or not cells.strip():
        raise UsageError(f"expected LEVEL:CELL,CELL,... but got {text!r}")
    return CylinderSet(int(level), frozenset(c.strip() for c in cells.split(",") if c.strip()))


def load_system(path: str, check: bool = True):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        system = system_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed system: {exc}") from None
    if check:
        report = validate(system)
        if not report.valid:
            raise InvalidSystem(f"{path}: invalid system", report)
    return system


def summary(system) -> dict:
    return {
        "digest": system_digest(system),
        "levels": [{"vertices": len(g.vertices), "edges": len(g.edges)} for g in system.levels],
    }


def pick_depth(args, system, default: int) -> int:
    d = min(default, system.depth) if args.depth is None else args.depth
    if not 0 <= d <= system.depth:
        raise UsageError(f"--depth must lie in 0..{system.depth}")
    return d


def cmd_generate(args):
    if args.base and args.kind != "constant":
        raise UsageError("--base only applies to the constant kind")
    spec = GeneratorSpec(args.kind, args.depth if args.depth is not None else DECISION_DEPTH,
                         pattern=args.pattern, seed=args.seed,
                         base=named_graph(args.base) if args.base else None)
    system = generate(spec)
    return OK, {"system": summary(system), "kind": args.kind}, dumps(system_to_json(system))


def cmd_validate(args):
    system = load_system(args.system, check=False)
    report = validate(system)
    return (OK if report.valid else NEGATIVE), {"system": summary(system), "report": report.to_json()}, None


def cmd_euler(args):
    system = load_system(args.system)
    out = {"system": summary(system)}
    if args.count or args.probe:
        d = pick_depth(args, system, ENUMERATION_DEPTH)
        out["depth"] = d
        if args.probe:
            probe = dichotomy_probe(system, d)
            out["probe"] = probe.to_json()
            return (OK if probe.status in (STABILIZED, GROWING) else UNDETERMINED), out, None
        report = count_euler(system, d, cap=args.cap)
        out["counts"] = report.to_json()
        return OK, out, None
    d = pick_depth(args, system, DECISION_DEPTH)
    out["depth"] = d
    verdict = is_open_eulerian(system, d) if args.open else is_closed_eulerian(system, d)
    out["verdict"] = verdict.to_json()
    if args.chain and verdict.status == CLOSED:
        out["chain"] = [{"root": c.root, "edges": list(c.edges)} for c in euler_chain(system, d).circuits]
    if verdict.status in (CLOSED, OPEN):
        return OK, out, None
    return (NEGATIVE if verdict.status.startswith("Not") else UNDETERMINED), out, None


def cmd_parity(args):
    system = load_system(args.system)
    d = pick_depth(args, system, DECISION_DEPTH)
    out = {"system": summary(system), "depth": d, "thread": args.thread}
    if args.strong:
        v = strong_degree(system, args.thread, d, window=args.window)
        out["strong"] = v.to_json()
        code = {STRONGLY_EVEN: OK, STRONGLY_ODD: OK, UNSTABLE: NEGATIVE}.get(v.status, UNDETERMINED)
        return code, out, None
    v = vertex_parity(system, args.thread, d)
    out["verdict"] = v.to_json()
    code = {EVEN_CERTIFIED: OK, ODD_CERTIFIED: OK, NEITHER_CERTIFIED: NEGATIVE}.get(v.status, UNDETERMINED)
    return code, out, None


def cmd_regions(args):
    system = load_system(args.system)
    d = pick_depth(args, system, DECISION_DEPTH)
    out = {"system": summary(system), "depth": d}
    if args.machine:
        if not args.u or args.m is None:
            raise UsageError("--machine needs --u LEVEL:CELLS and --m K")
        c = parse_cells(args.u)
        u = make_region(system, c.level, c.cells)
        try:
            report = contraction_machine(system, u, args.m, d, infinite_threshold=args.threshold)
        except PreconditionViolated as exc:
            w = exc.witness
            out["precondition"] = {"message": str(exc), "witness": sorted(w) if isinstance(w, frozenset) else w}
            return NEGATIVE, out, None
        out["machine"] = report.to_json()
        return (OK if all(report.checks.values()) else NEGATIVE), out, None
    if args.chase:
        try:
            chase = odd_region_chase(system, d)
        except NoOddCut as exc:
            out["chase"] = {"odd": False, "reason": str(exc)}
            return NEGATIVE, out, None
        out["chase"] = chase.to_json()
        return (OK if all(chase.conditions().values()) else NEGATIVE), out, None
    rows = []
    for n in range(d + 1):
        try:
            r = minimal_odd_region(system, n)
            rows.append(r.to_json() if r else None)
        except TooLarge:
            rows.append("too large")
    out["minimal_odd_regions"] = rows
    return OK, out, None


def cmd_menger(args):
    system = load_system(args.system)
    if not args.a or not args.b:
        raise UsageError("menger needs --a and --b")
    a, b = parse_cells(args.a), parse_cells(args.b)
    d = pick_depth(args, system, DECISION_DEPTH)
    w = menger(system, a, b, max(d, a.level, b.level))
    return (OK if w.projections_ok else NEGATIVE), {"system": summary(system), "menger": w.to_json()}, None


def cmd_decompose(args):
    system = load_system(args.system)
    d = pick_depth(args, system, DECISION_DEPTH)
    level = d if args.level is None else args.level
    if not 0 <= level <= system.depth:
        raise UsageError(f"--level must lie in 0..{system.depth}")
    out = {"system": summary(system), "level": level}
    try:
        cycles = cycle_decomposition(system.levels[level])
    except OddCutPresent as exc:
        out["odd_vertices"] = sorted(exc.vertices)
        return NEGATIVE, out, None
    out["cycles"] = [{"root": c.root, "edges": list(c.edges)} for c in cycles]
    return OK, out, None


def cmd_embed(args):
    system = load_system(args.system)
    d = pick_depth(args, system, ENUMERATION_DEPTH)
    out = {"system": summary(system), "depth": d}
    try:
        trace = build_embedding(system, d)
        truncations = freudenthal_truncations(trace) if trace.truncations else None
    except ConstructionInvariantViolated as exc:
        out["violation"] = {"step": exc.step, "check": exc.check, "detail": str(exc.detail)}
        return NEGATIVE, out, None
    out["checks"] = trace.checks()
    out["F_sizes"] = [{"vertices": len(s.F.vertices), "edges": len(s.F.edges)} for s in trace.steps]
    if truncations is not None:
        out["truncations"] = summary(truncations)
    if args.dot is not None:
        if not 0 <= args.dot <= d:
            raise UsageError(f"--dot must lie in 0..{d}")
        return OK, out, trace_to_dot(trace, args.dot)
    return OK, out, dumps(trace.to_json())


def cmd_export(args):
    system = load_system(args.system)
    out = {"system": summary(system)}
    if args.to == "json":
        return OK, out, dumps(system_to_json(system))
    level = system.depth if args.level is None else args.level
    if not 0 <= level <= system.depth:
        raise UsageError(f"--level must lie in 0..{system.depth}")
    return OK, out, graph_to_dot(system.levels[level], f"G{level}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int)
    common.add_argument("--cap", type=int, default=10**6)
    common.add_argument("--seed", type=int)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("-o", "--output")

    p = argparse.ArgumentParser(prog="glc", description="Inverse systems of multigraphs: Euler, parity, regions, Menger, embedding.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="build a named example system")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("--pattern")
    g.add_argument("--base", choices=sorted(NAMED_GRAPHS))
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", parents=[common], help="check bonds and levels")
    v.add_argument("system")
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("euler", parents=[common], help="Euler decisions, chains, counts")
    e.add_argument("system")
    e.add_argument("--open", action="store_true")
    e.add_argument("--chain", action="store_true")
    e.add_argument("--count", action="store_true")
    e.add_argument("--probe", action="store_true")
    e.set_defaults(func=cmd_euler)

    pa = sub.add_parser("parity", parents=[common], help="parity of the end picked by a thread")
    pa.add_argument("system")
    pa.add_argument("--thread", required=True)
    pa.add_argument("--strong", action="store_true")
    pa.add_argument("--window", type=int, default=3)
    pa.set_defaults(func=cmd_parity)

    r = sub.add_parser("regions", parents=[common], help="odd regions, chase and contraction machine")
    r.add_argument("system")
    r.add_argument("--chase", action="store_true")
    r.add_argument("--machine", action="store_true")
    r.add_argument("--u")
    r.add_argument("--m", type=int)
    r.add_argument("--threshold", type=int, default=8)
    r.set_defaults(func=cmd_regions)

    m = sub.add_parser("menger", parents=[common], help="edge-disjoint arcs between cylinders")
    m.add_argument("system")
    m.add_argument("--a")
    m.add_argument("--b")
    m.set_defaults(func=cmd_menger)

    dc = sub.add_parser("decompose", parents=[common], help="cycle decomposition of one level")
    dc.add_argument("system")
    dc.add_argument("--level", type=int)
    dc.set_defaults(func=cmd_decompose)

    em = sub.add_parser("embed", parents=[common], help="embedding trace and its structural checks")
    em.add_argument("system")
    em.add_argument("--dot", type=int, metavar="N", help="write H_N as DOT instead of the JSON trace")
    em.set_defaults(func=cmd_embed)

    ex = sub.add_parser("export", parents=[common], help="re-emit as canonical JSON or one level as DOT")
    ex.add_argument("system")
    ex.add_argument("--to", choices=("json", "dot"), default="json")
    ex.add_argument("--level", type=int)
    ex.set_defaults(func=cmd_export)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else ERROR
    echo = ["glc"] + list(sys.argv[1:] if argv is None else argv)
    try:
        code, report, artifact = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return ERROR
    except InvalidSystem as exc:
        print(f"error: {exc}", file=stderr)
        if getattr(exc, "report", None) is not None:
            stderr.write(dumps(exc.report.to_json()))
        return ERROR
    except TooLarge as exc:
        print(f"undetermined: {exc}", file=stderr)
        return UNDETERMINED
    except GLCError as exc:
        print(f"error: {exc}", file=stderr)
        return ERROR
    report = {"command": echo, **report}
    if args.seed is not None:
        report["seed"] = args.seed
    text = dumps(report) if args.format == "json" else "\n".join(render_text(report)) + "\n"
    if artifact is not None:
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(artifact)
            stdout.write(text)
        else:
            stdout.write(artifact)
    elif args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
