"""``catflow`` command-line interface.

Exit codes: 0 success, 1 domain error, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import warnings
from typing import List, Optional

from . import io as mio
from .acset import ACSet, Homomorphism, validate, write_tables
from .composition import compose_open, correspondence_by_names
from .errors import CatflowError, ModelFormatError
from .homs import SearchOptions, find_homomorphisms
from .schemas import NAME_ATTR, SchSFD, SchSSD
from .semantics.ode import compile_odes, integrate_euler, integrate_rk4
from .semantics.ssa import DiscreteState, simulate_replicates, simulate_ssa
from .signed import (
    SignedGraph,
    enumerate_implied_links,
    find_feedback_loops,
    loops_report,
    match_signed_pattern,
    to_dot,
)
from .stratification import TypedDiagram, pullback
from .translation import sfd_to_cld, sfd_to_ssd, ssd_to_cld


class UsageError(Exception):
    pass


class Report:
    """What a command read, wrote and warned about (``--json``)."""

    def __init__(self, command: str):
        self.command = command
        self.inputs: List[str] = []
        self.outputs: List[str] = []
        self.warnings: List[str] = []
        self.result = None
        self.started = time.perf_counter()

    def as_json(self, status: int, error: Optional[str] = None) -> dict:
        out = {
            "command": self.command,
            "status": status,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "warnings": self.warnings,
            "elapsed_s": round(time.perf_counter() - self.started, 6),
        }
        if self.result is not None:
            out["result"] = self.result
        if error is not None:
            out["error"] = error
        return out


def _color_enabled(stream) -> bool:
    env = os.environ.get("CATFLOW_COLOR")
    if env is not None:
        return env.strip() == "1"
    return hasattr(stream, "isatty") and stream.isatty()


def _diag(kind: str, msg: str) -> None:
    color = {"error": "31", "warning": "33"}[kind]
    label = f"\x1b[{color}m{kind}\x1b[0m" if _color_enabled(sys.stderr) else kind
    print(f"{label}: {msg}", file=sys.stderr)


def _load(rep: Report, path: str, kinds=None) -> mio.ModelFile:
    rep.inputs.append(path)
    mf = mio.load(path)
    if kinds and mf.kind not in kinds:
        raise UsageError(f"{path}: expected {' or '.join(kinds)}, got {mf.kind}")
    return mf


def _emit_text(text: str, out: Optional[str], rep: Report) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        rep.outputs.append(out)
    elif not rep.quiet:
        sys.stdout.write(text)


def _emit_model(body, out: Optional[str], rep: Report, provenance=None) -> None:
    _emit_text(mio.dumps(mio.ModelFile(mio.model_kind(body), body, provenance)), out, rep)


def _diagram(mf: mio.ModelFile) -> ACSet:
    if mf.kind in mio.DIAGRAM_KINDS:
        return mf.body
    if mf.kind in mio.OPEN_KINDS:
        return mf.body.apex
    raise UsageError(f"expected a diagram, got {mf.kind}")


def _as_cld(inst: ACSet) -> ACSet:
    if inst.schema == SchSFD:
        return sfd_to_cld(inst)[0]
    if inst.schema == SchSSD:
        return ssd_to_cld(inst)[0]
    return inst


# -- commands --------------------------------------------------------------------

def cmd_validate(args, rep: Report) -> int:
    mf = _load(rep, args.model)
    problems = []
    if mf.kind in mio.DIAGRAM_KINDS:
        problems = [str(v) for v in validate(mf.body)]
    elif mf.kind in mio.OPEN_KINDS:
        od = mf.body
        problems = [f"apex: {v}" for v in validate(od.apex)]
        for k, foot in enumerate(od.feet):
            problems += [f"foot {k}: {v}" for v in validate(foot)]
        if not problems:
            try:
                od.check()
            except CatflowError as exc:
                problems.append(str(exc))
    rep.result = {"kind": mf.kind, "violations": problems}
    for p in problems:
        _diag("error", p)
    if not rep.quiet:
        print("ok" if not problems else f"{len(problems)} violation(s)")
    return 0 if not problems else 1


def cmd_compose(args, rep: Report) -> int:
    left = _load(rep, args.left, mio.OPEN_KINDS).body
    right = _load(rep, args.right, mio.OPEN_KINDS).body
    kl, kr = args.foot_left, args.foot_right
    for od, k, side in ((left, kl, "left"), (right, kr, "right")):
        if not 0 <= k < len(od.feet):
            raise UsageError(f"{side} diagram has no foot {k}")
    lf, rf = left.feet[kl], right.feet[kr]
    if lf.schema != rf.schema:
        raise UsageError("the two feet are on different interface schemas")
    if args.match_by_name:
        corr = correspondence_by_names(lf, rf)
    elif args.correspondence:
        comps = _load(rep, args.correspondence, ("typing",)).body
        corr = Homomorphism(lf, rf, comps)
    else:
        raise UsageError("give --correspondence FILE or --match-by-name")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        od, notes = compose_open(left, right, kl, kr, corr)
    rep.warnings += notes
    for n in notes:
        _diag("warning", n)
    res_counts = {ob: n for ob, n in od.apex.counts().items() if n}
    rep.result = {"counts": res_counts}
    _emit_model(od, args.out, rep, provenance={"operation": "compose", "inputs": [os.path.basename(args.left), os.path.basename(args.right)]})
    return 0


def _typed(rep, path, diagram, type_diagram, auto) -> TypedDiagram:
    if auto:
        return TypedDiagram.auto(diagram, type_diagram)
    comps = _load(rep, path, ("typing",)).body
    td = TypedDiagram(diagram, type_diagram, Homomorphism(diagram, type_diagram, comps))
    td.check()
    return td


def cmd_stratify(args, rep: Report) -> int:
    agg = _diagram(_load(rep, args.aggregate))
    strata = _diagram(_load(rep, args.strata))
    typ = _diagram(_load(rep, args.type))
    if not args.auto_type and not (args.typing_aggregate and args.typing_strata):
        raise UsageError("give --auto-type or both --typing-aggregate and --typing-strata")
    ta = _typed(rep, args.typing_aggregate, agg, typ, args.auto_type)
    ts = _typed(rep, args.typing_strata, strata, typ, args.auto_type)
    res = pullback(ta, ts)
    rep.result = {"counts": {ob: n for ob, n in res.stratified.counts().items() if n}}
    prov = {
        "operation": "stratify",
        "p1": {ob: list(c) for ob, c in res.p1.components.items()},
        "p2": {ob: list(c) for ob, c in res.p2.components.items()},
    }
    _emit_model(res.stratified, args.out, rep, provenance=prov)
    return 0


def cmd_translate(args, rep: Report) -> int:
    inst = _diagram(_load(rep, args.model))
    prov = None
    if args.to == "ssd":
        if inst.schema != SchSFD:
            raise UsageError("only stock & flow diagrams translate to ssd")
        out = sfd_to_ssd(inst)
    else:
        if inst.schema == SchSFD:
            out, wit = sfd_to_cld(inst)
        elif inst.schema == SchSSD:
            out, wit = ssd_to_cld(inst)
        else:
            raise UsageError("model is already a causal loop diagram")
        prov = {"operation": "translate", "witness": wit.to_json()}
    rep.result = {"counts": {ob: n for ob, n in out.counts().items() if n}}
    _emit_model(out, args.out, rep, provenance=prov)
    return 0


def cmd_simulate(args, rep: Report) -> int:
    inst = _diagram(_load(rep, args.model, ("sfd", "open-sfd")))
    scen = _load(rep, args.scenario, ("scenario",)).body
    if args.method == "ssa":
        if args.seed is None:
            raise UsageError("--method ssa requires --seed")
        counts = {}
        for name, v in scen.stocks.items():
            if v != int(v):
                raise CatflowError(f"stock {name!r} needs an integer initial count for ssa")
            counts[name] = int(v)
        init = DiscreteState(counts, scen.params, scen.t0)
        if args.replicates > 1:
            logs = simulate_replicates(inst, init, scen.tf, args.seed, args.replicates, args.threads)
            stocks = logs[0].stock_names
            lines = [",".join(["replicate", "seed", "events"] + stocks)]
            for k, log in enumerate(logs):
                fin = log.final()
                lines.append(",".join([str(k), str(args.seed + k), str(len(log))] + [str(fin[s]) for s in stocks]))
            text = "\n".join(lines) + "\n"
            rep.result = {"replicates": len(logs)}
        else:
            log = simulate_ssa(inst, init, scen.tf, args.seed)
            text = log.to_csv()
            rep.result = {"events": len(log), "final": log.final()}
    else:
        if args.replicates != 1:
            raise UsageError("--replicates applies to --method ssa only")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            system = compile_odes(inst)
        for w in caught:
            rep.warnings.append(str(w.message))
            _diag("warning", str(w.message))
        traj = (integrate_rk4 if args.method == "rk4" else integrate_euler)(system, scen)
        text = traj.to_csv()
        rep.result = {"steps": len(traj.times) - 1, "final": traj.final()}
    _emit_text(text, args.out, rep)
    return 0


def _named_map(h: Homomorphism) -> dict:
    out = {}
    src, tgt = h.source, h.target
    for ob, attr in NAME_ATTR.items():
        if ob not in src.schema.objects:
            continue
        for i, j in enumerate(h.components[ob], start=1):
            out[str(src.subpart(i, attr))] = str(tgt.subpart(j, attr))
    return out


def cmd_find(args, rep: Report) -> int:
    inst = _diagram(_load(rep, args.model))
    if args.loops is not None:
        g = SignedGraph.from_cld(_as_cld(inst))
        want = {"+": "+", "-": "-", "any": None}[args.loops]
        loops = find_feedback_loops(g, want, args.max_len)
        rep.result = {"loops": loops_report(g, loops)}
    elif args.pattern:
        pat = _diagram(_load(rep, args.pattern))
        if args.max_path_len is not None:
            pg = SignedGraph.from_cld(_as_cld(pat))
            tg = SignedGraph.from_cld(_as_cld(inst))
            pins = {}
            for spec in args.pin:
                pv, _, tv = spec.partition("=")
                if pv not in pg.vertices or tv not in tg.vertices:
                    raise UsageError(f"--pin {spec!r}: unknown vertex")
                pins[pg.vertices.index(pv)] = tg.vertices.index(tv)
            ms = match_signed_pattern(pg, tg, args.max_path_len, injective=args.injective, pins=pins)
            rep.result = {
                "matches": [
                    {
                        "vertices": {pg.vertices[i]: tg.vertices[v] for i, v in enumerate(m.vertex_map)},
                        "paths": [[tg.vertices[tg.edges[p[0]][0]]] + [tg.vertices[tg.edges[e][1]] for e in p] for p in m.edge_paths],
                    }
                    for m in ms
                ]
            }
        else:
            if pat.schema != inst.schema:
                raise UsageError("pattern and model are different diagram kinds")
            opts = SearchOptions(monic=not args.no_monic)
            hs = find_homomorphisms(pat, inst, opts)
            rep.result = {
                "matches": [
                    {"named": _named_map(h), "components": {ob: list(c) for ob, c in h.components.items() if c}}
                    for h in hs
                ]
            }
    else:
        raise UsageError("give --pattern FILE or --loops +|-|any")
    _emit_text(json.dumps(rep.result, indent=2, ensure_ascii=False) + "\n", args.out, rep)
    return 0


def cmd_export(args, rep: Report) -> int:
    inst = _diagram(_load(rep, args.model))
    if args.tables:
        paths = write_tables(inst, args.tables)
        rep.outputs += paths
        rep.result = {"tables": [os.path.basename(p) for p in paths]}
        return 0
    g = SignedGraph.from_cld(_as_cld(inst))
    implied = enumerate_implied_links(g, args.max_len) if args.implied else ()
    loops = find_feedback_loops(g, None, args.max_len) if args.loops else ()
    _emit_text(to_dot(g, implied, loops), args.out, rep)
    return 0


# -- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catflow", description="System dynamics diagrams as attributed C-sets.")
    p.add_argument("--json", action="store_true", help="print a machine-readable run report on stdout")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)

    v = sub.add_parser("validate", parents=[common], help="check a model file")
    v.add_argument("model")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("compose", parents=[common], help="glue two open diagrams along a foot")
    c.add_argument("left")
    c.add_argument("right")
    c.add_argument("--foot-left", type=int, required=True, help="0-based foot index of the left diagram")
    c.add_argument("--foot-right", type=int, required=True, help="0-based foot index of the right diagram")
    c.add_argument("--correspondence", help="typing file mapping the left foot onto the right foot")
    c.add_argument("--match-by-name", action="store_true", help="pair foot parts by name")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compose)

    s = sub.add_parser("stratify", parents=[common], help="pullback of two typed diagrams")
    s.add_argument("aggregate")
    s.add_argument("strata")
    s.add_argument("type")
    s.add_argument("--typing-aggregate")
    s.add_argument("--typing-strata")
    s.add_argument("--auto-type", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_stratify)

    t = sub.add_parser("translate", parents=[common], help="sfd -> ssd -> cld")
    t.add_argument("model")
    t.add_argument("--to", choices=("ssd", "cld"), required=True)
    t.add_argument("--out")
    t.set_defaults(func=cmd_translate)

    m = sub.add_parser("simulate", parents=[common], help="integrate or sample a stock & flow diagram")
    m.add_argument("model")
    m.add_argument("scenario")
    m.add_argument("--method", choices=("rk4", "euler", "ssa"), default="rk4")
    m.add_argument("--seed", type=int)
    m.add_argument("--replicates", type=int, default=1)
    m.add_argument("--threads", type=int, default=1)
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)

    f = sub.add_parser("find", parents=[common], help="pattern matches or feedback loops")
    f.add_argument("model")
    f.add_argument("--pattern")
    f.add_argument("--loops", choices=("+", "-", "any"))
    f.add_argument("--max-len", type=int, default=8)
    f.add_argument("--max-path-len", type=int, help="match pattern links to signed paths up to this length")
    f.add_argument("--injective", action="store_true", help="signed path matching: injective on vertices")
    f.add_argument("--pin", action="append", default=[], metavar="P=T", help="signed path matching: fix vertex P to T")
    f.add_argument("--no-monic", action="store_true", help="homomorphism search: allow non-injective matches")
    f.add_argument("--out")
    f.set_defaults(func=cmd_find)

    e = sub.add_parser("export", parents=[common], help="DOT graph or CSV tables")
    e.add_argument("model")
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--dot", action="store_true")
    g.add_argument("--tables", metavar="DIR")
    e.add_argument("--implied", action="store_true", help="DOT: add implied links as dashed edges")
    e.add_argument("--loops", action="store_true", help="DOT: highlight feedback loop links")
    e.add_argument("--max-len", type=int, default=8)
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    rep = Report(args.command)
    rep.quiet = args.json
    error = None
    try:
        status = args.func(args, rep)
    except (ModelFormatError, UsageError) as exc:
        status, error = 2, str(exc)
    except CatflowError as exc:
        status, error = 1, str(exc)
    if error:
        _diag("error", error)
    if args.json:
        print(json.dumps(rep.as_json(status, error), indent=2, ensure_ascii=False))
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
