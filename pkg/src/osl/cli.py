"""Command-line front end: ``osl <subcommand> ...``.

Exit codes: 0 ok, 2 lattice invalid, 3 label/query error, 4 parse error,
5 scenario failure. Diagnostics go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import _kernels
from .belief_base import BeliefBase, Literal
from .contradiction import mcc
from .errors import (CycleDetected, InvalidNode, InvalidScenario, NoUniqueBound, NotALattice,
                     OslError, ParseError, PosetSpecError, UnknownLabel, UnknownShape,
                     WeightOutOfRange)
from .manager import assert_belief, check_soundness
from .poset import PosetSpec, build_lattice
from .product import carrier_from_dict

EXIT_OK, EXIT_LATTICE, EXIT_LABEL, EXIT_PARSE, EXIT_SCENARIO = 0, 2, 3, 4, 5

BELIEF_FIELDS = ("atom", "observer", "situation", "weight")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _diagnostic(exc: Exception) -> dict:
    d = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("pair", "kind", "evidence", "cycle", "which", "candidates", "line", "offset", "step"):
        v = getattr(exc, attr, None)
        if v is not None:
            d[attr] = list(v) if isinstance(v, tuple) else v
    return d


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, (NotALattice, CycleDetected, NoUniqueBound, PosetSpecError)):
        return EXIT_LATTICE
    if isinstance(exc, (ParseError, WeightOutOfRange, InvalidNode, InvalidScenario)):
        return EXIT_PARSE
    if isinstance(exc, UnknownShape):
        return EXIT_PARSE
    if isinstance(exc, (UnknownLabel, LookupError)):
        return EXIT_LABEL
    return 1


# -- file formats ---------------------------------------------------------------

def _read_json(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None


def _belief_from_obj(obj, line=None):
    if not isinstance(obj, dict) or any(k not in obj for k in BELIEF_FIELDS):
        raise ParseError(f"belief needs fields {list(BELIEF_FIELDS)}", line)
    try:
        lit = Literal(str(obj["atom"]), bool(obj.get("negated", False)))
        weight = float(obj["weight"])
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc), line) from None
    return lit, str(obj["observer"]), str(obj["situation"]), weight


def _belief_to_obj(lit, obs, sit, w) -> dict:
    return {"atom": lit.atom, "negated": lit.negated, "observer": obs, "situation": sit, "weight": w}


def read_beliefs(lines):
    """Yield parsed beliefs from JSONL lines; blank lines and ``#`` comments are skipped."""
    for i, line in enumerate(lines, 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, i, exc.colno) from None
        yield i, _belief_from_obj(obj, i)


def load_session(path: str):
    """A session is ``{"carrier": ..., "beliefs": [...]}`` or a bare carrier spec."""
    data = _read_json(path)
    if isinstance(data, dict) and "carrier" in data:
        carrier_spec, raw = data["carrier"], data.get("beliefs", [])
    else:
        carrier_spec, raw = data, []
    carrier = carrier_from_dict(carrier_spec)
    beliefs = [_belief_from_obj(b, i) for i, b in enumerate(raw)]
    return carrier_spec, carrier, beliefs


def replay(carrier, beliefs, *, detect=True):
    base = BeliefBase(carrier)
    reports = []
    for lit, obs, sit, w in beliefs:
        reports.append(assert_belief(base, lit, carrier.node_of(obs, sit), w, detect=detect))
    return base, reports


# -- commands -------------------------------------------------------------------

def cmd_validate(args) -> int:
    data = _read_json(args.file)
    if isinstance(data, dict) and "carrier" in data:
        data = data["carrier"]
    if isinstance(data, dict) and "elements" in data:
        lat = build_lattice(PosetSpec.from_dict(data))
        out = {"valid": True, "kind": "component", "size": lat.size,
               "bottom": lat.labels[lat.bottom], "top": lat.labels[lat.top]}
    else:
        c = carrier_from_dict(data)
        out = {"valid": True, "kind": "carrier", "n": c.n, "n_obs": c.n_obs, "n_sit": c.n_sit}
    print(_dump(out))
    return EXIT_OK


def cmd_assert(args) -> int:
    carrier_spec, carrier, beliefs = load_session(args.session)
    base, _ = replay(carrier, beliefs)
    fh = sys.stdin if args.beliefs == "-" else open(args.beliefs, encoding="utf-8")
    added = []
    try:
        for line, (lit, obs, sit, w) in read_beliefs(fh):
            try:
                node = carrier.node_of(obs, sit)
                report = assert_belief(base, lit, node, w)
            except OslError as exc:
                exc.line = line
                raise
            added.append((lit, obs, sit, w))
            print(report.to_json(carrier if args.verbose else None), flush=True)
    finally:
        if fh is not sys.stdin:
            fh.close()
    if args.save:
        session = {"carrier": carrier_spec,
                   "beliefs": [_belief_to_obj(*b) for b in beliefs + added]}
        Path(args.session).write_text(json.dumps(session, indent=1, sort_keys=True) + "\n",
                                      encoding="utf-8")
    return EXIT_OK


def cmd_query(args) -> int:
    _, carrier, beliefs = load_session(args.session)
    try:
        lit = Literal.parse(args.literal)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    node = carrier.node_of(args.observer, args.situation)
    base, _ = replay(carrier, beliefs)
    print(repr(base.cred(lit, node)))
    return EXIT_OK


def cmd_mcc(args) -> int:
    # raw replay: detection off, so the stored stream's own conflicts show up
    _, carrier, beliefs = load_session(args.session)
    base, _ = replay(carrier, beliefs, detect=args.resolved)
    comps = mcc(base)
    print(_dump([c.to_dict() for c in comps]))
    return EXIT_OK


def cmd_check(args) -> int:
    _, carrier, beliefs = load_session(args.session)
    node = carrier.node_of(args.observer, args.situation)
    base, _ = replay(carrier, beliefs)
    rep = check_soundness(base, node)
    out = rep.to_dict()
    out["theory"] = [str(l) for l in sorted(base.supported_theory(node))]
    print(_dump(out))
    return EXIT_OK


def cmd_tom(args) -> int:
    import warnings

    from .scenarios import builtin_scenarios, format_table, load_scenarios, run_scenario

    scs = load_scenarios(args.scenarios) if args.scenarios else builtin_scenarios()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        results = [run_scenario(s) for s in scs]
    if args.json:
        print(_dump([{"name": r.name, "passed": r.passed, "confidence": r.confidence,
                      "engine_time_us": r.engine_time_us} for r in results]))
    else:
        print(format_table(results))
    for w in caught:
        print(_dump({"warning": str(w.message)}), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in results) else EXIT_SCENARIO


def _parse_sizes(text: str):
    sizes = []
    for part in text.split(","):
        try:
            a, b = part.lower().split("x")
            sizes.append((int(a), int(b)))
        except ValueError:
            raise ParseError(f"bad size {part!r}; expected e.g. 3x3") from None
    return sizes


def _seed(args) -> int:
    env = os.environ.get("OSL_SEED")
    return int(env) if env not in (None, "") else args.seed


def cmd_bench(args) -> int:
    from .bench import (STANDARD_SIZES, BenchConfig, compare_backends, run_mcc_scaling,
                        run_rbp_scaling, summary_dict, write_csv)

    sizes = _parse_sizes(args.sizes) if args.sizes else list(STANDARD_SIZES)
    cfg = BenchConfig(sizes=sizes, trials=args.trials, seed=_seed(args), warmup=args.warmup,
                      shape=args.shape)
    if args.compare_backends:
        print(_dump(compare_backends(cfg)))
        return EXIT_OK
    records = run_rbp_scaling(cfg)
    summary = summary_dict(cfg, records, _kernels.BACKEND)
    if args.mcc:
        summary["mcc_scaling"] = run_mcc_scaling(seed=cfg.seed)
    if args.out:
        out = Path(args.out)
        write_csv(records, out)
        out.with_suffix(".json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
        print(_dump(summary))
    else:
        write_csv(records, sys.stdout)
        print(_dump(summary), file=sys.stderr)
    return EXIT_OK


def cmd_ablate(args) -> int:
    from .bench import AblationConfig, run_ablation

    n_obs, n_sit = _parse_sizes(args.size)[0]
    cfg = AblationConfig(n_obs=n_obs, n_sit=n_sit, shape=args.shape, asserts=args.asserts,
                         probes=args.probes, seed=_seed(args))
    print(_dump(run_ablation(cfg)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="osl", description="Observer-situation lattice belief engine")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a component or carrier spec")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    a = sub.add_parser("assert", help="stream JSONL beliefs into a session")
    a.add_argument("session")
    a.add_argument("beliefs", help="JSONL file, or - for stdin")
    a.add_argument("--save", action="store_true", help="append accepted beliefs to the session file")
    a.add_argument("--verbose", action="store_true", help="include node labels in reports")
    a.set_defaults(func=cmd_assert)

    q = sub.add_parser("query", help="credibility of a literal at a node")
    q.add_argument("session")
    q.add_argument("literal", help="atom, or ~atom for the negation")
    q.add_argument("observer")
    q.add_argument("situation")
    q.set_defaults(func=cmd_query)

    m = sub.add_parser("mcc", help="contradiction components of a session's raw stream")
    m.add_argument("session")
    m.add_argument("--resolved", action="store_true",
                   help="replay with resolution on (the result is then always empty)")
    m.set_defaults(func=cmd_mcc)

    c = sub.add_parser("check", help="satisfiability of the supported theory at a node")
    c.add_argument("session")
    c.add_argument("observer")
    c.add_argument("situation")
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("tom", help="run theory-of-mind scenarios")
    t.add_argument("--scenarios", help="scenario JSON file or directory (default: builtin)")
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_tom)

    b = sub.add_parser("bench", help="propagation scaling study")
    b.add_argument("--sizes", help="comma list like 3x3,10x10 (default: the ten standard sizes)")
    b.add_argument("--trials", type=int, default=30)
    b.add_argument("--warmup", type=int, default=5)
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--shape", default="chain")
    b.add_argument("--out", help="CSV path; the JSON summary goes next to it")
    b.add_argument("--mcc", action="store_true", help="also time global decomposition vs base size")
    b.add_argument("--compare-backends", action="store_true")
    b.set_defaults(func=cmd_bench)

    ab = sub.add_parser("ablate", help="full / no-mcc / no-propagation comparison")
    ab.add_argument("--size", default="8x8")
    ab.add_argument("--shape", default="chain")
    ab.add_argument("--asserts", type=int, default=200)
    ab.add_argument("--probes", type=int, default=200)
    ab.add_argument("--seed", type=int, default=42)
    ab.set_defaults(func=cmd_ablate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OslError, LookupError) as exc:
        print(_dump(_diagnostic(exc)), file=sys.stderr)
        return _exit_code(exc)
    except (OSError, ValueError) as exc:
        print(_dump({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
