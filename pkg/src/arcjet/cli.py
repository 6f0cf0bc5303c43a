"""Command-line front end.

Subcommands:

  derive      print derivative levels of an equation (optionally reduced)
  components  run a preset's stratification, write the component inventory
  graph       build the level graph and export DOT or JSON
  oracle      finite-field checks (counts, coverage, partition)
  verify      the full check pipeline for one preset or the whole grid

Every report is a single JSON document (sections: congruences, components,
noninclusion, coverage, graph) with a human summary on stdout.  Exit code
0 means every check passed, 1 means a check failed (the report says
which), 2 is a usage error.  Identical invocations produce byte-identical
artifacts; `verify --all` can fan out across processes via the
ARCJET_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys as _sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .algebra import Field, Polynomial, format_poly, parse_poly, var, var_name
from .catalog import (
    PresetError,
    SingularityPreset,
    components,
    legal_variants,
    noninclusion_matrix,
    preset,
    preset_grid,
    supported_chars,
    verify_congruence_table,
)
from .driver import run_driver
from .hasse import JetSystem
from .jetgraph import build_graph, export, simple_branch_check
from .oracle import (
    OracleError,
    coverage_check,
    enumerate_fiber,
    exclusive_cover_check,
    probe_field,
    split_partition_check,
    truncated_leaves,
)


def _jsonable(obj):
    """Normalize engine objects into deterministic JSON-friendly data."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, Polynomial):
        return format_poly(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], str) and isinstance(obj[1], int):
        # a coordinate (family, order) pair
        return var_name(obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)
        if not text.endswith("\n"):
            _sys.stdout.write("\n")


def _preset_from_args(args) -> SingularityPreset:
    return preset(args.kind, n=args.n, char=args.char, variant=args.variant)


def _add_preset_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--kind", choices=("A", "D", "E6", "E7", "E8"), required=required)
    p.add_argument("--n", type=int, default=0, help="rank parameter for A and D kinds")
    p.add_argument("--char", type=int, default=0)
    p.add_argument("--variant", default="", help="extra equation term, e.g. 'x*y^3*z'")


# -- derive -----------------------------------------------------------------


def cmd_derive(args) -> int:
    if args.equation:
        field = Field(args.char)
        f = parse_poly(args.equation, field)
    elif args.kind:
        f = _preset_from_args(args).equation
    else:
        raise SystemExit("derive needs --equation or --kind")
    sysm = JetSystem(f)
    zeros = []
    if args.reduce:
        for name in args.reduce.split(","):
            name = name.strip()
            zeros.append(var(name[0], int(name[1:]) if len(name) > 1 else 0))
    lines = []
    for m in range(args.level + 1):
        d = sysm.derivative(m)
        if zeros:
            d = d.reduce_mod_vars(zeros)
        lines.append(f"f_{m} = {format_poly(d)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- components -------------------------------------------------------------


def _component_inventory(pr: SingularityPreset) -> dict:
    tree = components(pr)
    entries = []
    for comp in tree.components:
        chart = tree.chart_of(comp).stratum
        entries.append(
            {
                "name": comp.name,
                "emergence": comp.emergence,
                "charts": len(comp.chart_nodes),
                "descriptor": chart.describe(),
            }
        )
    return {
        "preset": pr.label,
        "count": len(entries),
        "expected": pr.expected_count,
        "components": entries,
    }


def cmd_components(args) -> int:
    inv = _component_inventory(_preset_from_args(args))
    _emit(json.dumps(_jsonable(inv), indent=2, sort_keys=True) + "\n", args.out)
    return 0


# -- graph ------------------------------------------------------------------


def cmd_graph(args) -> int:
    pr = _preset_from_args(args)
    g = build_graph(pr.system(), pr.script, args.max_level)
    _emit(export(g, args.format), args.out)
    rep = simple_branch_check(g)
    print(
        f"{pr.label}: {rep['chain_count']} chains in window {rep['window']}, "
        f"branch threshold {rep['threshold']}, {len(rep['flags'])} flags",
        file=_sys.stderr,
    )
    return 0


# -- oracle -----------------------------------------------------------------


def _oracle_section(pr: SingularityPreset, p: int, m: int, budget: int) -> dict:
    sysm = pr.system()
    pts = enumerate_fiber(pr.equation, p, m, budget=budget)
    tree = run_driver(sysm, pr.script, max_level=m)
    target = probe_field(pr.equation.field, p)
    leaves = truncated_leaves(sysm, tree, m, target)
    uncovered = coverage_check(pts, [t for _, t in leaves])
    exclusive = exclusive_cover_check(pts, tree, leaves)
    partition = split_partition_check(sysm, tree, pts, m, target)
    return {
        "prime": p,
        "level": m,
        "points": len(pts),
        "uncovered": len(uncovered),
        "exclusive": exclusive["ok"],
        "partition": partition["ok"],
        "ok": not uncovered and exclusive["ok"] and partition["ok"],
    }


def cmd_oracle(args) -> int:
    pr = _preset_from_args(args)
    p = args.p or pr.char
    if not p:
        raise SystemExit("--p is required for characteristic-0 presets")
    if args.check == "counts":
        pts = enumerate_fiber(pr.equation, p, args.level, budget=args.budget)
        report = {"preset": pr.label, "prime": p, "level": args.level, "points": len(pts), "ok": True}
    else:
        section = _oracle_section(pr, p, args.level, args.budget)
        key = "uncovered" if args.check == "coverage" else "partition"
        report = {"preset": pr.label, **section}
        report["ok"] = (section["uncovered"] == 0 and section["exclusive"]) if args.check == "coverage" else section["partition"]
    _emit(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n", args.out)
    return 0 if report["ok"] else 1


# -- verify -----------------------------------------------------------------

_ORACLE_BUDGET = 200_000


def _oracle_plan(pr: SingularityPreset) -> list[tuple[int, int]]:
    """(prime, level) pairs small enough for a routine run."""
    if pr.char:
        primes = [pr.char]
    else:
        primes = [
            p
            for p in (2, 3)
            if not (pr.equation.field.i_adjoined and p % 4 != 3)
        ]
    plan = []
    for p in primes:
        m = 1
        while p ** (3 * (m + 1)) <= _ORACLE_BUDGET:
            m += 1
        plan.append((p, m))
    return plan


def _verify_one(pr: SingularityPreset, graph_level: int = 0) -> dict:
    report: dict = {"preset": pr.label}
    congr = verify_congruence_table(pr)
    report["congruences"] = {
        "lines": len(congr["lines"]),
        "discrepancies": _jsonable(congr["discrepancies"]),
        "ok": congr["ok"],
    }
    try:
        inv = _component_inventory(pr)
        tree = run_driver(pr.system(), pr.script, pr.max_level)
        count_ok = inv["count"] == inv["expected"]
    except PresetError as exc:
        report["components"] = {"ok": False, "error": str(exc)}
        report["noninclusion"] = {"ok": False, "error": "skipped"}
        report["coverage"] = []
        report["graph"] = None
        report["ok"] = False
        return report
    report["components"] = {**_jsonable(inv), "ok": count_ok}
    matrix = noninclusion_matrix(pr, tree)
    report["noninclusion"] = {
        "pairs": len(matrix["pairs"]),
        "unresolved": _jsonable(matrix["unresolved"]),
        "certificates": _jsonable(
            [v for v in matrix["pairs"] if v.resolved]
        ),
        "ok": matrix["ok"],
    }
    cov = []
    for p, m in _oracle_plan(pr):
        try:
            cov.append(_oracle_section(pr, p, m, _ORACLE_BUDGET))
        except OracleError as exc:
            cov.append({"prime": p, "level": m, "ok": False, "error": str(exc)})
    report["coverage"] = cov
    if graph_level:
        g = build_graph(pr.system(), pr.script, graph_level)
        rep = simple_branch_check(g)
        rep["ok"] = rep["ok"] and rep["chain_count"] == pr.expected_count
        report["graph"] = _jsonable(rep)
    else:
        report["graph"] = None
    report["ok"] = (
        report["congruences"]["ok"]
        and report["components"]["ok"]
        and report["noninclusion"]["ok"]
        and all(s.get("ok") for s in cov)
        and (report["graph"] is None or report["graph"]["ok"])
    )
    return report


def _verify_label(key: tuple[str, int, int, str]) -> dict:
    kind, n, char, variant = key
    return _verify_one(preset(kind, n=n, char=char, variant=variant))


def cmd_verify(args) -> int:
    if args.all:
        keys = [
            (pr.kind, pr.n, pr.char, pr.variant) for pr in preset_grid()
        ]
        workers = int(os.environ.get("ARCJET_WORKERS", "1"))
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_verify_label, keys))
        else:
            results = [_verify_label(k) for k in keys]
        results.sort(key=lambda r: r["preset"])
        report = {"presets": results, "ok": all(r["ok"] for r in results)}
    else:
        report = _verify_one(_preset_from_args(args), graph_level=args.graph_level)
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    if args.out:
        if args.all:
            for r in report["presets"]:
                print(f"{'PASS' if r['ok'] else 'FAIL'} {r['preset']}")
        print("PASS" if report["ok"] else "FAIL")
    return 0 if report["ok"] else 1


# -- argument plumbing ------------------------------------------------------


def _apply_config(argv: list[str]) -> list[str]:
    """Expand `--config FILE` (key = value lines) into leading flags so
    explicit command-line flags still win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    try:
        path = argv[i + 1]
    except IndexError:
        raise SystemExit(2)
    rest = argv[:i] + argv[i + 2:]
    injected: list[str] = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    injected.append(f"--{key}")
            else:
                injected.extend([f"--{key}", value])
    # keep the subcommand first
    if rest and not rest[0].startswith("-"):
        return [rest[0]] + injected + rest[1:]
    return injected + rest


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="arcjet")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="print derivative levels")
    _add_preset_flags(p, required=False)
    p.add_argument("--equation", default="", help="raw equation text instead of a preset")
    p.add_argument("--level", type=int, default=8)
    p.add_argument("--reduce", default="", help="comma list of coordinates to zero out")
    p.add_argument("--out", default="")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("components", help="stratify a preset and list components")
    _add_preset_flags(p)
    p.add_argument("--out", default="")
    p.set_defaults(func=cmd_components)

    p = sub.add_parser("graph", help="build and export the level graph")
    _add_preset_flags(p)
    p.add_argument("--max-level", type=int, default=16)
    p.add_argument("--format", choices=("dot", "json"), default="dot")
    p.add_argument("--out", default="")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("oracle", help="finite-field brute-force checks")
    _add_preset_flags(p)
    p.add_argument("--p", type=int, default=0, help="probe prime (defaults to preset characteristic)")
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--check", choices=("counts", "coverage", "partition"), default="coverage")
    p.add_argument("--budget", type=int, default=10_000_000)
    p.add_argument("--out", default="")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="full verification pipeline")
    p.add_argument("--all", action="store_true", help="run the whole preset grid")
    p.add_argument("--kind", choices=("A", "D", "E6", "E7", "E8"))
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--char", type=int, default=0)
    p.add_argument("--variant", default="")
    p.add_argument("--graph-level", type=int, default=0, help="also build the level graph to this level")
    p.add_argument("--out", default="")
    p.set_defaults(func=cmd_verify)

    return ap


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(_sys.argv[1:] if argv is None else argv)
    ap = make_parser()
    args = ap.parse_args(_apply_config(argv))
    if args.command == "verify" and not args.all and not args.kind:
        ap.error("verify needs --kind or --all")
    try:
        return args.func(args)
    except (PresetError, OracleError) as exc:
        print(json.dumps({"ok": False, "error": str(exc)}, sort_keys=True))
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
