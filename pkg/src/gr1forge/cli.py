"""Command-line entry point: ``gr1forge {gen,check,synth,bench,sim}``.

Exit codes: 0 success, 1 usage or input error, 2 unrealizable,
3 simulation property violation.  Every flag can also be set through an
environment variable ``GR1FORGE_<FLAG>`` (for example ``GR1FORGE_SEED``);
explicit flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .amba import (
    ArbiterParams, MasterParams, SlaveParams, file_name, render_arbiter,
    render_master, render_slave,
)
from .circuit import BlifError, emit_blif, gate_stats, parse_blif
from .formula import SpecDocument
from .harness import (
    PolicyError, SignalMismatchError, closed_loop, make_policy, parse_script,
)
from .parser import SpecError, parse_spec
from .pipeline import prepare_game, run_pipeline

EXIT_OK, EXIT_ERROR, EXIT_UNREALIZABLE, EXIT_VIOLATION = 0, 1, 2, 3

CSV_COLUMNS = ["name", "n/w", "vars", "monitors", "realizable", "solve_ms",
               "total_ms", "node_count", "gate_equiv"]


class UsageError(Exception):
    pass


def _env(name: str, default):
    raw = os.environ.get(f"GR1FORGE_{name}")
    if raw is None:
        return default
    if isinstance(default, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        try:
            return int(raw)
        except ValueError:
            raise UsageError(f"GR1FORGE_{name} must be an integer, got {raw!r}") from None
    return raw


def parse_range(text: str) -> range:
    """``"3"`` or ``"2..5"`` (inclusive); a reversed range is empty."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return range(int(a), int(b) + 1)
        k = int(text)
        return range(k, k + 1)
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected N or A..B") from None


def _load(path: str) -> SpecDocument:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_spec(text, name=p.stem)


# -- gen -------------------------------------------------------------------

def _render(kind: str, k: int, args) -> str:
    if kind == "arbiter":
        return render_arbiter(ArbiterParams(k, args.prose_variant, args.htrans_assumed))
    if kind == "master":
        return render_master(MasterParams(k, args.prose_variant))
    return render_slave(SlaveParams(k, args.prose_variant))


def cmd_gen(args) -> int:
    out = Path(args.out)
    sizes = parse_range(args.masters) if args.kind == "arbiter" else range(args.width, args.width + 1)
    texts = [(file_name(args.kind, k), _render(args.kind, k, args)) for k in sizes]
    out.mkdir(parents=True, exist_ok=True)
    for name, text in texts:
        path = out / f"{name}.spec"
        path.write_text(text)
        print(path)
    return EXIT_OK


# -- check / synth -----------------------------------------------------------

def _var_report(res) -> List[str]:
    g = res.game
    spec = res.spec
    mon_e = len(spec.names("env", monitor=True))
    mon_s = len(spec.names("sys", monitor=True))
    return [
        f"  env variables: {len(g.x_vars)} ({len(g.x_vars) - mon_e} signal bits, {mon_e} monitor bits)",
        f"  sys variables: {len(g.y_vars)} ({len(g.y_vars) - mon_s} signal bits, {mon_s} monitor bits)",
        f"  goals: {len(spec.fair_e)} env, {len(spec.fair_s)} sys",
        f"  solve time: {res.solve_ms:.1f} ms",
    ]


def cmd_check(args) -> int:
    doc = _load(args.spec)
    res = run_pipeline(doc, synthesize_circuit=False, order=args.order)
    print(("REALIZABLE" if res.realizable else "UNREALIZABLE") + f"  {doc.name}")
    for line in _var_report(res):
        print(line)
    return EXIT_OK if res.realizable else EXIT_UNREALIZABLE


def _stats(res) -> Dict[str, object]:
    g = res.game
    st = gate_stats(res.netlist)
    return {
        "name": res.doc.name,
        "env_vars": len(g.x_vars),
        "sys_vars": len(g.y_vars),
        "monitor_bits": res.spec.monitor_bits,
        "goal_counter_bits": len(g.c_vars),
        "inputs": len(res.netlist.inputs),
        "outputs": len(res.netlist.outputs),
        "latches": len(res.netlist.latches),
        "node_count": st["node_count"],
        "gate_equiv": st["gate_equiv"],
        "per_output": st["per_output"],
    }


def cmd_synth(args) -> int:
    doc = _load(args.spec)
    res = run_pipeline(doc, synthesize_circuit=True, order=args.order)
    if not res.realizable:
        print(f"UNREALIZABLE  {doc.name}; no files written")
        return EXIT_UNREALIZABLE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    name = doc.name
    (out / f"{name}.blif").write_text(emit_blif(res.netlist, name))
    (out / f"{name}.stats.json").write_text(json.dumps(_stats(res), indent=2, sort_keys=True) + "\n")
    written = [f"{name}.blif", f"{name}.stats.json"]
    if args.dot:
        g = res.game
        (out / f"{name}.strategy.dot").write_text(g.bdd.to_dot([res.strategy.rel]))
        written.append(f"{name}.strategy.dot")
    print(f"REALIZABLE  {name}")
    for line in _var_report(res):
        print(line)
    print(f"  total time: {res.total_ms:.1f} ms")
    for w in written:
        print(f"  wrote {out / w}")
    return EXIT_OK


# -- bench -------------------------------------------------------------------

def _bench_one(job: Tuple[str, int, bool, bool, str]) -> Dict[str, object]:
    kind, k, prose, htrans, order = job
    if kind == "arbiter":
        text = render_arbiter(ArbiterParams(k, prose, htrans))
    elif kind == "master":
        text = render_master(MasterParams(k, prose))
    else:
        text = render_slave(SlaveParams(k, prose))
    name = file_name(kind, k)
    row: Dict[str, object] = {c: "" for c in CSV_COLUMNS}
    row["name"], row["n/w"] = name, k
    try:
        t0 = time.perf_counter()
        doc = parse_spec(text, name=name)
        res = run_pipeline(doc, synthesize_circuit=True, order=order)
        total = 1000.0 * (time.perf_counter() - t0)
        row["vars"] = len(res.game.x_vars) + len(res.game.y_vars)
        row["monitors"] = res.spec.monitor_bits
        row["realizable"] = res.realizable
        row["solve_ms"] = f"{res.solve_ms:.1f}"
        row["total_ms"] = f"{total:.1f}"
        if res.netlist is not None:
            st = gate_stats(res.netlist)
            row["node_count"] = st["node_count"]
            row["gate_equiv"] = st["gate_equiv"]
    except Exception as exc:  # recorded in the row; the run continues
        row["realizable"] = f"error: {type(exc).__name__}: {exc}"
    return row


def bench_jobs(selector: str, rng: Optional[str], args) -> List[Tuple[str, int, bool, bool, str]]:
    prose, htrans, order = args.prose_variant, args.htrans_assumed, args.order
    masters = parse_range(rng or args.masters)
    widths = parse_range(rng) if rng and selector in ("master", "slave") else range(args.width, args.width + 1)
    jobs = []
    if selector in ("master", "all"):
        jobs += [("master", w, prose, htrans, order) for w in widths]
    if selector in ("slave", "all"):
        jobs += [("slave", w, prose, htrans, order) for w in widths]
    if selector in ("arbiter", "all"):
        jobs += [("arbiter", n, prose, htrans, order) for n in masters]
    return jobs


def cmd_bench(args) -> int:
    if args.selector not in ("arbiter", "master", "slave", "all"):
        raise UsageError(f"unknown bench selector {args.selector!r}")
    jobs = bench_jobs(args.selector, args.range, args)
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    text = buf.getvalue()
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


# -- sim -----------------------------------------------------------------------

def cmd_sim(args) -> int:
    doc = _load(args.spec)
    try:
        model = parse_blif(Path(args.blif).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.blif}: {exc.strerror}") from None
    g = prepare_game(doc)
    policy_arg = args.policy
    script = None
    kind = policy_arg
    if policy_arg.startswith("script:"):
        kind = "script"
        path = policy_arg[len("script:"):]
        try:
            script = parse_script(Path(path).read_text(), doc.decls)
        except OSError as exc:
            raise UsageError(f"cannot read policy file {path}: {exc.strerror}") from None
    elif policy_arg not in ("random", "adversarial"):
        raise UsageError(f"unknown policy {policy_arg!r}")
    policy = make_policy(kind, args.seed, script)
    res = closed_loop(g, model, policy, args.steps, decls=doc.decls)
    verdict = res.verdict
    report = verdict.to_json()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{doc.name}.trace").write_text(res.trace.to_vcd_lite())
        (out / f"{doc.name}.verdict.json").write_text(report + "\n")
    print(report)
    return EXIT_VIOLATION if verdict.kind == "safety_violation" else EXIT_OK


# -- argument parsing -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gr1forge", description="GR(1) synthesis of AMBA AHB controllers.")
    sub = p.add_subparsers(dest="command", required=True)

    def variant_flags(sp):
        sp.add_argument("--prose-variant", action="store_true", default=_env("PROSE_VARIANT", False),
                        help="use the alternative reading of ambiguous entries")
        sp.add_argument("--htrans-assumed", action="store_true", default=_env("HTRANS_ASSUMED", False),
                        help="arbiter: treat the HTRANS burst entries as assumptions")

    def order_flag(sp):
        sp.add_argument("--order", choices=("family", "declared"), default=_env("ORDER", "family"),
                        help="variable ordering heuristic")

    sp = sub.add_parser("gen", help="write benchmark specifications")
    sp.add_argument("kind", choices=("arbiter", "master", "slave"))
    sp.add_argument("--masters", default=_env("MASTERS", "2"), help="arbiter master count, N or A..B")
    sp.add_argument("--width", type=int, default=_env("WIDTH", 1), help="address/data width")
    sp.add_argument("--out", default=_env("OUT", "."), help="output directory")
    variant_flags(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("check", help="decide realizability")
    sp.add_argument("spec")
    order_flag(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("synth", help="synthesize a BLIF netlist")
    sp.add_argument("spec")
    sp.add_argument("--out", default=_env("OUT", "."), help="output directory")
    sp.add_argument("--dot", action="store_true", default=_env("DOT", False),
                    help="also write the strategy relation as DOT")
    order_flag(sp)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("bench", help="benchmark table as CSV")
    sp.add_argument("selector", help="arbiter, master, slave or all")
    sp.add_argument("range", nargs="?", help="N or A..B (masters for arbiter, width otherwise)")
    sp.add_argument("--masters", default=_env("MASTERS", "2..4"))
    sp.add_argument("--width", type=int, default=_env("WIDTH", 1))
    sp.add_argument("--out", default=_env("OUT", None), help="also write the CSV to this file")
    sp.add_argument("--jobs", type=int, default=_env("JOBS", 1), help="parallel processes")
    variant_flags(sp)
    order_flag(sp)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("sim", help="simulate a BLIF netlist against its specification")
    sp.add_argument("spec")
    sp.add_argument("blif")
    sp.add_argument("--policy", default=_env("POLICY", "random"),
                    help="random, adversarial or script:FILE")
    sp.add_argument("--steps", type=int, default=_env("STEPS", 1000))
    sp.add_argument("--seed", type=int, default=_env("SEED", 0))
    sp.add_argument("--out", default=_env("OUT", None), help="directory for trace and verdict")
    sp.set_defaults(func=cmd_sim)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except SpecError as exc:
        where = getattr(args, "spec", "")
        print(f"error: {where}: {exc}", file=sys.stderr)
    except (UsageError, BlifError, SignalMismatchError, PolicyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
