"""Command-line entry point: ``supermouse <command> ...``.

Exit codes: 0 success or verdict produced, 1 verification mismatch,
2 input error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import analysis, cm2, gadgets, reduction
from .engine import run_hits
from .errors import MouseError, NotAffineError, NotMultiplicativeError
from .mouse import (CycleString, SuperMouseProgram, format_program, parse_pattern, parse_program,
                    run_bounded, trace_records, traverse_step)
from .plot import render_svg

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


class Output:
    """Writes either human text or one JSON record per line."""

    def __init__(self, as_json: bool, stream=None):
        self.as_json = as_json
        self.stream = stream or sys.stdout

    def record(self, rec: dict):
        if self.as_json:
            print(json.dumps(rec, sort_keys=True), file=self.stream)

    def text(self, line: str = ""):
        if not self.as_json:
            print(line, file=self.stream)


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _report(out: Output, args, inputs, outcome, started, **counters):
    rec = {
        "report": {
            "command": args.command,
            "inputs": {p: _digest(p) for p in inputs},
            "outcome": outcome,
            "counters": {k: str(v) for k, v in counters.items()},
            "wall_time": round(time.perf_counter() - started, 6),
        }
    }
    out.record(rec)


def _load_program(path: str) -> SuperMouseProgram:
    return parse_program(Path(path).read_text())


def _load_cm(path: str) -> cm2.CM2Program:
    return cm2.parse_cm(Path(path).read_text())


def _load_cycle(pattern: str) -> CycleString:
    return CycleString(parse_pattern(pattern), "c0")


def _hit_json(hit) -> dict:
    name, state = hit.entered_state
    return {"hit": str(hit.hit_index), "x": str(hit.x_value), "cycle": name, "state": state,
            "dispatched_to": hit.dispatched_to, "steps": str(hit.steps_elapsed)}


# ---------------------------------------------------------------------------
# commands

def cmd_run(args, out):
    started = time.perf_counter()
    prog = _load_program(args.program)
    steps = args.steps if args.steps is not None else args.max_steps
    result = run_bounded(prog, args.start_x, steps)
    if args.trace:
        with open(args.trace, "w") as fh:
            for rec in trace_records(prog, args.start_x, steps):
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    for hit in result.hits:
        out.record(_hit_json(hit))
        out.text(f"hit {hit.hit_index}: x={hit.x_value} state={hit.entered_state[0]}[{hit.entered_state[1]}]"
                 f" -> {hit.dispatched_to} (step {hit.steps_elapsed})")
    outcome = "stopped" if result.stopped else "bound"
    out.text(f"{len(result.hits)} hits in {result.final.steps} steps, {outcome}")
    _report(out, args, [args.program], outcome, started, steps=result.final.steps, hits=len(result.hits))
    return EXIT_OK


def cmd_hits(args, out):
    started = time.perf_counter()
    prog = _load_program(args.program)
    run = run_hits(prog, args.start_x, args.max_hits, accelerated=not args.naive)
    for hit in run.hits:
        out.record(_hit_json(hit))
        out.text(f"hit {hit.hit_index}: x={hit.x_value} -> {hit.dispatched_to}")
    outcome = "stopped" if run.stopped else "diverged" if run.diverged else "bound"
    out.text(f"{len(run.hits)} hits, {outcome}")
    _report(out, args, [args.program], outcome, started, steps=run.steps, hits=len(run.hits))
    return EXIT_OK


def _analyze_one(cycle: CycleString, x_max: int) -> dict:
    prof = analysis.profile_cycle(cycle)
    rec = {
        "pattern": cycle.pattern,
        "e": prof.e,
        "m": prof.m,
        "closure": prof.closure,
        "period_length": prof.period_length,
        "essential_positions": list(prof.essential_positions),
        "syntactic_match": prof.syntactic_essentials() == prof.essential_positions,
    }
    if prof.closure <= 0:
        rec["law"] = None
        return rec
    try:
        law = analysis.characterize_affine(cycle, x_max)
        rec["law"] = {"b": law.b, "c": law.c, "t": list(law.t)}
    except NotAffineError as exc:
        rec["law"] = {"not_affine_at": str(exc.x)}
    try:
        rec["measured_factor"] = str(gadgets.measure_factor(cycle))
    except NotMultiplicativeError:
        rec["measured_factor"] = None
    for update, (pattern, claimed) in gadgets.PRINTED_GADGETS.items():
        if parse_pattern(pattern) == cycle.letters:
            rec["claimed_factor"] = str(claimed)
            rec["claim_holds"] = rec["measured_factor"] == str(claimed)
    return rec


def cmd_analyze(args, out):
    if args.random:
        return _sweep(args, out)
    if not args.pattern:
        raise MouseError("analyze needs a pattern or --random")
    rec = _analyze_one(_load_cycle(args.pattern), args.x_max)
    out.record(rec)
    for key in ("pattern", "e", "m", "closure", "period_length", "essential_positions", "law",
                "measured_factor", "claimed_factor", "syntactic_match"):
        if key in rec:
            out.text(f"{key:20} {rec[key]}")
    if rec.get("claim_holds") is False:
        out.text(f"note: claimed factor {rec['claimed_factor']} disagrees with measured {rec['measured_factor']}")
    return EXIT_OK


def _sweep(args, out):
    rng = random.Random(args.seed)
    bad = 0
    for i in range(args.random):
        cyc = analysis.random_cycle(rng)
        rep = analysis.equivalence_check(cyc, args.x_max)
        bad += len(rep.mismatches)
        out.record({"pattern": cyc.pattern, "checked": rep.checked, "mismatches": len(rep.mismatches)})
        out.text(f"{cyc.pattern:30} {rep.checked} checked, {len(rep.mismatches)} mismatches")
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_synth(args, out):
    factor = Fraction(args.factor)
    residues = None if args.residues is None else frozenset(int(r) for r in args.residues.split(","))
    spec = gadgets.GadgetSpec(factor, args.closure, residues)
    g = gadgets.synthesize(spec, args.verify_to)
    rec = _analyze_one(g.cycle, args.verify_to)
    rec["factor"] = str(factor)
    rec["valid_residues"] = sorted(spec.valid_residues)
    out.record(rec)
    out.text(g.cycle.pattern)
    out.text(f"e={rec['e']} m={rec['m']} closure={rec['closure']} length={rec['period_length']} "
             f"b={g.law.b} t={list(g.law.t)}")
    return EXIT_OK


def cmd_cm2_run(args, out):
    prog = _load_cm(args.program)
    run = cm2.run_cm(prog, max_steps=args.max_steps)
    for i, cfg in enumerate(run.trace):
        out.record({"step": str(i), "label": cfg.label, "r1": str(cfg.r1), "r2": str(cfg.r2)})
    f = run.final
    out.text(f"{'halted' if run.halted else 'running'} after {run.steps} steps at ({f.label}, {f.r1}, {f.r2})")
    return EXIT_OK


def cmd_cm2_normalize(args, out):
    text = cm2.format_cm(cm2.normalize(_load_cm(args.program)))
    out.record({"program": text})
    out.text(text.rstrip("\n"))
    return EXIT_OK


def _write_or_print(out, text, dest):
    if dest:
        Path(dest).write_text(text)
    else:
        out.record({"program": text})
        out.text(text.rstrip("\n"))


def cmd_compile(args, out):
    art = reduction.compile_program(cm2.normalize(_load_cm(args.program)) if args.normalize
                                    else _load_cm(args.program), strict=args.strict)
    if args.pump:
        art = reduction.pump(art)
    _write_or_print(out, format_program(art.program), args.output)
    return EXIT_OK


def cmd_pump(args, out):
    prog, _ = reduction.pump_program(_load_program(args.program))
    _write_or_print(out, format_program(prog), args.output)
    return EXIT_OK


def cmd_cotrace(args, out):
    started = time.perf_counter()
    prog = _load_cm(args.program)
    if not prog.restricted:
        prog = cm2.normalize(prog)
    art = reduction.compile_program(prog)
    if args.pump:
        art = reduction.pump(art)
    rep = reduction.cotrace(prog, art, args.max_hits)
    for rec in rep.records:
        out.record(rec.as_json())
    for m in rep.mismatches:
        out.text(m)
    out.text(rep.summary())
    _report(out, args, [args.program], "ok" if rep.ok else "mismatch", started,
            hits=len(rep.records), mismatches=len(rep.mismatches))
    return EXIT_OK if rep.ok else EXIT_MISMATCH


def cmd_reduce(args, out):
    started = time.perf_counter()
    verdict = reduction.halting_reduction(_load_cm(args.program), args.max_hits)
    out.record({"verdict": "STOPPED" if verdict.stopped else "UNRESOLVED", "hits": str(verdict.hits),
                "steps": str(verdict.steps)})
    out.text(str(verdict))
    _report(out, args, [args.program], str(verdict), started, hits=verdict.hits)
    return EXIT_OK


def cmd_bench(args, out):
    budget = args.budget
    if args.cm:
        art = reduction.compile_program(cm2.normalize(_load_cm(args.cm)))
        t0 = time.perf_counter()
        fast = run_hits(art.program, 1, args.hits)
        t_fast = time.perf_counter() - t0
        rec = {"hits": str(len(fast.hits)), "x": str(fast.final_x), "steps": str(fast.steps),
               "fast_seconds": round(t_fast, 6)}
        if fast.steps <= budget:
            t0 = time.perf_counter()
            slow = run_hits(art.program, 1, args.hits, accelerated=False)
            rec["naive_seconds"] = round(time.perf_counter() - t0, 6)
            rec["agree"] = slow.hits == fast.hits
        else:
            rec["naive"] = "infeasible"
        out.record(rec)
        out.text(f"accelerated: {rec['hits']} hits, x={fast.final_x} in {t_fast:.6f}s")
        if "naive" in rec:
            out.text(f"naive: infeasible, needs {fast.steps} steps (budget {budget})")
        else:
            out.text(f"naive: {rec['naive_seconds']}s, agree={rec['agree']}")
        return EXIT_OK if rec.get("agree", True) else EXIT_MISMATCH

    cyc = _load_cycle(args.pattern)
    x = args.x
    t0 = time.perf_counter()
    fast = analysis.traverse_from(cyc, x)
    t_fast = time.perf_counter() - t0
    if fast is None:
        out.record({"x": str(x), "result": "no_hit"})
        out.text("no hit: the cycle never reaches the diagonal from this x")
        return EXIT_OK
    rec = {"x": str(x), "x_next": str(fast.x), "steps": str(fast.steps), "jumps": 1,
           "fast_seconds": round(t_fast, 6)}
    if fast.steps <= budget:
        t0 = time.perf_counter()
        slow = traverse_step(cyc, x)
        rec["naive_seconds"] = round(time.perf_counter() - t0, 6)
        rec["agree"] = slow == fast
    else:
        rec["naive"] = "infeasible"
    out.record(rec)
    out.text(f"naive: {fast.steps} steps; accelerated: 1 closed-form jump; x'={fast.x}")
    if "agree" in rec:
        out.text(f"naive {rec['naive_seconds']}s vs accelerated {t_fast:.6f}s, agree={rec['agree']}")
    return EXIT_OK if rec.get("agree", True) else EXIT_MISMATCH


def cmd_plot(args, out):
    prog = _load_program(args.program)
    svg = render_svg(prog, args.start_x, args.steps)
    if args.output:
        Path(args.output).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="one JSON record per line")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--max-steps", type=int, default=argparse.SUPPRESS)
    common.add_argument("--max-hits", type=int, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="supermouse", description=__doc__.splitlines()[0],
                                     parents=[common])
    parser.set_defaults(json=False, seed=0, max_steps=1000, max_hits=200)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    p = add("run", cmd_run, "step-simulate a super-mouse program")
    p.add_argument("program")
    p.add_argument("--steps", type=int)
    p.add_argument("--start-x", type=int, default=1)
    p.add_argument("--trace", help="write per-step JSON records here")

    p = add("hits", cmd_hits, "list diagonal hits with the accelerated engine")
    p.add_argument("program")
    p.add_argument("--start-x", type=int, default=1)
    p.add_argument("--naive", action="store_true", help="step-level traversals instead")

    p = add("analyze", cmd_analyze, "profile a cycle pattern")
    p.add_argument("pattern", nargs="?")
    p.add_argument("--x-max", type=int, default=analysis.DEFAULT_VERIFY_MAX)
    p.add_argument("--random", type=int, default=0, help="equivalence sweep over N seeded random cycles")

    p = add("synth", cmd_synth, "synthesize a multiplying gadget")
    p.add_argument("--factor", required=True)
    p.add_argument("--closure", type=int, default=gadgets.DEFAULT_CLOSURE)
    p.add_argument("--residues")
    p.add_argument("--verify-to", type=int, default=1000)

    p = add("cm2-run", cmd_cm2_run, "interpret a two-counter machine")
    p.add_argument("program")

    p = add("cm2-normalize", cmd_cm2_normalize, "rewrite to the primitive update set")
    p.add_argument("program")

    p = add("compile", cmd_compile, "compile a restricted machine to a super-mouse")
    p.add_argument("program")
    p.add_argument("-o", "--output")
    p.add_argument("--pump", action="store_true")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--strict", action="store_true")

    p = add("pump", cmd_pump, "pump a super-mouse program to equal cycle lengths")
    p.add_argument("program")
    p.add_argument("-o", "--output")

    p = add("cotrace", cmd_cotrace, "lockstep check of machine against compiled mouse")
    p.add_argument("program")
    p.add_argument("--pump", action="store_true")

    p = add("reduce", cmd_reduce, "halting verdict through the mouse")
    p.add_argument("program")

    p = add("bench", cmd_bench, "naive versus accelerated traversal")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pattern")
    g.add_argument("--cm")
    p.add_argument("--x", type=int, default=10**6)
    p.add_argument("--hits", type=int, default=100)
    p.add_argument("--budget", type=int, default=10**7, help="largest step count the naive engine attempts")

    p = add("plot", cmd_plot, "render the octant path as SVG")
    p.add_argument("program")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--start-x", type=int, default=1)
    p.add_argument("-o", "--output")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args.json)
    try:
        return args.func(args, out)
    except (MouseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
