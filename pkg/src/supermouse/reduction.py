"""Compile restricted two-counter machines to super-mice and check the result.

Registers ``(r1, r2)`` live in the hit coordinate as ``x = 2**r1 * 3**r2 * q``
with ``q`` coprime to 6.  Instruction ``i`` becomes a cycle that multiplies
``x`` by 2, 5/3 or 3/2; the state in which that cycle hits the diagonal
reveals ``x mod 6`` before the update, hence both register statuses, and the
dispatch table routes to the cycle of the chosen successor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, lcm

from .analysis import profile_cycle
from .cm2 import CM2Config, CM2Program, normalize, run_cm, status, step_cm
from .engine import iter_hits, run_hits
from .errors import CompileError, DecrementOfNull, StructuralError
from .gadgets import gadget_cycle
from .mouse import HALT, CycleString, SuperMouseProgram

RESIDUE_STATUS = {
    0: ("P", "P"),
    1: ("Z", "Z"),
    2: ("P", "Z"),
    3: ("Z", "P"),
    4: ("P", "Z"),
    5: ("Z", "Z"),
}


def encode(r1: int, r2: int, q: int = 1) -> int:
    if r1 < 0 or r2 < 0 or q < 1:
        raise ValueError("registers must be non-negative and q positive")
    if gcd(q, 6) != 1:
        raise ValueError(f"cofactor {q} is not coprime to 6")
    return 2**r1 * 3**r2 * q


def decode(x: int) -> tuple[int, int, int]:
    if x < 1:
        raise ValueError("x must be positive")
    r1 = r2 = 0
    while x % 2 == 0:
        x //= 2
        r1 += 1
    while x % 3 == 0:
        x //= 3
        r2 += 1
    return r1, r2, x


def _valid_statuses(update):
    d1, d2 = update
    return {s for s in RESIDUE_STATUS.values() if not (d1 < 0 and s[0] == "Z") and not (d2 < 0 and s[1] == "Z")}


@dataclass(frozen=True)
class CompilationArtifact:
    program: SuperMouseProgram
    instr_to_cycle: dict[int, str]
    source: CM2Program = field(repr=False)
    halt_cycle: str = HALT
    pump_factor: dict[str, int] | None = None


def _cycle_name(label: int) -> str:
    return f"i{label}"


def compile_program(cm: CM2Program, strict: bool = False) -> CompilationArtifact:
    """Translate a restricted machine into a super-mouse.

    With ``strict`` set, an instruction is rejected when a branch for a status
    on which its own update is invalid routes anywhere but HALT.
    """
    if len(cm) == 0:
        raise CompileError("empty program has no start instruction")
    n = cm.halt_label
    cycles = []
    delta = {}
    for label, inst in enumerate(cm.instructions):
        if not inst.restricted:
            raise CompileError(f"instruction {label} has update {inst.update}; normalize the program first")
        if strict:
            for s in set(RESIDUE_STATUS.values()) - _valid_statuses(inst.update):
                if inst.branches[s] != n:
                    raise CompileError(f"instruction {label} routes invalid status {''.join(s)} onward")
        cyc = gadget_cycle(inst.update, _cycle_name(label))
        cycles.append(cyc)
        prof = profile_cycle(cyc)
        size = len(cyc)
        for r, pos in enumerate(prof.essential_positions, 1):
            k = inst.branches[RESIDUE_STATUS[r % 6]]
            delta[(cyc.name, pos % size)] = HALT if k == n else _cycle_name(k)
    program = SuperMouseProgram(tuple(cycles), delta, _cycle_name(0))
    return CompilationArtifact(program, {i: _cycle_name(i) for i in range(n)}, cm)


def pump_program(prog: SuperMouseProgram) -> tuple[SuperMouseProgram, dict[str, int]]:
    """Repeat every cycle up to the least common multiple of the cycle lengths.

    Dispatch entries are copied to every state congruent modulo the original
    cycle length.  Returns the pumped program and the repetition counts.
    """
    length = lcm(*(len(c) for c in prog.cycles))
    cycles = []
    delta = {}
    reps = {}
    for cyc in prog.cycles:
        n = len(cyc)
        reps[cyc.name] = length // n
        cycles.append(CycleString(cyc.letters * reps[cyc.name], cyc.name))
        for s in range(length):
            target = prog.delta.get((cyc.name, s % n))
            if target is not None:
                delta[(cyc.name, s)] = target
    distinguished = prog.distinguished_state
    pumped = SuperMouseProgram(tuple(cycles), delta, prog.start, prog.original_mode, distinguished)
    return pumped, reps


def pump(artifact: CompilationArtifact) -> CompilationArtifact:
    program, reps = pump_program(artifact.program)
    old = artifact.pump_factor or {}
    factors = {name: r * old.get(name, 1) for name, r in reps.items()}
    return CompilationArtifact(program, dict(artifact.instr_to_cycle), artifact.source,
                               artifact.halt_cycle, factors)


# ---------------------------------------------------------------------------
# lockstep verification

@dataclass(frozen=True)
class CotraceRecord:
    hit: int
    x: int
    decoded: tuple[int, int, int]
    cm: CM2Config
    dispatched_to: str
    match: bool

    def as_json(self) -> dict:
        r1, r2, q = self.decoded
        return {
            "hit": self.hit,
            "x": str(self.x),
            "decoded": {"r1": str(r1), "r2": str(r2), "q": str(q)},
            "cm": {"label": self.cm.label, "r1": str(self.cm.r1), "r2": str(self.cm.r2)},
            "dispatched_to": self.dispatched_to,
            "match": self.match,
        }


@dataclass
class CotraceReport:
    records: list[CotraceRecord] = field(default_factory=list)
    mismatches: list[str] = field(default_factory=list)
    mouse_halted: bool = False
    cm_halted: bool = False

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        end = "HALT" if self.mouse_halted else "running"
        return f"{len(self.records)} hits, {len(self.mismatches)} mismatches, {end}"


def cotrace(cm: CM2Program, artifact: CompilationArtifact, max_hits: int = 200,
            accelerated: bool = True) -> CotraceReport:
    """Run mouse and machine side by side, comparing after every hit.

    After hit ``k`` the decoded hit coordinate must equal the machine's
    registers after ``k`` steps with cofactor ``5**d`` (``d`` = number of R2
    decrements so far), the mouse must be on the cycle of the machine's
    label, and the mouse halts exactly when the machine does.
    """
    report = CotraceReport()
    prog = artifact.program
    config = CM2Config(0, 0, 0)
    decrements = 0
    prev_x = 1
    halt = cm.halt_label
    for hit in iter_hits(prog, 1, accelerated):
        k = hit.hit_index
        pre = config
        try:
            config = step_cm(cm, config)
        except DecrementOfNull as exc:
            report.mismatches.append(f"hit {k}: machine error: {exc}")
            break
        if cm.instructions[pre.label].update == (0, -1):
            decrements += 1
        decoded = decode(hit.x_value)
        problems = []
        if decoded != (config.r1, config.r2, 5**decrements):
            problems.append(f"decoded {decoded} != registers ({config.r1}, {config.r2}, 5^{decrements})")
        expected = HALT if config.label == halt else artifact.instr_to_cycle[config.label]
        if hit.dispatched_to != expected:
            problems.append(f"dispatched to {hit.dispatched_to}, machine at label {config.label}")
        if hit.entered_state[0] != artifact.instr_to_cycle[pre.label]:
            problems.append(f"hit in cycle {hit.entered_state[0]}, machine executed label {pre.label}")
        if RESIDUE_STATUS[prev_x % 6] != status(pre.r1, pre.r2):
            problems.append(f"x={prev_x} residue does not give statuses of {pre}")
        rec = CotraceRecord(k, hit.x_value, decoded, config, hit.dispatched_to, not problems)
        report.records.append(rec)
        report.mismatches.extend(f"hit {k}: {p}" for p in problems)
        prev_x = hit.x_value
        if problems:
            break
        if hit.dispatched_to == HALT:
            report.mouse_halted = True
        report.cm_halted = config.label == halt
        if report.mouse_halted or report.cm_halted or k >= max_hits:
            break
    else:
        if not report.cm_halted and len(report.records) < max_hits:
            report.mismatches.append(f"mouse stopped hitting after {len(report.records)} hits")
    return report


@dataclass(frozen=True)
class Verdict:
    stopped: bool
    hits: int
    steps: int = 0

    def __str__(self):
        return f"STOPPED({self.hits})" if self.stopped else f"UNRESOLVED({self.hits})"


def halting_reduction(cm: CM2Program, max_hits: int = 500) -> Verdict:
    """Normalize, compile and run; ``STOPPED(k)`` iff the mouse halts on hit ``k``.

    ``k`` counts steps of the normalized machine, which equals the source
    step count when the source is already restricted.
    """
    artifact = compile_program(normalize(cm))
    run = run_hits(artifact.program, 1, max_hits)
    if run.stopped:
        return Verdict(True, len(run.hits), run.steps)
    return Verdict(False, max_hits, run.steps)


def cm_halt_steps(cm: CM2Program, max_steps: int) -> int | None:
    """Interpreter oracle: steps to halt for the normalized machine, if within bound."""
    run = run_cm(normalize(cm), max_steps=max_steps)
    return run.steps if run.halted else None
