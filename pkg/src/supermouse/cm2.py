"""Two-counter machines: parsing, interpretation and normalization.

Each instruction carries a register update ``(D1, D2)`` and four branch
targets, one per zero/positive status of the two registers.  Statuses are
read from the registers *before* the update is applied.  Label ``N`` (the
number of instructions) means halt.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Mapping

from .errors import CMError, DecrementOfNull

STATUSES = (("Z", "Z"), ("Z", "P"), ("P", "Z"), ("P", "P"))
PRIMITIVE_UPDATES = ((1, 0), (0, -1), (-1, 1))

# general update -> primitive sequence; every prefix is safe when the original is valid
DECOMPOSITION = {
    (1, 0): ((1, 0),),
    (0, -1): ((0, -1),),
    (-1, 1): ((-1, 1),),
    (0, 1): ((1, 0), (-1, 1)),
    (1, -1): ((0, -1), (1, 0)),
    (-1, 0): ((-1, 1), (0, -1)),
    (1, 1): ((1, 0), (1, 0), (-1, 1)),
    (-1, -1): ((-1, 1), (0, -1), (0, -1)),
    (0, 0): ((1, 0), (-1, 1), (0, -1)),
}


def status(r1: int, r2: int) -> tuple[str, str]:
    return ("P" if r1 else "Z", "P" if r2 else "Z")


@dataclass(frozen=True)
class Instruction:
    update: tuple[int, int]
    branches: Mapping[tuple[str, str], int]

    def __post_init__(self):
        object.__setattr__(self, "update", tuple(self.update))
        object.__setattr__(self, "branches", dict(self.branches))
        if len(self.update) != 2 or any(d not in (-1, 0, 1) for d in self.update):
            raise CMError(f"update {self.update} must be a pair over {{-1, 0, +1}}")
        if set(self.branches) != set(STATUSES):
            raise CMError("an instruction needs exactly one branch per status ZZ, ZP, PZ, PP")

    @classmethod
    def goto(cls, update, target: int) -> "Instruction":
        """Unconditional instruction: all four branches lead to ``target``."""
        return cls(update, {s: target for s in STATUSES})

    @property
    def restricted(self) -> bool:
        return self.update in PRIMITIVE_UPDATES


@dataclass(frozen=True)
class CM2Program:
    instructions: tuple[Instruction, ...]

    def __post_init__(self):
        object.__setattr__(self, "instructions", tuple(self.instructions))
        n = len(self.instructions)
        for label, inst in enumerate(self.instructions):
            for s, k in inst.branches.items():
                if not 0 <= k <= n:
                    raise CMError(f"instruction {label} branch {''.join(s)} targets {k}, outside [0, {n}]")

    @property
    def halt_label(self) -> int:
        return len(self.instructions)

    def __len__(self):
        return len(self.instructions)

    @property
    def restricted(self) -> bool:
        return all(inst.restricted for inst in self.instructions)


@dataclass(frozen=True)
class CM2Config:
    label: int
    r1: int = 0
    r2: int = 0


def step_cm(program: CM2Program, config: CM2Config) -> CM2Config:
    if not 0 <= config.label < len(program):
        raise CMError(f"label {config.label} is not an instruction")
    if config.r1 < 0 or config.r2 < 0:
        raise CMError("registers must be non-negative")
    inst = program.instructions[config.label]
    d1, d2 = inst.update
    if d1 < 0 and config.r1 == 0:
        raise DecrementOfNull(config.label, 1, config)
    if d2 < 0 and config.r2 == 0:
        raise DecrementOfNull(config.label, 2, config)
    target = inst.branches[status(config.r1, config.r2)]
    return CM2Config(target, config.r1 + d1, config.r2 + d2)


@dataclass(frozen=True)
class CMRun:
    trace: tuple[CM2Config, ...]
    halted: bool

    @property
    def steps(self) -> int:
        return len(self.trace) - 1

    @property
    def final(self) -> CM2Config:
        return self.trace[-1]


def run_cm(program: CM2Program, config: CM2Config | None = None, max_steps: int = 1000) -> CMRun:
    """Run until the halt label or ``max_steps``; ``trace[0]`` is the start."""
    config = config or CM2Config(0, 0, 0)
    trace = [config]
    halt = program.halt_label
    while config.label != halt and len(trace) <= max_steps:
        config = step_cm(program, config)
        trace.append(config)
    return CMRun(tuple(trace), config.label == halt)


def normalize(program: CM2Program) -> CM2Program:
    """Rewrite every instruction using only the three primitive updates.

    Instruction ``i`` keeps label ``i`` and its four branches, carrying the
    first primitive of its decomposition.  Each distinct branch target gets
    its own unconditional chain for the remaining primitives, appended after
    the original labels.  Programs that are already restricted come back
    unchanged apart from the halt label.
    """
    n = len(program)
    chains = []  # (update, next chain index or None, original target)
    heads = []  # (update, branches); targets are ("orig", k) or ("chain", j)
    for inst in program.instructions:
        first, *rest = DECOMPOSITION[inst.update]
        route = {}
        for target in sorted(set(inst.branches.values())):
            if not rest:
                route[target] = ("orig", target)
                continue
            route[target] = ("chain", len(chains))
            for j, upd in enumerate(rest):
                nxt = len(chains) + 1 if j + 1 < len(rest) else None
                chains.append((upd, nxt, target))
        heads.append((first, {s: route[k] for s, k in inst.branches.items()}))
    halt = n + len(chains)

    def resolve(ref):
        kind, k = ref
        if kind == "chain":
            return n + k
        return halt if k == n else k

    out = [Instruction(upd, {s: resolve(ref) for s, ref in br.items()}) for upd, br in heads]
    for upd, nxt, target in chains:
        out.append(Instruction.goto(upd, resolve(("orig", target) if nxt is None else ("chain", nxt))))
    return CM2Program(tuple(out))


def boundary_projection(run: CMRun, original_size: int, normalized_halt: int) -> list[CM2Config]:
    """Configs of a normalized run that sit at original instruction boundaries."""
    out = []
    for cfg in run.trace:
        if cfg.label < original_size:
            out.append(cfg)
        elif cfg.label == normalized_halt:
            out.append(CM2Config(original_size, cfg.r1, cfg.r2))
    return out


# ---------------------------------------------------------------------------
# text format

_INST_RE = re.compile(r"inst\s+(\d+)\s*:\s*([+-]?\d+)\s*,\s*([+-]?\d+)\s*;(.*)$")
_BRANCH_RE = re.compile(r"([ZP])([ZP])\s*->\s*(\d+|HALT)$")


def parse_cm(text: str) -> CM2Program:
    """Parse ``inst <label>: <D1>,<D2> ; ZZ-><k> ZP-><k> PZ-><k> PP-><k>`` lines."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _INST_RE.match(line)
        if not m:
            raise CMError(f"line {lineno}: expected 'inst <label>: <D1>,<D2> ; <branches>'")
        branches = {}
        for tok in m.group(4).split():
            b = _BRANCH_RE.match(tok)
            if not b:
                raise CMError(f"line {lineno}: bad branch {tok!r}")
            key = (b.group(1), b.group(2))
            if key in branches:
                raise CMError(f"line {lineno}: duplicate branch {''.join(key)}")
            branches[key] = b.group(3)
        rows.append((lineno, int(m.group(1)), (int(m.group(2)), int(m.group(3))), branches))
    labels = [r[1] for r in rows]
    if labels != list(range(len(rows))):
        raise CMError(f"labels must be dense 0..N-1 in order, got {labels}")
    n = len(rows)
    insts = []
    for lineno, _, update, branches in rows:
        try:
            insts.append(Instruction(update, {s: n if k == "HALT" else int(k) for s, k in branches.items()}))
        except CMError as exc:
            raise CMError(f"line {lineno}: {exc}") from None
    return CM2Program(tuple(insts))


def format_cm(program: CM2Program) -> str:
    n = len(program)
    lines = []
    for label, inst in enumerate(program.instructions):
        d1, d2 = inst.update
        br = " ".join(f"{a}{b}->{'HALT' if k == n else k}" for (a, b), k in
                      ((s, inst.branches[s]) for s in STATUSES))
        lines.append(f"inst {label}: {d1:+d},{d2:+d} ; {br}".replace("+0", "0"))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# random machines for property sweeps

def random_program(rng: random.Random, size: int, restricted: bool = True, halt_bias: float = 0.1) -> CM2Program:
    updates = PRIMITIVE_UPDATES if restricted else tuple(DECOMPOSITION)
    insts = []
    for _ in range(size):
        branches = {s: size if rng.random() < halt_bias else rng.randrange(size) for s in STATUSES}
        insts.append(Instruction(rng.choice(updates), branches))
    return CM2Program(tuple(insts))


def random_valid_program(rng: random.Random, size: int | None = None, restricted: bool = True,
                         steps: int = 200, attempts: int = 10_000) -> CM2Program:
    """Rejection-sample a program that runs ``steps`` steps without a null decrement."""
    for _ in range(attempts):
        prog = random_program(rng, size or rng.randint(2, 8), restricted)
        try:
            run_cm(prog, max_steps=steps)
        except DecrementOfNull:
            continue
        return prog
    raise CMError("no valid program found")
