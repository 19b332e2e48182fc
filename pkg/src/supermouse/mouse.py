"""Step semantics of the Budach mouse and the multi-cycle super-mouse.

A mouse walks the octant ``0 <= y <= x`` of the integer grid.  Each state of
a cycle carries one letter, ``N`` or ``E``.  State ``i`` executes letter
``i + 1`` (1-based), so after executing letter ``j`` the mouse is in state
``j mod n``.  When a NORTH move lands on the diagonal at ``(a, a)`` the mouse
is put back on ``(a, 0)``; the super-mouse additionally jumps to the start of
the cycle chosen by the dispatch table.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from typing import Iterator, Mapping, NamedTuple

from .errors import PatternError, StructuralError

HALT = "HALT"


class Direction(enum.Enum):
    NORTH = "N"
    EAST = "E"


# ---------------------------------------------------------------------------
# cycle patterns

def parse_pattern(text: str) -> str:
    """Expand a cycle pattern such as ``((EN)*5NNN)*2`` into its letters.

    Grammar::

        seq  := item+
        item := 'N' | 'E' | '(' seq ')' '*' INT | item '*' INT

    Whitespace is ignored.  Raises :class:`PatternError` with a column on
    malformed input.
    """
    src = text
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(src) and src[pos].isspace():
            pos += 1

    def parse_int():
        nonlocal pos
        skip_ws()
        m = re.compile(r"\d+").match(src, pos)
        if not m:
            raise PatternError("expected repetition count", column=pos + 1)
        pos = m.end()
        return int(m.group())

    def parse_item():
        nonlocal pos
        skip_ws()
        ch = src[pos]
        if ch in "NE":
            pos += 1
            body = ch
        elif ch == "(":
            start = pos
            pos += 1
            body = parse_seq()
            skip_ws()
            if pos >= len(src) or src[pos] != ")":
                raise PatternError("unbalanced '('", column=start + 1)
            pos += 1
            skip_ws()
            if pos >= len(src) or src[pos] != "*":
                raise PatternError("group must be followed by '*' INT", column=pos + 1)
        else:
            raise PatternError(f"unexpected character {ch!r}", column=pos + 1)
        skip_ws()
        while pos < len(src) and src[pos] == "*":
            pos += 1
            body = body * parse_int()
            skip_ws()
        return body

    def parse_seq():
        nonlocal pos
        parts = []
        skip_ws()
        while pos < len(src) and src[pos] != ")":
            parts.append(parse_item())
            skip_ws()
        if not parts:
            raise PatternError("empty sequence", column=pos + 1)
        return "".join(parts)

    letters = parse_seq()
    if pos != len(src):
        raise PatternError("unbalanced ')'", column=pos + 1)
    if not letters:
        raise PatternError("pattern expands to no letters")
    return letters


def format_pattern(letters: str) -> str:
    """Compact ``letters`` as ``(unit)*k`` using its smallest period."""
    n = len(letters)
    for p in range(1, n // 2 + 1):
        if n % p == 0 and letters[:p] * (n // p) == letters:
            return f"({letters[:p]})*{n // p}"
    return letters


@dataclass(frozen=True)
class CycleString:
    """Program text of one mouse cycle."""

    letters: str
    name: str = "c0"

    def __post_init__(self):
        if not self.letters:
            raise StructuralError("a cycle needs at least one letter")
        if set(self.letters) - {"N", "E"}:
            raise StructuralError(f"cycle {self.name!r} has letters outside {{N, E}}")
        if not re.fullmatch(r"[A-Za-z_][\w.-]*", self.name) or self.name == HALT:
            raise StructuralError(f"invalid cycle name {self.name!r}")

    @classmethod
    def from_pattern(cls, pattern: str, name: str = "c0") -> "CycleString":
        return cls(parse_pattern(pattern), name)

    def __len__(self):
        return len(self.letters)

    @property
    def directions(self) -> tuple[Direction, ...]:
        return tuple(Direction(ch) for ch in self.letters)

    @property
    def pattern(self) -> str:
        return format_pattern(self.letters)


# ---------------------------------------------------------------------------
# programs and configurations

@dataclass(frozen=True)
class SuperMouseProgram:
    """Cycles plus the dispatch table applied at diagonal hits.

    ``delta`` maps ``(cycle name, entered state)`` to a cycle name or
    :data:`HALT`.  In ``original_mode`` the single cycle keeps running
    through resets and ``delta`` is ignored.
    """

    cycles: tuple[CycleString, ...]
    delta: Mapping[tuple[str, int], str] = field(default_factory=dict)
    start: str | None = None
    original_mode: bool = False
    distinguished_state: tuple[str, int] | None = None

    def __post_init__(self):
        cycles = tuple(self.cycles)
        object.__setattr__(self, "cycles", cycles)
        object.__setattr__(self, "delta", dict(self.delta))
        if not cycles:
            raise StructuralError("program has no cycles")
        names = [c.name for c in cycles]
        if len(set(names)) != len(names):
            raise StructuralError("duplicate cycle names")
        if self.start is None:
            object.__setattr__(self, "start", names[0])
        by_name = {c.name: c for c in cycles}
        if self.start not in by_name:
            raise StructuralError(f"start cycle {self.start!r} does not exist")
        if self.original_mode and len(cycles) != 1:
            raise StructuralError("original mode requires exactly one cycle")
        for (name, idx), target in self.delta.items():
            if name not in by_name or not 0 <= idx < len(by_name[name]):
                raise StructuralError(f"delta key {name}[{idx}] is out of range")
            if target != HALT and target not in by_name:
                raise StructuralError(f"delta target {target!r} does not exist")
        if self.distinguished_state is not None:
            name, idx = self.distinguished_state
            if name not in by_name or not 0 <= idx < len(by_name[name]):
                raise StructuralError(f"distinguished state {name}[{idx}] is out of range")

    @classmethod
    def original(cls, cycle: CycleString, k: int | None = None) -> "SuperMouseProgram":
        """The single-cycle Budach mouse, optionally with stopping state ``q_k``."""
        return cls(
            (cycle,),
            start=cycle.name,
            original_mode=True,
            distinguished_state=None if k is None else (cycle.name, k),
        )

    def cycle(self, name: str) -> CycleString:
        for c in self.cycles:
            if c.name == name:
                return c
        raise StructuralError(f"no cycle named {name!r}")

    def dispatch(self, name: str, state: int) -> str:
        if self.original_mode:
            return name
        try:
            return self.delta[(name, state)]
        except KeyError:
            raise StructuralError(f"delta undefined on {name}[{state}]") from None


@dataclass(frozen=True)
class MouseConfig:
    x: int
    y: int
    cycle: str
    state: int = 0
    steps: int = 0
    hits: int = 0
    halted: bool = False


@dataclass(frozen=True)
class HitEvent:
    hit_index: int
    x_value: int
    entered_state: tuple[str, int]
    dispatched_to: str
    steps_elapsed: int


def initial_config(program: SuperMouseProgram, start_x: int = 1) -> MouseConfig:
    if start_x < 1:
        raise StructuralError("start_x must be at least 1")
    return MouseConfig(start_x, 0, program.start, 0)


def _check(config: MouseConfig, program: SuperMouseProgram) -> CycleString:
    cyc = program.cycle(config.cycle)
    if not 0 <= config.state < len(cyc):
        raise StructuralError(f"state {config.state} out of range for cycle {cyc.name!r}")
    if not 0 <= config.y <= config.x:
        raise StructuralError(f"position ({config.x}, {config.y}) is outside the octant")
    return cyc


def step(config: MouseConfig, program: SuperMouseProgram) -> tuple[MouseConfig, HitEvent | None]:
    """Execute one move; returns the new configuration and the hit, if any."""
    if config.halted:
        return config, None
    cyc = _check(config, program)
    n = len(cyc)
    letter = cyc.letters[config.state]
    x, y = config.x, config.y
    if letter == "E":
        x += 1
    else:
        y += 1
    state = (config.state + 1) % n
    steps = config.steps + 1
    if y != x:
        return replace(config, x=x, y=y, state=state, steps=steps), None

    target = program.dispatch(cyc.name, state)
    hit = HitEvent(config.hits + 1, x, (cyc.name, state), target, steps)
    if target == HALT:
        new = MouseConfig(x, 0, cyc.name, state, steps, hit.hit_index, halted=True)
    elif program.original_mode:
        new = MouseConfig(x, 0, cyc.name, state, steps, hit.hit_index)
    else:
        new = MouseConfig(x, 0, target, 0, steps, hit.hit_index)
    return new, hit


@dataclass(frozen=True)
class RunResult:
    final: MouseConfig
    hits: tuple[HitEvent, ...]
    stopped: bool


def _is_stop(hit: HitEvent, program: SuperMouseProgram) -> bool:
    return hit.dispatched_to == HALT or hit.entered_state == program.distinguished_state


def iter_steps(
    program: SuperMouseProgram, start_x: int = 1, max_steps: int = 0
) -> Iterator[tuple[MouseConfig, HitEvent | None]]:
    """Yield ``(config, hit)`` after each move, stopping on HALT or the distinguished state."""
    config = initial_config(program, start_x)
    for _ in range(max_steps):
        config, hit = step(config, program)
        yield config, hit
        if hit is not None and _is_stop(hit, program):
            return


def run_bounded(program: SuperMouseProgram, start_x: int = 1, max_steps: int = 1000) -> RunResult:
    config = initial_config(program, start_x)
    hits = []
    stopped = False
    for config, hit in iter_steps(program, start_x, max_steps):
        if hit is not None:
            hits.append(hit)
            stopped = _is_stop(hit, program)
    return RunResult(config, tuple(hits), stopped)


def trace_records(program: SuperMouseProgram, start_x: int = 1, max_steps: int = 1000) -> Iterator[dict]:
    """Line-oriented trace records; big integers are decimal strings."""
    for config, hit in iter_steps(program, start_x, max_steps):
        if hit is None:
            event, cycle, state, x, y = "move", config.cycle, config.state, config.x, config.y
        else:
            event = "halt" if hit.dispatched_to == HALT else "hit"
            (cycle, state), x, y = hit.entered_state, hit.x_value, hit.x_value
        yield {
            "step": str(config.steps),
            "cycle": cycle,
            "state": state,
            "x": str(x),
            "y": str(y),
            "event": event,
        }


# ---------------------------------------------------------------------------
# single traversals

class Traversal(NamedTuple):
    x: int
    state: int
    steps: int


def traverse_step(cycle: CycleString, x: int, start_state: int = 0) -> Traversal | None:
    """Walk from ``(x, 0)`` one letter at a time until the first diagonal hit.

    Returns ``None`` when the walk provably never reaches the diagonal: one
    period closes no gap and ``x`` exceeds the deepest prefix closure.
    """
    if x < 1:
        raise StructuralError("traversal needs x >= 1")
    letters = cycle.letters
    n = len(letters)
    letters = letters[start_state:] + letters[:start_state]
    net = 0
    lowest = 0
    for ch in letters:
        net += 1 if ch == "E" else -1
        lowest = min(lowest, net)
    if net >= 0 and x > -lowest:
        return None

    moves = [1 if ch == "E" else -1 for ch in letters]
    period_east = letters.count("E")
    gap = x
    periods = 0
    while True:
        for i, d in enumerate(moves, 1):
            gap += d
            if not gap:
                steps = periods * n + i
                east = periods * period_east + letters.count("E", 0, i)
                return Traversal(x + east, (start_state + steps) % n, steps)
        periods += 1


def check_original_stop(cycle: CycleString, k: int, max_steps: int) -> int | None:
    """Step at which the single-cycle mouse first hits the diagonal entering ``q_k``.

    Starts at ``(1, 0)`` in state 0.  Returns ``None`` if no such hit happens
    within ``max_steps`` moves (or ever, when the walk stops hitting at all).
    Hits are computed traversal-by-traversal with exact step accounting.
    """
    from .analysis import traverse_from

    if not 0 <= k < len(cycle):
        raise StructuralError(f"state {k} out of range")
    x, state, steps = 1, 0, 0
    while steps < max_steps:
        tr = traverse_from(cycle, x, state)
        if tr is None or steps + tr.steps > max_steps:
            return None
        steps += tr.steps
        x, state = tr.x, tr.state
        if state == k:
            return steps
    return None


# ---------------------------------------------------------------------------
# program text

_DELTA_RE = re.compile(r"([A-Za-z_][\w.-]*)\[(\d+)\]$")


def parse_program(text: str) -> SuperMouseProgram:
    """Parse the line-oriented super-mouse program format."""
    cycles = []
    delta = {}
    start = None
    original = False
    distinguished = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "cycle":
                name, _, pat = rest.partition(" ")
                if not pat.strip():
                    raise PatternError("cycle needs a name and a pattern")
                cycles.append(CycleString(parse_pattern(pat), name))
            elif word == "delta":
                key, _, target = rest.partition(" ")
                m = _DELTA_RE.match(key)
                if not m or not target.strip():
                    raise PatternError("expected 'delta <name>[<index>] <target>'")
                delta[(m.group(1), int(m.group(2)))] = target.strip()
            elif word == "start":
                start = rest
            elif word == "original" and not rest:
                original = True
            elif word == "distinguished":
                m = _DELTA_RE.match(rest)
                if not m:
                    raise PatternError("expected 'distinguished <name>[<index>]'")
                distinguished = (m.group(1), int(m.group(2)))
            else:
                raise PatternError(f"unknown directive {word!r}")
        except PatternError as exc:
            raise PatternError(str(exc), line=lineno) from None
        except StructuralError as exc:
            raise PatternError(str(exc), line=lineno) from None
    if not cycles:
        raise PatternError("program defines no cycles")
    try:
        return SuperMouseProgram(tuple(cycles), delta, start, original, distinguished)
    except StructuralError as exc:
        raise PatternError(str(exc)) from None


def format_program(program: SuperMouseProgram) -> str:
    lines = [f"cycle {c.name} {c.pattern}" for c in program.cycles]
    order = {c.name: i for i, c in enumerate(program.cycles)}
    for (name, idx), target in sorted(program.delta.items(), key=lambda kv: (order[kv[0][0]], kv[0][1])):
        lines.append(f"delta {name}[{idx}] {target}")
    lines.append(f"start {program.start}")
    if program.original_mode:
        lines.append("original")
    if program.distinguished_state is not None:
        name, idx = program.distinguished_state
        lines.append(f"distinguished {name}[{idx}]")
    return "\n".join(lines) + "\n"
