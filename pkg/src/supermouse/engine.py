"""Hit-level execution: one diagonal hit per iteration instead of one move.

Both engines share the dispatch logic; they differ only in how a single
traversal is computed (letter by letter, or in closed form).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .analysis import traverse_from
from .mouse import HALT, HitEvent, SuperMouseProgram, initial_config, traverse_step


def iter_hits(program: SuperMouseProgram, start_x: int = 1, accelerated: bool = True) -> Iterator[HitEvent]:
    """Yield every diagonal hit until HALT, the distinguished state, or divergence."""
    traverse = traverse_from if accelerated else traverse_step
    config = initial_config(program, start_x)
    x, name, state = config.x, config.cycle, config.state
    steps = 0
    hits = 0
    while True:
        cyc = program.cycle(name)
        tr = traverse(cyc, x, state)
        if tr is None:
            return
        steps += tr.steps
        hits += 1
        target = program.dispatch(name, tr.state)
        hit = HitEvent(hits, tr.x, (name, tr.state), target, steps)
        yield hit
        if target == HALT or hit.entered_state == program.distinguished_state:
            return
        x = tr.x
        if program.original_mode:
            state = tr.state
        else:
            name, state = target, 0


@dataclass(frozen=True)
class HitRun:
    hits: tuple[HitEvent, ...]
    stopped: bool
    diverged: bool

    @property
    def steps(self) -> int:
        return self.hits[-1].steps_elapsed if self.hits else 0

    @property
    def final_x(self) -> int | None:
        return self.hits[-1].x_value if self.hits else None


def run_hits(program: SuperMouseProgram, start_x: int = 1, max_hits: int = 100,
             accelerated: bool = True) -> HitRun:
    """Collect up to ``max_hits`` hits.

    ``diverged`` means the mouse provably never reaches the diagonal again.
    """
    hits = []
    stopped = False
    for hit in iter_hits(program, start_x, accelerated):
        hits.append(hit)
        if hit.dispatched_to == HALT or hit.entered_state == program.distinguished_state:
            stopped = True
            break
        if len(hits) >= max_hits:
            break
    diverged = not stopped and len(hits) < max_hits
    return HitRun(tuple(hits), stopped, diverged)
