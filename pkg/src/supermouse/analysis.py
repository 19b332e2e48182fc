"""Static analysis of cycle strings and closed-form traversal.

The gap ``x - y`` moves by +1 on EAST and -1 on NORTH, so a traversal from
``(x, 0)`` ends exactly when the running sum of the cycle first reaches
``-x``.  Everything here follows from the prefix-sum profile of one period.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NotAffineError, StructuralError
from .mouse import CycleString, Traversal, traverse_step

DEFAULT_VERIFY_MAX = 2000


@dataclass(frozen=True)
class CycleProfile:
    """Per-period statistics of a cycle.

    ``essential_positions[v - 1]`` is the 1-based position where the prefix
    sum first reaches ``-v``; these are exactly the strict new minima of one
    period.  ``prefix_e_counts`` holds the EAST count before each of them.
    """

    letters: str
    e: int
    m: int
    essential_positions: tuple[int, ...]
    prefix_e_counts: tuple[int, ...]

    @property
    def closure(self) -> int:
        return self.m - self.e

    @property
    def period_length(self) -> int:
        return self.m + self.e

    @property
    def depth(self) -> int:
        """Deepest gap closure reached within one period."""
        return len(self.essential_positions)

    @property
    def balanced(self) -> bool:
        """True when one period closes ``closure`` and never dips deeper."""
        return self.closure > 0 and self.depth == self.closure

    def syntactic_essentials(self) -> tuple[int, ...]:
        """Positions of N letters whose cyclic predecessor is not an E."""
        s = self.letters
        return tuple(i + 1 for i, ch in enumerate(s) if ch == "N" and s[i - 1] != "E")


def _letters(cycle: CycleString | str) -> str:
    if isinstance(cycle, CycleString):
        return cycle.letters
    return CycleString(cycle).letters


def profile_cycle(cycle: CycleString | str) -> CycleProfile:
    """Profile a cycle given as a :class:`CycleString` or a plain letter string."""
    return _profile(_letters(cycle))


@lru_cache(maxsize=4096)
def _profile(letters: str) -> CycleProfile:
    level = 0
    east = 0
    positions = []
    prefix_e = []
    for i, ch in enumerate(letters, 1):
        if ch == "E":
            level += 1
            east += 1
        else:
            level -= 1
            if level < -len(positions):
                positions.append(i)
                prefix_e.append(east)
    return CycleProfile(letters, east, len(letters) - east, tuple(positions), tuple(prefix_e))


def _rotated(letters: str, start_state: int) -> CycleProfile:
    return _profile(letters[start_state:] + letters[:start_state])


def first_passage(profile: CycleProfile, x: int) -> Traversal | None:
    """Closed-form traversal from ``(x, 0)`` at state 0.

    Skips whole periods arithmetically, then looks the final position up in
    the essential-position table.  Exact for every cycle, balanced or not.
    """
    if x < 1:
        raise StructuralError("traversal needs x >= 1")
    depth = profile.depth
    c = profile.closure
    if x <= depth:
        periods = 0
    elif c <= 0:
        return None
    else:
        periods = -(-(x - depth) // c)
    level = x - c * periods
    pos = profile.essential_positions[level - 1]
    n = profile.period_length
    east = periods * profile.e + profile.prefix_e_counts[level - 1]
    steps = periods * n + pos
    return Traversal(x + east, steps % n, steps)


def traverse_from(cycle: CycleString | str, x: int, start_state: int = 0) -> Traversal | None:
    """Accelerated traversal starting in any state of the cycle."""
    letters = _letters(cycle)
    if start_state == 0:
        return first_passage(_profile(letters), x)
    tr = first_passage(_rotated(letters, start_state), x)
    if tr is None:
        return None
    return Traversal(tr.x, (start_state + tr.steps) % len(letters), tr.steps)


# ---------------------------------------------------------------------------
# affine law

@dataclass(frozen=True)
class AffineLaw:
    """``x' = x + (x // c) * b + t[x % c]`` for one cycle."""

    b: int
    c: int
    t: tuple[int, ...]
    profile: CycleProfile = field(repr=False)
    verified_to: int = 0

    def apply(self, x: int) -> int:
        q, r = divmod(x, self.c)
        return x + q * self.b + self.t[r]


def characterize_affine(cycle: CycleString | str, x_max: int = DEFAULT_VERIFY_MAX) -> AffineLaw:
    """Fit the affine update law from step simulation, then verify it.

    Constants are read off ``x = r`` (``x = c`` for residue 0) and checked at
    ``x + c``; the law is then compared with :func:`traverse_step` for every
    ``x`` in ``[1, x_max]``.  Raises :class:`NotAffineError` with the smallest
    failing ``x``.
    """
    cyc = cycle if isinstance(cycle, CycleString) else CycleString(cycle)
    prof = profile_cycle(cyc)
    c = prof.closure
    if c <= 0:
        raise StructuralError("affine law needs positive closure")
    b = prof.e
    t = []
    for r in range(c):
        x = r if r else c
        t.append(traverse_step(cyc, x).x - x - (x // c) * b)
    law = AffineLaw(b, c, tuple(t), prof)
    for x in range(1, max(x_max, 2 * c) + 1):
        actual = traverse_step(cyc, x).x
        if law.apply(x) != actual:
            raise NotAffineError(x, law.apply(x), actual)
    return AffineLaw(b, c, tuple(t), prof, max(x_max, 2 * c))


def traverse_fast(law: AffineLaw | CycleProfile, x: int) -> Traversal | None:
    """Closed-form traversal from ``(x, 0)`` at state 0.

    With an :class:`AffineLaw` the hit coordinate comes from the law itself;
    with a bare :class:`CycleProfile` the general first-passage formula is
    used.  The step count is exact in both cases.
    """
    if isinstance(law, CycleProfile):
        return first_passage(law, x)
    prof = law.profile
    if not prof.balanced:
        tr = first_passage(prof, x)
        return Traversal(law.apply(x), tr.state, tr.steps)
    c = law.c
    n = prof.period_length
    periods, r = divmod(x - 1, c)
    steps = periods * n + prof.essential_positions[r]
    return Traversal(law.apply(x), steps % n, steps)


@dataclass
class EquivalenceReport:
    pattern: str
    x_max: int
    checked: int = 0
    mismatches: list[tuple[int, Traversal | None, Traversal | None]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def equivalence_check(cycle: CycleString | str, x_max: int = DEFAULT_VERIFY_MAX, law: AffineLaw | None = None) -> EquivalenceReport:
    """Compare the accelerated and step-level traversals on ``[1, x_max]``.

    Uses ``law`` when given, otherwise the general first-passage formula.
    """
    cyc = cycle if isinstance(cycle, CycleString) else CycleString(cycle)
    prof = profile_cycle(cyc)
    if prof.closure <= 0:
        raise StructuralError("equivalence check needs positive closure")
    fast_with = law if law is not None else prof
    report = EquivalenceReport(cyc.pattern, x_max)
    for x in range(1, x_max + 1):
        slow = traverse_step(cyc, x)
        fast = traverse_fast(fast_with, x)
        report.checked += 1
        if slow != fast:
            report.mismatches.append((x, slow, fast))
    return report


def measured_factor_on_multiples(cycle: CycleString | str, samples: int = 5):
    """Ratios ``x'/x`` at ``x = c, 2c, ...``; helper for reports."""
    from fractions import Fraction

    prof = profile_cycle(cycle)
    c = prof.closure
    return [Fraction(first_passage(prof, k * c).x, k * c) for k in range(1, samples + 1)]


def random_cycle(rng: random.Random, max_len: int = 24, name: str = "c0") -> CycleString:
    """A random cycle with positive closure."""
    while True:
        n = rng.randint(1, max_len)
        p_north = rng.uniform(0.6, 0.95)
        letters = "".join("N" if rng.random() < p_north else "E" for _ in range(n))
        if letters.count("N") > letters.count("E"):
            return CycleString(letters, name)
