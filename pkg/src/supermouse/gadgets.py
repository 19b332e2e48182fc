"""Cycles that multiply x by an exact rational factor.

A cycle with closure ``c`` and ``e`` EAST letters per period sends
``x = c*j + r`` to ``x + j*e + a_r`` where ``a_r`` is the EAST count before
the ``r``-th strict minimum.  Multiplying by ``p/q`` on residue ``r`` therefore
needs ``e = c*(p - q)/q`` and ``a_r = (p - q)*r/q``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .analysis import AffineLaw, characterize_affine, first_passage, profile_cycle
from .errors import InfeasibleError, NotMultiplicativeError, StructuralError
from .mouse import CycleString, format_pattern, parse_pattern, traverse_step

DEFAULT_CLOSURE = 6


@dataclass(frozen=True)
class GadgetSpec:
    factor: Fraction
    closure: int = DEFAULT_CLOSURE
    valid_residues: frozenset[int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "factor", Fraction(self.factor))
        if self.closure < 1:
            raise StructuralError("closure must be positive")
        if self.valid_residues is None:
            object.__setattr__(self, "valid_residues", frozenset(range(self.closure)))
        else:
            object.__setattr__(self, "valid_residues", frozenset(r % self.closure for r in self.valid_residues))

    @property
    def p(self) -> int:
        return self.factor.numerator

    @property
    def q(self) -> int:
        return self.factor.denominator

    def accepts(self, x: int) -> bool:
        return x % self.closure in self.valid_residues


@dataclass(frozen=True)
class Gadget:
    spec: GadgetSpec
    cycle: CycleString
    law: AffineLaw = field(repr=False)
    certificate: int = 0

    @classmethod
    def claim(cls, cycle: CycleString | str, factor, closure: int = DEFAULT_CLOSURE, residues=None) -> "Gadget":
        """Wrap an existing cycle with a claimed factor, without checking it."""
        cyc = cycle if isinstance(cycle, CycleString) else CycleString.from_pattern(cycle)
        return cls(GadgetSpec(Fraction(factor), closure, residues), cyc, characterize_affine(cyc, 0))


def _targets(spec: GadgetSpec) -> list[int]:
    """EAST counts before each of the ``closure`` minima; index r-1 for minimum r."""
    p, q, c = spec.p, spec.q, spec.closure
    if p <= q:
        raise InfeasibleError(f"factor {spec.factor} must exceed 1")
    if (c * (p - q)) % q:
        raise InfeasibleError(f"EAST count {c}*({p}-{q})/{q} per period is not integral")
    for r in spec.valid_residues:
        if ((p - q) * r) % q:
            raise InfeasibleError(f"residue {r}: EAST prefix ({p}-{q})*{r}/{q} is not integral")
    # ceil keeps the sequence non-decreasing and exact wherever it is integral
    return [-(-(p - q) * r // q) for r in range(1, c + 1)]


def synthesize(spec: GadgetSpec, verify_to: int = 1000) -> Gadget:
    """Build a cycle realizing ``spec`` and verify it before returning.

    Between consecutive minima the cycle emits ``(EN)^k N`` where ``k`` is the
    number of EAST letters needed to hit the next prefix target.
    """
    targets = _targets(spec)
    parts = []
    prev = 0
    for a in targets:
        parts.append("EN" * (a - prev) + "N")
        prev = a
    letters = "".join(parts)
    # collapse to the shortest repeating unit, e.g. (ENN)*6 rather than 18 letters
    cycle = CycleString(parse_pattern(format_pattern(letters)), "gadget")
    gadget = Gadget(spec, cycle, characterize_affine(cycle, verify_to), verify_to)
    report = verify_exactness(gadget, verify_to)
    if not report.passed:
        raise InfeasibleError(f"synthesized cycle fails at x={report.counterexample}")
    return gadget


@dataclass(frozen=True)
class ExactnessReport:
    passed: bool
    checked: int
    counterexample: tuple[int, int] | None = None


def verify_exactness(gadget: Gadget, x_max: int = 1000) -> ExactnessReport:
    """Check ``x' == factor * x`` by step simulation on every valid x <= x_max."""
    spec = gadget.spec
    checked = 0
    for x in range(1, x_max + 1):
        if not spec.accepts(x):
            continue
        tr = traverse_step(gadget.cycle, x)
        checked += 1
        if tr is None or tr.x != spec.factor * x:
            return ExactnessReport(False, checked, (x, None if tr is None else tr.x))
    return ExactnessReport(True, checked)


def measure_factor(cycle: CycleString | str, samples: int = 20) -> Fraction:
    """The exact ratio ``x'/x`` shared by ``x = c, 2c, ..., samples*c``.

    Raises :class:`NotMultiplicativeError` carrying the per-sample ratios when
    they disagree.
    """
    cyc = cycle if isinstance(cycle, CycleString) else CycleString.from_pattern(cycle)
    c = profile_cycle(cyc).closure
    if c <= 0:
        raise StructuralError("measuring a factor needs positive closure")
    table = {}
    for k in range(1, samples + 1):
        x = k * c
        table[x] = Fraction(traverse_step(cyc, x).x, x)
    ratios = set(table.values())
    if len(ratios) != 1:
        raise NotMultiplicativeError(table)
    return ratios.pop()


def residue_table(cycle: CycleString | str) -> dict[int, Fraction]:
    """Ratio ``x'/x`` at the smallest positive representative of each residue."""
    cyc = cycle if isinstance(cycle, CycleString) else CycleString.from_pattern(cycle)
    prof = profile_cycle(cyc)
    c = prof.closure
    return {r: Fraction(first_passage(prof, r or c).x, r or c) for r in range(c)}


# Gadgets the compiler uses, keyed by register update.
VERIFIED_PATTERNS = {
    (1, 0): "(ENN)*6",
    (0, -1): "(ENNENNN)*2",
    (-1, 1): "(ENNN)*3",
}

GADGET_SPECS = {
    (1, 0): GadgetSpec(Fraction(2)),
    (0, -1): GadgetSpec(Fraction(5, 3), valid_residues=frozenset({0, 3})),
    (-1, 1): GadgetSpec(Fraction(3, 2), valid_residues=frozenset({0, 2, 4})),
}

# Cycle strings printed in the source construction, with the factors claimed there.
PRINTED_GADGETS = {
    (1, 0): ("(ENENN)*6", Fraction(2)),
    (0, -1): ("((EN)*5NNN)*2", Fraction(5, 3)),
    (-1, 1): ("((EN)*3NN)*3", Fraction(3, 2)),
}


@dataclass(frozen=True)
class AuditRow:
    update: tuple[int, int]
    pattern: str
    length: int
    claimed: Fraction
    measured: Fraction
    east_over_closure: Fraction

    @property
    def agrees(self) -> bool:
        return self.claimed == self.measured


def audit_printed_gadgets() -> list[AuditRow]:
    """Measure the printed cycle strings under plain step semantics.

    The claimed factors coincide with ``e/closure`` while the measured factor
    is ``m/closure``; every row therefore disagrees.
    """
    rows = []
    for update, (pattern, claimed) in PRINTED_GADGETS.items():
        cyc = CycleString.from_pattern(pattern)
        prof = profile_cycle(cyc)
        rows.append(AuditRow(update, pattern, len(cyc), claimed, measure_factor(cyc),
                             Fraction(prof.e, prof.closure)))
    return rows


def gadget_cycle(update: tuple[int, int], name: str) -> CycleString:
    return CycleString(parse_pattern(VERIFIED_PATTERNS[update]), name)
