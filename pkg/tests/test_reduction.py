import random
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from supermouse.analysis import profile_cycle
from supermouse.cm2 import CM2Program, Instruction, parse_cm, random_valid_program, run_cm
from supermouse.engine import run_hits
from supermouse.errors import CompileError
from supermouse.mouse import HALT, SuperMouseProgram, format_program, parse_program, run_bounded
from supermouse.reduction import (RESIDUE_STATUS, compile_program, cotrace, decode, encode, halting_reduction,
                                  pump)

from conftest import HAND_MACHINES, load_machine


def test_encode_decode_examples():
    assert encode(0, 0, 1) == 1 and decode(1) == (0, 0, 1)
    assert decode(360) == (3, 2, 5)
    with pytest.raises(ValueError):
        encode(1, 1, 2)
    with pytest.raises(ValueError):
        decode(0)


@given(st.integers(0, 40), st.integers(0, 40), st.integers(0, 10**6))
def test_encode_roundtrip(r1, r2, k):
    q = 6 * k + 1 if k % 2 else 6 * k + 5
    assert decode(encode(r1, r2, q)) == (r1, r2, q)


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 10**4))
def test_residue_status_forced_by_encoding(r1, r2, k):
    q = 6 * k + 5
    x = encode(r1, r2, q)
    assert RESIDUE_STATUS[x % 6] == ("P" if r1 else "Z", "P" if r2 else "Z")


# -- compile -----------------------------------------------------------------

def test_compile_increment_transfer(machine):
    art = compile_program(machine("inc_transfer"))
    prog = art.program
    assert [c.pattern for c in prog.cycles] == ["(ENN)*6", "(ENNN)*3"]
    c0, c1 = prog.cycles
    for pos in profile_cycle(c0).essential_positions:
        assert prog.delta[(c0.name, pos % len(c0))] == c1.name
    ess = profile_cycle(c1).essential_positions
    for r in (2, 4):
        assert prog.delta[(c1.name, ess[r - 1] % len(c1))] == HALT
    assert prog.start == art.instr_to_cycle[0]


def test_compile_rejects():
    with pytest.raises(CompileError):
        compile_program(CM2Program(()))
    with pytest.raises(CompileError):
        compile_program(CM2Program((Instruction.goto((0, 1), 1),)))


def test_compile_strict(machine):
    loose = parse_cm("inst 0: +1,0 ; ZZ->1 ZP->1 PZ->1 PP->1\ninst 1: -1,+1 ; ZZ->0 ZP->HALT PZ->HALT PP->HALT\n")
    compile_program(loose)
    with pytest.raises(CompileError):
        compile_program(loose, strict=True)
    compile_program(machine("all_updates"), strict=True)
    compile_program(machine("transfer_loop"), strict=True)


def test_compiled_text_roundtrip(machine):
    art = compile_program(machine("all_updates"))
    assert parse_program(format_program(art.program)) == art.program


def test_delta_only_on_essential_states(machine):
    prog = compile_program(machine("all_updates")).program
    for c in prog.cycles:
        ess = {p % len(c) for p in profile_cycle(c).essential_positions}
        assert {s for (name, s) in prog.delta if name == c.name} == ess


# -- cotrace -----------------------------------------------------------------

def test_cotrace_increment_transfer(machine):
    cm = machine("inc_transfer")
    rep = cotrace(cm, compile_program(cm))
    assert rep.ok and rep.mouse_halted and rep.cm_halted
    assert [r.x for r in rep.records] == [2, 3]
    assert rep.records[0].dispatched_to == "i1"
    assert rep.records[1].dispatched_to == HALT
    assert rep.records[1].decoded == (0, 1, 1)
    assert rep.summary() == "2 hits, 0 mismatches, HALT"


def test_cotrace_doubling(machine):
    cm = machine("doubling")
    rep = cotrace(cm, compile_program(cm), max_hits=30)
    assert rep.ok and not rep.mouse_halted
    assert [r.x for r in rep.records] == [2**k for k in range(1, 31)]


def test_cotrace_immediate_halt(machine):
    cm = machine("immediate_halt")
    rep = cotrace(cm, compile_program(cm))
    assert rep.ok and rep.mouse_halted and [r.x for r in rep.records] == [2]


def test_cotrace_step_engine_agrees(machine):
    cm = machine("transfer_loop")
    art = compile_program(cm)
    fast = cotrace(cm, art, accelerated=True)
    slow = cotrace(cm, art, accelerated=False)
    assert fast.ok and slow.ok and fast.records == slow.records


def test_cotrace_step_level_run_matches(machine):
    # full move-by-move simulation agrees with the hit engine
    art = compile_program(machine("all_updates"))
    steps = run_bounded(art.program, 1, 100_000)
    hits = run_hits(art.program, 1, 100)
    assert steps.stopped and hits.stopped
    assert steps.hits == hits.hits


def test_cotrace_detects_wrong_gadget(machine):
    cm = machine("inc_transfer")
    art = compile_program(cm)
    # swap in the printed doubling string: hit coordinates stop encoding registers
    from supermouse.mouse import CycleString
    c0 = CycleString.from_pattern("(ENENN)*6", "i0")
    ess = profile_cycle(c0).essential_positions
    delta = {k: v for k, v in art.program.delta.items() if k[0] != "i0"}
    delta.update({("i0", p % len(c0)): "i1" for p in ess})
    bad = SuperMouseProgram((c0, art.program.cycles[1]), delta, "i0")
    rep = cotrace(cm, type(art)(bad, art.instr_to_cycle, cm))
    assert not rep.ok


def test_cotrace_reports_invalid_machine():
    cm = parse_cm("inst 0: 0,-1 ; ZZ->0 ZP->0 PZ->0 PP->0\n")
    rep = cotrace(cm, compile_program(cm))
    assert not rep.ok and "null" in rep.mismatches[0]


def test_cofactor_coprime_after_every_hit():
    rng = random.Random(11)
    for _ in range(10):
        cm = random_valid_program(rng)
        rep = cotrace(cm, compile_program(cm), 100)
        assert rep.ok
        assert all(gcd(r.decoded[2], 6) == 1 for r in rep.records)


# -- pump --------------------------------------------------------------------

def test_pump_lengths(machine):
    art = pump(compile_program(machine("inc_transfer")))
    assert [len(c) for c in art.program.cycles] == [36, 36]
    assert art.pump_factor == {"i0": 2, "i1": 3}
    art = pump(compile_program(machine("all_updates")))
    assert {len(c) for c in art.program.cycles} == {252}


def test_pump_single_cycle(machine):
    art = compile_program(machine("doubling"))
    assert pump(art).program == art.program


@pytest.mark.parametrize("name", HAND_MACHINES)
def test_pump_transparent(name):
    cm = load_machine(name)
    art = compile_program(cm)
    a = run_hits(art.program, 1, 200)
    b = run_hits(pump(art).program, 1, 200)
    assert [(h.x_value, h.dispatched_to) for h in a.hits] == [(h.x_value, h.dispatched_to) for h in b.hits]
    assert cotrace(cm, pump(art), 200).ok


# -- halting reduction -------------------------------------------------------

@pytest.mark.parametrize("name, verdict", [
    ("inc_transfer", "STOPPED(2)"),
    ("count3", "STOPPED(4)"),
    ("immediate_halt", "STOPPED(1)"),
    ("all_updates", "STOPPED(8)"),
    ("transfer_loop", "STOPPED(12)"),
])
def test_halting_reduction_stops(name, verdict):
    cm = load_machine(name)
    assert str(halting_reduction(cm)) == verdict
    assert run_cm(cm).steps == halting_reduction(cm).hits


def test_halting_reduction_unresolved(machine):
    assert str(halting_reduction(machine("doubling"), 500)) == "UNRESOLVED(500)"


def test_halting_reduction_general_machine(machine):
    from supermouse.cm2 import normalize
    cm = machine("general")
    v = halting_reduction(cm)
    assert v.stopped and v.hits == run_cm(normalize(cm)).steps == 8
