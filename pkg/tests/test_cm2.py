import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supermouse.cm2 import (DECOMPOSITION, STATUSES, CM2Config, CM2Program, Instruction, boundary_projection,
                            format_cm, normalize, parse_cm, random_program, random_valid_program, run_cm,
                            step_cm)
from supermouse.errors import CMError, DecrementOfNull

INC_TRANSFER = CM2Program((Instruction.goto((1, 0), 1), Instruction.goto((-1, 1), 2)))


def test_step_examples():
    assert step_cm(INC_TRANSFER, CM2Config(0, 0, 0)) == CM2Config(1, 1, 0)
    assert step_cm(INC_TRANSFER, CM2Config(1, 1, 0)) == CM2Config(2, 0, 1)
    with pytest.raises(DecrementOfNull):
        step_cm(CM2Program((Instruction.goto((0, -1), 0),)), CM2Config(0, 0, 0))


def test_branch_reads_pre_update_status():
    # from (0, 0) the ZZ branch is taken even though R1 becomes positive
    prog = CM2Program((Instruction((1, 0), {("Z", "Z"): 1, ("Z", "P"): 0, ("P", "Z"): 0, ("P", "P"): 0}),))
    assert step_cm(prog, CM2Config(0, 0, 0)) == CM2Config(1, 1, 0)
    assert step_cm(prog, CM2Config(0, 1, 0)) == CM2Config(0, 2, 0)


def test_run_examples():
    run = run_cm(INC_TRANSFER)
    assert run.halted and run.steps == 2 and run.final == CM2Config(2, 0, 1)
    loop = CM2Program((Instruction.goto((1, 0), 0),))
    run = run_cm(loop, max_steps=100)
    assert not run.halted
    assert [c.r1 for c in run.trace] == list(range(101))
    run = run_cm(INC_TRANSFER, max_steps=0)
    assert run.trace == (CM2Config(0, 0, 0),) and not run.halted


def test_instruction_validation():
    with pytest.raises(CMError):
        Instruction((2, 0), {s: 0 for s in STATUSES})
    with pytest.raises(CMError):
        Instruction((1, 0), {("Z", "Z"): 0})
    with pytest.raises(CMError):
        CM2Program((Instruction.goto((1, 0), 5),))


# -- text format -------------------------------------------------------------

def test_parse_format_roundtrip():
    text = "inst 0: +1,0 ; ZZ->1 ZP->1 PZ->1 PP->1\ninst 1: -1,+1 ; ZZ->HALT ZP->HALT PZ->HALT PP->HALT\n"
    prog = parse_cm(text)
    assert prog == INC_TRANSFER
    assert format_cm(prog) == text


@pytest.mark.parametrize("text", [
    "inst 1: +1,0 ; ZZ->0 ZP->0 PZ->0 PP->0\n",
    "inst 0: +1,0 ; ZZ->0 ZP->0 PZ->0\n",
    "inst 0: +1,0 ; ZZ->0 ZZ->0 PZ->0 PP->0\n",
    "inst 0: +1,0 ; ZZ->7 ZP->0 PZ->0 PP->0\n",
    "inst 0 +1,0 ZZ->0\n",
])
def test_parse_rejects(text):
    with pytest.raises(CMError):
        parse_cm(text)


# -- normalize ---------------------------------------------------------------

def test_normalize_fixed_point():
    prog = parse_cm("inst 0: +1,0 ; ZZ->1 ZP->0 PZ->1 PP->HALT\ninst 1: 0,-1 ; ZZ->0 ZP->1 PZ->0 PP->HALT\n")
    assert normalize(prog) == prog


def test_decomposition_table_nets():
    for update, seq in DECOMPOSITION.items():
        assert tuple(map(sum, zip(*seq))) == update


@pytest.mark.parametrize("r1, r2", [(0, 0), (0, 3), (2, 0), (4, 5)])
def test_normalize_increment_r2(r1, r2):
    prog = CM2Program((Instruction.goto((0, 1), 1),))
    norm = normalize(prog)
    assert [i.update for i in norm.instructions] == [(1, 0), (-1, 1)]
    a = run_cm(prog, CM2Config(0, r1, r2), 5)
    b = run_cm(norm, CM2Config(0, r1, r2), 5)
    assert (a.final.r1, a.final.r2) == (b.final.r1, b.final.r2) == (r1, r2 + 1)
    assert a.halted and b.halted


def test_normalize_double_decrement():
    prog = CM2Program((Instruction.goto((-1, -1), 1),))
    norm = normalize(prog)
    assert len(norm) == 3
    run = run_cm(norm, CM2Config(0, 1, 1))
    assert run.halted and (run.final.r1, run.final.r2) == (0, 0)


def test_normalize_chains_per_target():
    prog = CM2Program((Instruction((0, 0), {("Z", "Z"): 0, ("Z", "P"): 1, ("P", "Z"): 1, ("P", "P"): 1}),))
    norm = normalize(prog)
    # head + two chains of two instructions each
    assert len(norm) == 5
    assert all(i.restricted for i in norm.instructions)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_normalization_soundness(seed):
    rng = random.Random(seed)
    prog = random_valid_program(rng, restricted=False, steps=60)
    norm = normalize(prog)
    a = run_cm(prog, max_steps=60)
    b = run_cm(norm, max_steps=3 * 60)
    proj = boundary_projection(b, len(prog), norm.halt_label)
    m = min(len(a.trace), len(proj))
    assert list(a.trace[:m]) == proj[:m]
    assert m >= min(len(a.trace), 61)
    if a.halted:
        assert b.halted and b.steps <= 3 * a.steps


def test_registers_nonnegative():
    rng = random.Random(3)
    for _ in range(20):
        prog = random_program(rng, 5)
        try:
            run = run_cm(prog, max_steps=100)
        except DecrementOfNull:
            continue
        assert all(c.r1 >= 0 and c.r2 >= 0 for c in run.trace)
