"""Budach mouse, super-mouse, and the two-counter-machine reduction."""
from .analysis import (AffineLaw, CycleProfile, characterize_affine, equivalence_check, profile_cycle,
                       traverse_fast)
from .cm2 import CM2Config, CM2Program, Instruction, normalize, parse_cm, run_cm, step_cm
from .engine import iter_hits, run_hits
from .gadgets import Gadget, GadgetSpec, measure_factor, synthesize, verify_exactness
from .mouse import (HALT, CycleString, Direction, HitEvent, MouseConfig, SuperMouseProgram,
                    check_original_stop, parse_pattern, parse_program, run_bounded, step, traverse_step)
from .reduction import compile_program, cotrace, decode, encode, halting_reduction, pump

__version__ = "0.1.0"
