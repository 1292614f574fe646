"""Multiset rewriting with borrowing, packaged as a small proof search kit.

Rule sets pair tagged atoms with per-tag biases; the engine searches for
focused proofs, which can be compiled to ground proofs with explicit
structural rules and independently checked.
"""

from .core import (
    Atom, Debt, Zero, One, Plus, Times, Quant, MapsTo, DMapsTo,
    ZERO, ONE, Nat, Sum, App, VApp, Abs, BVar, EVar, UVar,
    RuleDef, Subst, ConfigError, PatternError,
    realm_of, partition_border, unify, unify_atoms, instantiate_rule,
)
from .dsl import (
    RuleSet, GoalSpec, ParseError, parse_rules, parse_goal, render,
)
from .engine import (
    SearchLimits, SearchStats, Proved, NotFound, prove,
    right_phase, close_border, left_focus,
)
from .proofs import (
    FProof, BProof, FSeq, BSeq, ProofError,
    check_f, check_b, f_to_b, atomically_close,
    proof_to_json, proof_from_json,
)
from .encodings import builtin, fib_rules, fib_goal, default_goal
from .synth import synthesize, render_synthetic

__all__ = [
    "Atom", "Debt", "Zero", "One", "Plus", "Times", "Quant", "MapsTo",
    "DMapsTo", "ZERO", "ONE", "Nat", "Sum", "App", "VApp", "Abs", "BVar",
    "EVar", "UVar", "RuleDef", "Subst", "ConfigError", "PatternError",
    "realm_of", "partition_border", "unify", "unify_atoms",
    "instantiate_rule",
    "RuleSet", "GoalSpec", "ParseError", "parse_rules", "parse_goal",
    "render",
    "SearchLimits", "SearchStats", "Proved", "NotFound", "prove",
    "right_phase", "close_border", "left_focus",
    "FProof", "BProof", "FSeq", "BSeq", "ProofError",
    "check_f", "check_b", "f_to_b", "atomically_close",
    "proof_to_json", "proof_from_json",
    "builtin", "fib_rules", "fib_goal", "default_goal",
    "synthesize", "render_synthetic",
]

__version__ = "0.1.0"
