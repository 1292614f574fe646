"""Bundled rule sets: sequent-style logics, linear logic, free deduction,
and the recurrence examples used in the tests and the command line tool.

Each set is stored in the surface syntax in canonical form (what the
renderer emits), so parsing and re-rendering a bundled set reproduces its
text byte for byte.
"""

from __future__ import annotations

from .core import Atom, Debt, Nat, Times, ConfigError
from .dsl import GoalSpec, RuleSet, parse_rules

_FIG_CORE = """\
rule impL: lft(imp(A,B)) -> rght(A) => lft(B).
rule impR: rght(imp(A,B)) -> lft(A) * rght(B).
rule andL1: lft(and(A,B)) -> lft(A).
rule andL2: lft(and(A,B)) -> lft(B).
rule andR: rght(and(A,B)) -> rght(A) + rght(B).
rule orL: lft(or(A,B)) -> lft(A) + lft(B).
rule orR1: rght(or(A,B)) -> rght(A).
rule orR2: rght(or(A,B)) -> rght(B).
rule botL: lft(bot) -> zero.
rule topR: rght(top) -> zero.
rule id1: lft(C) * rght(C).
"""

# id2 is the up/down coercion in natural deduction.  Under the sequent
# biases it turns into cut, which is admissible there and would wreck
# exhaustive search, so only the nj set carries it.
_ID2 = "rule id2: one -> rght(C) => lft(C).\n"

_PROP_HEADER = "tag lft/1.\ntag rght/1.\nbias lft = {l}.\nbias rght = {r}.\n"

_NJ = _PROP_HEADER.format(l="+2", r="-1") + _FIG_CORE + _ID2
_LJ = _PROP_HEADER.format(l="-2", r="-1") + _FIG_CORE
_LK = _PROP_HEADER.format(l="-2", r="-2") + _FIG_CORE

_SHARED_LINEAR = """\
rule impR: rght(imp(A,B)) -> lft(A) * rght(B).
rule andL1: lft(and(A,B)) -> lft(A).
rule andL2: lft(and(A,B)) -> lft(B).
rule andR: rght(and(A,B)) -> rght(A) + rght(B).
rule orL: lft(or(A,B)) -> lft(A) + lft(B).
rule orR1: rght(or(A,B)) -> rght(A).
rule orR2: rght(or(A,B)) -> rght(B).
rule botL: lft(bot) -> zero.
rule topR: rght(top) -> zero.
rule id1: lft(C) * rght(C).
"""

_LJ_LINEAR = (_PROP_HEADER.format(l="-1", r="-1")
              + "rule impL: lft(imp(A,B)) * rght(C) -> rght(A) -> lft(B) * rght(C).\n"
              + _SHARED_LINEAR
              + "rule id2: rght(A) -> rght(C) -> lft(C) * rght(A).\n"
              + "rule lw: lft(B) -> one.\n"
              + "rule lc: lft(B) -> lft(B) * lft(B).\n")

_LK_LINEAR = (_PROP_HEADER.format(l="-1", r="-1")
              + "rule impL: lft(imp(A,B)) -> rght(A) -> lft(B).\n"
              + _SHARED_LINEAR
              + "rule id2: one -> rght(C) -> lft(C).\n"
              + "rule lw: lft(B) -> one.\n"
              + "rule lc: lft(B) -> lft(B) * lft(B).\n"
              + "rule rw: rght(B) -> one.\n"
              + "rule rc: rght(B) -> rght(B) * rght(B).\n")

_ALT = _PROP_HEADER.format(l="+2", r="-1") + """\
rule impLa: lft(imp(A,B)) -> rght(A).
rule impRa1: rght(imp(A,B)) -> lft(A).
rule impRa2: rght(imp(A,B)) -> rght(B).
rule andLm: lft(and(A,B)) -> lft(A) * lft(B).
rule andRm: rght(and(A,B)) -> rght(A) -> rght(B).
rule orLm: lft(or(A,B)) -> lft(A) -> lft(B).
rule orRm: rght(or(A,B)) -> rght(A) * rght(B).
rule botLm: lft(bot) -> one.
rule topRm: rght(top) -> one.
"""

_FREE = _PROP_HEADER.format(l="-2", r="-2") + """\
rule fdAndL: one -> lft(and(A,B)) -> rght(A) -> rght(B).
rule fdAndR1: one -> rght(and(A,B)) -> lft(A).
rule fdAndR2: one -> rght(and(A,B)) -> lft(B).
rule fdOrL1: one -> lft(or(A,B)) -> rght(A).
rule fdOrL2: one -> lft(or(A,B)) -> rght(B).
rule fdOrR: one -> rght(or(A,B)) -> lft(A) -> lft(B).
rule fdImpL1: one -> lft(imp(A,B)) -> lft(A).
rule fdImpL2: one -> lft(imp(A,B)) -> rght(B).
rule fdImpR: one -> rght(imp(A,B)) -> rght(A) -> lft(B).
rule id1: lft(C) * rght(C).
rule id3: one -> rght(C) -> lft(C).
"""

_LL = """\
tag lft/1.
tag rght/1.
tag llft/1.
tag rrght/1.
bias lft = -1.
bias rght = -1.
bias llft = -2.
bias rrght = -2.
rule lolliL: lft(lolli(A,B)) -> rght(A) -> lft(B).
rule lolliR: rght(lolli(A,B)) -> lft(A) * rght(B).
rule tensorL: lft(tensor(A,B)) -> lft(A) * lft(B).
rule tensorR: rght(tensor(A,B)) -> rght(A) -> rght(B).
rule withL1: lft(with(A,B)) -> lft(A).
rule withL2: lft(with(A,B)) -> lft(B).
rule withR: rght(with(A,B)) -> rght(A) + rght(B).
rule oplusL: lft(oplus(A,B)) -> lft(A) + lft(B).
rule oplusR1: rght(oplus(A,B)) -> rght(A).
rule oplusR2: rght(oplus(A,B)) -> rght(B).
rule parL: lft(par(A,B)) -> lft(A) -> lft(B).
rule parR: rght(par(A,B)) -> rght(A) * rght(B).
rule oneL: lft(one_f) -> one.
rule oneR: rght(one_f).
rule botL: lft(bot_f).
rule botR: rght(bot_f) -> one.
rule zeroL: lft(zero_f) -> zero.
rule topR: rght(top_f) -> zero.
rule bangL: lft(bang(B)) -> llft(B).
rule bangR: rght(bang(B)) -> rght(B) => one.
rule questL: lft(quest(B)) -> lft(B) => one.
rule questR: rght(quest(B)) -> rrght(B).
rule derL: llft(B) -> lft(B).
rule derR: rrght(B) -> rght(B).
rule id1: lft(C) * rght(C).
"""

_QUANT = _PROP_HEADER.format(l="-2", r="-1") + _FIG_CORE + """\
rule faL: lft(fa(x\\ B(x))) -> lft(B(T)).
rule faR: rght(fa(x\\ B(x))) -> quant x\\ rght(B(x)).
rule exL: lft(ex(x\\ B(x))) -> quant x\\ lft(B(x)).
rule exR: rght(ex(x\\ B(x))) -> rght(B(T)).
"""

_FIG10 = _PROP_HEADER.format(l="-2", r="-2") + """\
rule lemma1: rght(and(A,B)) * lft(A) * lft(B).
rule lemma2: lft(and(A,B)) * rght(A).
rule lemma3: lft(and(A,B)) * rght(B).
rule lemma4: rght(or(A,B)) * lft(A).
rule lemma5: rght(or(A,B)) * lft(B).
rule lemma6: lft(or(A,B)) * rght(A) * rght(B).
rule lemma7: rght(imp(A,B)) * rght(A).
rule lemma8: rght(imp(A,B)) * lft(B).
rule lemma9: lft(imp(A,B)) * lft(A) * rght(B).
"""

_TEXTS = {
    "nj": _NJ,
    "lj": _LJ,
    "lk": _LK,
    "lj-linear": _LJ_LINEAR,
    "lk-linear": _LK_LINEAR,
    "alt-rules": _ALT,
    "free-deduction": _FREE,
    "ll": _LL,
    "quantifiers": _QUANT,
    "fig10-lemmas": _FIG10,
}

BUILTIN_NAMES = tuple(_TEXTS)

_CACHE: dict = {}


def builtin_text(name: str) -> str:
    try:
        return _TEXTS[name]
    except KeyError:
        raise ConfigError(
            f"no bundled rule set named {name!r}; "
            f"choose from {', '.join(BUILTIN_NAMES)}") from None


def builtin(name: str) -> RuleSet:
    if name not in _CACHE:
        _CACHE[name] = parse_rules(builtin_text(name), name)
    return _CACHE[name]


def with_bias(rs: RuleSet, overrides: dict) -> RuleSet:
    """A copy of a rule set with some tag biases replaced."""
    for tag in overrides:
        if tag not in rs.tags:
            raise ConfigError(f"cannot set bias of unknown tag {tag!r}")
        if overrides[tag] not in (-2, -1, 1, 2):
            raise ConfigError("bias values are -2, -1, +1 or +2")
    bias = dict(rs.bias)
    bias.update(overrides)
    return RuleSet(rs.name, rs.tags, bias, rs.rules, rs.notes)


# ---------------------------------------------------------------------------
# Recurrence examples


def _fib(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


_FIB_BASES = """\
rule base0: fib(0,0).
rule base1: fib(1,1).
rule rec: fib(N+2,X+Y) -> fib(N+1,X) -> fib(N,Y).
"""

_FIB_BIAS = {"topdown": "-1", "plus1": "+1", "plus2": "+2"}


def fib_rules(variant: str, n: int = None) -> RuleSet:
    """Rule sets computing the recurrence. topdown/plus1/plus2 share the
    same three rules at different biases; pair(n) walks value pairs upward
    and needs the target index baked into its stop rule."""
    if variant in _FIB_BIAS:
        text = (f"tag fib/2.\nbias fib = {_FIB_BIAS[variant]}.\n"
                + _FIB_BASES)
        return parse_rules(text, f"fib-{variant}")
    if variant == "pair":
        if n is None:
            raise ConfigError("the pair variant needs a target index")
        text = ("tag fib/2.\nbias fib = -1.\n"
                f"rule stop: fib({n},{_fib(n)}) -> zero.\n"
                "rule step: fib(M+1,X) * fib(M,Y) -> "
                "fib(M+2,X+Y) * fib(M+1,X).\n")
        return parse_rules(text, f"fib-pair-{n}")
    raise ConfigError(
        f"unknown recurrence variant {variant!r}; "
        "choose from topdown, plus1, plus2, pair")


def fib_goal(variant: str, n: int) -> GoalSpec:
    """The goal that asks for the n-th value under the given variant."""
    if variant in _FIB_BIAS:
        return GoalSpec((), (Atom("fib", (Nat(n), Nat(_fib(n)))),))
    if variant == "pair":
        return GoalSpec((), (Times(Atom("fib", (Nat(0), Nat(0))),
                                   Atom("fib", (Nat(1), Nat(1)))),))
    raise ConfigError(f"unknown recurrence variant {variant!r}")


def default_goal(name: str, c, gamma=(), down=False) -> GoalSpec:
    """Encode an object-logic sequent gamma |- c as a goal for a bundled
    logic. Hypotheses become lft atoms; the conclusion becomes a rght atom,
    or a lft debt for the natural-deduction down judgment."""
    items = tuple(Atom("lft", (g,)) for g in gamma)
    if down:
        if name != "nj":
            raise ConfigError(
                "down judgments only exist in the natural-deduction set")
        return GoalSpec((), items + (Debt(Atom("lft", (c,))),))
    return GoalSpec((), items + (Atom("rght", (c,)),))
