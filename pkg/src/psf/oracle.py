"""Independent reference provers and generators used to cross-check the
search engine: a truth-table classical validity checker, a
contraction-free intuitionistic prover, a bounded dyadic prover for a
linear-logic fragment, a seeded random formula generator, and a bounded
brute-force prover for the unfocused single-sided system.

None of these share code with the engine beyond the term types, so an
agreement failure points at a real bug on one side or the other.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement, product
import random

from .core import (
    App, Atom, ConfigError, Debt, DMapsTo, MapsTo, One, Plus, Quant, Times,
    UVar, Zero, canon, const, is_expr, ms_remove, subst_for, apply_rexpr,
)


def fib_value(n: int) -> int:
    if n < 0:
        raise ValueError("negative index")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


# ---------------------------------------------------------------------------
# Object-level propositional formulas, encoded as plain terms

BOT = const("bot")
TOP = const("top")


def fatom(name: str) -> App:
    return const(name)


def fimp(a, b) -> App:
    return App("imp", (a, b))


def fand(a, b) -> App:
    return App("and", (a, b))


def for_(a, b) -> App:
    return App("or", (a, b))


_CONNECTIVES = ("imp", "and", "or")


def formula_atoms(f: App, acc=None) -> set:
    if acc is None:
        acc = set()
    if f.head in _CONNECTIVES:
        for a in f.args:
            formula_atoms(a, acc)
    elif f.head not in ("bot", "top"):
        acc.add(f.head)
    return acc


def formula_size(f: App) -> int:
    """Connective count."""
    if f.head in _CONNECTIVES:
        return 1 + sum(formula_size(a) for a in f.args)
    return 0


# ---------------------------------------------------------------------------
# Classical validity by truth table


def _eval(f: App, va: dict) -> bool:
    h = f.head
    if h == "imp":
        return (not _eval(f.args[0], va)) or _eval(f.args[1], va)
    if h == "and":
        return _eval(f.args[0], va) and _eval(f.args[1], va)
    if h == "or":
        return _eval(f.args[0], va) or _eval(f.args[1], va)
    if h == "bot":
        return False
    if h == "top":
        return True
    return va[h]


def classical_taut(f: App) -> bool:
    atoms = sorted(formula_atoms(f))
    for bits in product((False, True), repeat=len(atoms)):
        if not _eval(f, dict(zip(atoms, bits))):
            return False
    return True


# ---------------------------------------------------------------------------
# Contraction-free intuitionistic sequent prover (G3ip / LJT style).
# Terminating without loop detection: every backward rule reduces a
# multiset ordering on the sequent, implication-left is split by the
# shape of its antecedent.


def g3ip_prove(gamma, goal) -> bool:
    return _g3ip(frozenset_of(gamma), goal)


def frozenset_of(items):
    # multiset as a sorted tuple; duplicates never help in G3ip,
    # so a set suffices and keeps memoization tight
    return frozenset(items)


@lru_cache(maxsize=None)
def _g3ip(gamma: frozenset, goal: App) -> bool:
    if BOT in gamma:
        return True
    if goal.head == "top":
        return True
    if goal.head not in _CONNECTIVES and goal.head != "bot":
        if goal in gamma:
            return True
    # invertible left rules first
    for f in gamma:
        h = f.head
        rest = gamma - {f}
        if h == "and":
            return _g3ip(rest | {f.args[0], f.args[1]}, goal)
        if h == "or":
            return (_g3ip(rest | {f.args[0]}, goal)
                    and _g3ip(rest | {f.args[1]}, goal))
        if h == "top":
            return _g3ip(rest, goal)
        if h == "imp":
            a, b = f.args
            if a.head == "bot":
                return _g3ip(rest, goal)
            if a.head == "top":
                return _g3ip(rest | {b}, goal)
            if a.head == "and":
                return _g3ip(rest | {fimp(a.args[0], fimp(a.args[1], b))},
                             goal)
            if a.head == "or":
                return _g3ip(rest | {fimp(a.args[0], b), fimp(a.args[1], b)},
                             goal)
            if a.head != "imp" and a in gamma:  # atomic antecedent present
                return _g3ip(rest | {b}, goal)
    # right rules
    if goal.head == "and":
        return (_g3ip(gamma, goal.args[0]) and _g3ip(gamma, goal.args[1]))
    if goal.head == "imp":
        return _g3ip(gamma | {goal.args[0]}, goal.args[1])
    if goal.head == "or":
        if _g3ip(gamma, goal.args[0]) or _g3ip(gamma, goal.args[1]):
            return True
    # non-invertible implication left: (c -> d) -> b
    for f in gamma:
        if f.head == "imp" and f.args[0].head == "imp":
            (c, d), b = f.args[0].args, f.args[1]
            rest = gamma - {f}
            if (_g3ip(rest | {c, fimp(d, b)}, d)
                    and _g3ip(rest | {b}, goal)):
                return True
    return False


# ---------------------------------------------------------------------------
# Bounded prover for a fragment of intuitionistic linear logic with a
# dyadic (unbounded; linear) context split.  Connectives: lolli, tensor,
# with, oplus, bang, and the units one_f / top_f.  Only a "proved"
# verdict is authoritative; "unknown" means the copy budget ran out.

_LL_CONN = ("lolli", "tensor", "with", "oplus", "bang")


def _ll_splits(delta: tuple):
    n = len(delta)
    for mask in range(1 << n):
        left = tuple(delta[i] for i in range(n) if mask >> i & 1)
        right = tuple(delta[i] for i in range(n) if not mask >> i & 1)
        yield left, right


def ll_bounded(bang_ctx, delta, goal, copies: int = 6) -> str:
    memo: dict = {}

    def prove(bg: frozenset, dl: tuple, g, fuel: int) -> bool:
        dl = tuple(sorted(dl, key=repr))
        key = (bg, dl, g, fuel)
        if key in memo:
            return memo[key]
        memo[key] = False  # cut loops at equal fuel
        memo[key] = res = _prove(bg, dl, g, fuel)
        return res

    def _prove(bg: frozenset, dl: tuple, g, fuel: int) -> bool:
        h = g.head if isinstance(g, App) else None
        # axioms
        if h == "top_f":
            return True
        if h == "one_f" and not dl:
            return True
        if h not in _LL_CONN and h not in ("one_f", "top_f"):
            if dl == (g,):
                return True
        # right rules
        if h == "lolli" and prove(bg, dl + (g.args[0],), g.args[1], fuel):
            return True
        if h == "tensor":
            for d1, d2 in _ll_splits(dl):
                if prove(bg, d1, g.args[0], fuel) and \
                        prove(bg, d2, g.args[1], fuel):
                    return True
        if h == "with":
            if prove(bg, dl, g.args[0], fuel) and \
                    prove(bg, dl, g.args[1], fuel):
                return True
        if h == "oplus":
            if prove(bg, dl, g.args[0], fuel) or \
                    prove(bg, dl, g.args[1], fuel):
                return True
        if h == "bang" and not dl and prove(bg, (), g.args[0], fuel):
            return True
        # left rules
        for i, f in enumerate(dl):
            rest = dl[:i] + dl[i + 1:]
            fh = f.head
            if fh == "tensor":
                if prove(bg, rest + (f.args[0], f.args[1]), g, fuel):
                    return True
            elif fh == "one_f":
                if prove(bg, rest, g, fuel):
                    return True
            elif fh == "with":
                if prove(bg, rest + (f.args[0],), g, fuel) or \
                        prove(bg, rest + (f.args[1],), g, fuel):
                    return True
            elif fh == "oplus":
                if prove(bg, rest + (f.args[0],), g, fuel) and \
                        prove(bg, rest + (f.args[1],), g, fuel):
                    return True
            elif fh == "bang":
                if prove(bg | {f.args[0]}, rest, g, fuel):
                    return True
            elif fh == "lolli":
                for d1, d2 in _ll_splits(rest):
                    if prove(bg, d1, f.args[0], fuel) and \
                            prove(bg, d2 + (f.args[1],), g, fuel):
                        return True
        # copy from the unbounded context
        if fuel > 0:
            for f in bg:
                if prove(bg, dl + (f,), g, fuel - 1):
                    return True
        return False

    ok = prove(frozenset(bang_ctx), tuple(delta), goal, copies)
    return "proved" if ok else "unknown"


# ---------------------------------------------------------------------------
# Seeded random formula generation


def gen_formulas(count: int, max_size: int, seed: int,
                 connectives=("imp", "and", "or"),
                 atoms=("p", "q", "r"), allow_bot=True) -> list:
    """Deterministic list of random formulas, each with at most max_size
    connectives. The same arguments always return the same list."""
    rng = random.Random(seed)
    leaves = [const(a) for a in atoms] + ([BOT] if allow_bot else [])

    def build(size: int) -> App:
        if size == 0:
            return rng.choice(leaves)
        head = rng.choice(connectives)
        ls = rng.randrange(size)
        return App(head, (build(ls), build(size - 1 - ls)))

    return [build(rng.randint(0, max_size)) for _ in range(count)]


# ---------------------------------------------------------------------------
# Bounded brute-force prover for the unfocused two-sided system that the
# engine's focused search refines.  Ground and quantifier free.  Decide
# instantiates schema variables over the closure of terms appearing in
# the goal and can grab a whole multiset of instances at once (width
# `multi`).  Verdicts: "proved" is authoritative, "unknown" means some
# budget ran out.


def _subterms(t, acc):
    acc.add(t)
    if isinstance(t, App):
        for a in t.args:
            _subterms(a, acc)


def _item_terms(x, acc):
    if isinstance(x, Atom):
        for t in x.args:
            _subterms(t, acc)
    elif isinstance(x, Debt):
        _item_terms(x.atom, acc)
    elif isinstance(x, (Plus, Times)):
        _item_terms(x.left, acc)
        _item_terms(x.right, acc)
    elif isinstance(x, (MapsTo, DMapsTo)):
        _item_terms(x.rule, acc)
        _item_terms(x.expr, acc)


def rule_instances(ruleset, goal_items, cap: int = 20000) -> list:
    """All ground rule bodies over the goal's term closure."""
    pool: set = set()
    for x in goal_items:
        _item_terms(x, pool)
    pool = sorted(pool, key=repr)
    if not pool:
        pool = [const("a")]
    out = []
    for rd in ruleset.rules:
        names = [nm for nm, _ in rd.schema]
        combos = product(pool, repeat=len(names))
        for combo in combos:
            out.append(apply_rexpr(rd.body, subst_for(rd, dict(zip(names, combo)))))
            if len(out) > cap:
                raise ConfigError("instantiation space too large for "
                                  "brute-force enumeration")
    return out


def _classical_tags(bias) -> set:
    return {t for t, v in bias.items() if abs(v) == 2}


def b_enumerate(ruleset, left, right, decides: int = 4,
                max_nodes: int = 400_000, multi: int = 2) -> str:
    """Search the unfocused system directly.  Classical right atoms are
    shared additively (contraction/weakening folded in); everything else
    on the right is linear, including debts.  `decides` bounds the number
    of decide steps on any branch, `multi` the number of rule instances a
    single decide may grab."""
    bias = ruleset.bias
    ctags = _classical_tags(bias)
    insts = rule_instances(ruleset, tuple(left) + tuple(right))
    memo: dict = {}
    nodes = [0]

    def is_catom(x) -> bool:
        return isinstance(x, Atom) and x.tag in ctags

    def is_positive(x) -> bool:
        return isinstance(x, Atom) and bias.get(x.tag, 0) > 0

    def prove(lft: tuple, lin: tuple, cls: frozenset, fuel: int) -> bool:
        key = (lft, lin, cls, fuel)
        if key in memo:
            return memo[key]
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise TimeoutError
        memo[key] = False  # cut simple loops
        res = _prove(lft, lin, cls, fuel)
        memo[key] = res
        return res

    def _prove(lft, lin, cls, fuel) -> bool:
        # axioms
        if any(isinstance(x, Zero) for x in lin):
            return True
        if len(lft) == 1 and isinstance(lft[0], One) and not lin:
            return True
        if len(lft) == 1 and is_expr(lft[0]):
            e = lft[0]
            if lin == (e,) or (not lin and is_catom(e) and e in cls):
                return True
        if not lft:
            # debt against its atom, the atom possibly already shared
            if len(lin) == 2:
                for d, a in ((lin[0], lin[1]), (lin[1], lin[0])):
                    if isinstance(d, Debt) and d.atom == a:
                        return True
            if len(lin) == 1 and isinstance(lin[0], Debt) \
                    and lin[0].atom in cls:
                return True
        # right decompositions (invertible, and safe to do eagerly)
        for i, e in enumerate(lin):
            rest = lin[:i] + lin[i + 1:]
            if isinstance(e, One):
                return prove(lft, rest, cls, fuel)
            if isinstance(e, Times):
                return prove(lft, canon(rest + (e.left, e.right)), cls, fuel)
            if isinstance(e, Plus):
                return (prove(lft, canon(rest + (e.left,)), cls, fuel)
                        and prove(lft, canon(rest + (e.right,)), cls, fuel))
            if isinstance(e, Quant):
                raise ConfigError("enumeration is propositional only")
            if is_catom(e):
                return prove(lft, rest, cls | {e}, fuel)
        # left rules: the choice of principal item commutes, so fix one.
        # Atoms are principal only through the debt rules; bare units and
        # negative atoms just wait to be routed by splits.
        r = rest = None
        for i, x in enumerate(lft):
            if isinstance(x, (Plus, Times, MapsTo, DMapsTo)) or \
                    (is_positive(x) and abs(bias[x.tag]) == 1):
                r, rest = x, lft[:i] + lft[i + 1:]
                break
        if r is None:
            if len(lft) == 1 and is_positive(lft[0]) and not lin:
                # classical positive atom turns into a debt by itself
                return prove((), (Debt(lft[0]),), cls, fuel)
            if lft:
                return False
            # decide: only from an empty left-hand side
            if fuel > 0:
                for inst in insts:
                    if prove((inst,), lin, cls, fuel - 1):
                        return True
                if multi > 1:
                    for pair in combinations_with_replacement(insts, 2):
                        if prove(canon(pair), lin, cls, fuel - 1):
                            return True
            return False
        if isinstance(r, Atom):  # positive linear atom becomes a debt
            return prove(rest, canon(lin + (Debt(r),)), cls, fuel)
        if isinstance(r, Plus):
            return prove(canon(rest + (r.left,)), lin, cls, fuel) or \
                prove(canon(rest + (r.right,)), lin, cls, fuel)
        if isinstance(r, Times):
            for l1, l2 in _ll_splits(rest):
                for d1, d2 in _ll_splits(lin):
                    if prove(canon(l1 + (r.left,)), d1, cls, fuel) and \
                            prove(canon(l2 + (r.right,)), d2, cls, fuel):
                        return True
            return False
        if isinstance(r, MapsTo):
            for l1, l2 in _ll_splits(rest):
                for d1, d2 in _ll_splits(lin):
                    if prove(canon(l1 + (r.rule,)), d1, cls, fuel) and \
                            prove(canon(l2), canon(d2 + (r.expr,)),
                                  cls, fuel):
                        return True
            return False
        # DMapsTo: the rule premise gets no linear context at all
        return prove((r.rule,), (), cls, fuel) and \
            prove(rest, canon(lin + (r.expr,)), cls, fuel)

    lin = tuple(x for x in right if not is_catom(x))
    cls = frozenset(x for x in right if is_catom(x))
    try:
        ok = prove(canon(left), canon(lin), cls, decides)
    except TimeoutError:
        return "unknown"
    return "proved" if ok else "unknown"
