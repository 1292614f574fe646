"""Expression algebra, bias assignments, substitutions, and unification.

Object terms use de Bruijn indices for binders, so structural equality is
alpha-equality. Schema variables of rules are unification variables that get
freshened at use; eigenvariables carry the signature level at which they were
introduced, and unification enforces the usual occurs and scope checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union


class ConfigError(Exception):
    """Raised for rule-set level problems: unknown tags, partial bias maps."""


class PatternError(Exception):
    """A schema-variable application outside the pattern fragment had to be
    unified. The rule set is outside the supported fragment."""


# ---------------------------------------------------------------------------
# Object terms


@dataclass(frozen=True)
class Nat:
    value: int


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class BVar:
    index: int


@dataclass(frozen=True)
class EVar:
    name: str
    level: int


@dataclass(frozen=True)
class UVar:
    ref: int
    level: int
    hint: str = field(default="X", compare=False)


@dataclass(frozen=True)
class App:
    head: str
    args: tuple = ()


@dataclass(frozen=True)
class VApp:
    var: UVar
    args: tuple


@dataclass(frozen=True)
class Abs:
    body: "Term"
    hint: str = field(default="x", compare=False)


Term = Union[Nat, Sum, BVar, EVar, UVar, App, VApp, Abs]


def const(name: str) -> App:
    return App(name, ())


def mksum(a: Term, b: Term) -> Term:
    # fold literals eagerly; a zero contributes nothing to the value
    if isinstance(a, Nat) and isinstance(b, Nat):
        return Nat(a.value + b.value)
    if isinstance(a, Nat) and a.value == 0:
        return b
    if isinstance(b, Nat) and b.value == 0:
        return a
    return Sum(a, b)


# ---------------------------------------------------------------------------
# Atoms, expressions, rules


@dataclass(frozen=True)
class Atom:
    tag: str
    args: tuple = ()


@dataclass(frozen=True)
class Debt:
    atom: Atom


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class One:
    pass


ZERO = Zero()
ONE = One()


@dataclass(frozen=True)
class Plus:
    left: "RExpr"
    right: "RExpr"


@dataclass(frozen=True)
class Times:
    left: "RExpr"
    right: "RExpr"


@dataclass(frozen=True)
class Quant:
    body: "RExpr"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class MapsTo:
    rule: "RExpr"
    expr: "RExpr"


@dataclass(frozen=True)
class DMapsTo:
    rule: "RExpr"
    expr: "RExpr"


RExpr = Union[Atom, Zero, One, Plus, Times, Quant, MapsTo, DMapsTo]


def is_expr(e: RExpr) -> bool:
    """True when e stays inside the goal-side grammar (no rewrite arrows)."""
    if isinstance(e, (Atom, Zero, One)):
        return True
    if isinstance(e, (Plus, Times)):
        return is_expr(e.left) and is_expr(e.right)
    if isinstance(e, Quant):
        return is_expr(e.body)
    return False


@dataclass(frozen=True)
class RuleDef:
    """A named rule with its leading schema variables.

    Schema variables are stored as template UVars (level 0); the engine
    renames them to fresh variables at every decide.
    """

    name: str
    schema: tuple  # tuple of (name, UVar)
    body: RExpr


# ---------------------------------------------------------------------------
# Bias and realms

Bias = dict  # tag -> one of -2, -1, +1, +2


class Realm(Enum):
    LINEAR = "linear"
    CLASSICAL = "classical"


def bias_of(atom: Atom, bias: Bias) -> int:
    try:
        return bias[atom.tag]
    except KeyError:
        raise ConfigError(f"no bias assigned to tag {atom.tag!r}") from None


def realm_of(atom: Atom, bias: Bias):
    """Return (realm, sign) for the atom's tag."""
    d = bias_of(atom, bias)
    realm = Realm.LINEAR if abs(d) == 1 else Realm.CLASSICAL
    return realm, (1 if d > 0 else -1)


# ---------------------------------------------------------------------------
# Canonical ordering for multisets

def term_key(t: Term):
    if isinstance(t, Nat):
        return ("nat", t.value)
    if isinstance(t, Sum):
        return ("sum", term_key(t.left), term_key(t.right))
    if isinstance(t, BVar):
        return ("bvar", t.index)
    if isinstance(t, EVar):
        return ("evar", t.level, t.name)
    if isinstance(t, UVar):
        return ("uvar", t.ref)
    if isinstance(t, App):
        return ("app", t.head, tuple(term_key(a) for a in t.args))
    if isinstance(t, VApp):
        return ("vapp", t.var.ref, tuple(term_key(a) for a in t.args))
    if isinstance(t, Abs):
        return ("abs", term_key(t.body))
    raise TypeError(f"not a term: {t!r}")


def item_key(x):
    if isinstance(x, Atom):
        return ("atom", x.tag, tuple(term_key(a) for a in x.args))
    if isinstance(x, Debt):
        return ("debt",) + item_key(x.atom)
    if isinstance(x, Zero):
        return ("zero",)
    if isinstance(x, One):
        return ("one",)
    if isinstance(x, Plus):
        return ("plus", item_key(x.left), item_key(x.right))
    if isinstance(x, Times):
        return ("times", item_key(x.left), item_key(x.right))
    if isinstance(x, Quant):
        return ("quant", item_key(x.body))
    if isinstance(x, MapsTo):
        return ("mapsto", item_key(x.rule), item_key(x.expr))
    if isinstance(x, DMapsTo):
        return ("dmapsto", item_key(x.rule), item_key(x.expr))
    raise TypeError(f"not a context item: {x!r}")


def canon(items) -> tuple:
    """Multisets are canonical sorted tuples."""
    return tuple(sorted(items, key=item_key))


def ms_remove(items: tuple, x) -> tuple:
    out = list(items)
    out.remove(x)
    return tuple(out)


# ---------------------------------------------------------------------------
# Border partitioning


def partition_border(ctx, bias: Bias):
    """Split a border context into (linear-and-debts, classical atoms).

    Returns None when the context is not a border (contains a non-atomic
    expression).
    """
    lin, cls = [], []
    for x in ctx:
        if isinstance(x, Debt):
            lin.append(x)  # debts are always linear, whatever the tag bias
        elif isinstance(x, Atom):
            realm, _ = realm_of(x, bias)
            (lin if realm is Realm.LINEAR else cls).append(x)
        else:
            return None
    return canon(lin), canon(cls)


# ---------------------------------------------------------------------------
# de Bruijn plumbing

def shift_term(t: Term, by: int, cutoff: int = 0) -> Term:
    if isinstance(t, BVar):
        return BVar(t.index + by) if t.index >= cutoff else t
    if isinstance(t, Sum):
        return Sum(shift_term(t.left, by, cutoff), shift_term(t.right, by, cutoff))
    if isinstance(t, App):
        return App(t.head, tuple(shift_term(a, by, cutoff) for a in t.args))
    if isinstance(t, VApp):
        return VApp(t.var, tuple(shift_term(a, by, cutoff) for a in t.args))
    if isinstance(t, Abs):
        return Abs(shift_term(t.body, by, cutoff + 1), t.hint)
    return t


def subst_bvar_term(t: Term, repl: Term, index: int = 0) -> Term:
    if isinstance(t, BVar):
        if t.index == index:
            return shift_term(repl, index)
        if t.index > index:
            return BVar(t.index - 1)
        return t
    if isinstance(t, Sum):
        return mksum(subst_bvar_term(t.left, repl, index),
                     subst_bvar_term(t.right, repl, index))
    if isinstance(t, App):
        return App(t.head, tuple(subst_bvar_term(a, repl, index) for a in t.args))
    if isinstance(t, VApp):
        return VApp(t.var, tuple(subst_bvar_term(a, repl, index) for a in t.args))
    if isinstance(t, Abs):
        return Abs(subst_bvar_term(t.body, repl, index + 1), t.hint)
    return t


def open_rexpr(e: RExpr, repl: Term, index: int = 0) -> RExpr:
    """Substitute a term for the bound variable of the nearest Quant."""
    if isinstance(e, Atom):
        return Atom(e.tag, tuple(subst_bvar_term(a, repl, index) for a in e.args))
    if isinstance(e, (Zero, One)):
        return e
    if isinstance(e, Plus):
        return Plus(open_rexpr(e.left, repl, index), open_rexpr(e.right, repl, index))
    if isinstance(e, Times):
        return Times(open_rexpr(e.left, repl, index), open_rexpr(e.right, repl, index))
    if isinstance(e, Quant):
        return Quant(open_rexpr(e.body, repl, index + 1), e.hint)
    if isinstance(e, MapsTo):
        return MapsTo(open_rexpr(e.rule, repl, index), open_rexpr(e.expr, repl, index))
    if isinstance(e, DMapsTo):
        return DMapsTo(open_rexpr(e.rule, repl, index), open_rexpr(e.expr, repl, index))
    raise TypeError(f"not an expression: {e!r}")


def free_bvars(t: Term, cutoff: int = 0) -> set:
    if isinstance(t, BVar):
        return {t.index - cutoff} if t.index >= cutoff else set()
    if isinstance(t, Sum):
        return free_bvars(t.left, cutoff) | free_bvars(t.right, cutoff)
    if isinstance(t, (App, VApp)):
        out = set()
        for a in t.args:
            out |= free_bvars(a, cutoff)
        return out
    if isinstance(t, Abs):
        return free_bvars(t.body, cutoff + 1)
    return set()


# ---------------------------------------------------------------------------
# Substitutions with residual sum constraints


@dataclass(frozen=True)
class SumEq:
    """sum(lhs) + lhs_k = sum(rhs) + rhs_k, deferred until solvable."""

    lhs: tuple
    lhs_k: int
    rhs: tuple
    rhs_k: int


class Fail:
    """Unification failure marker (singleton FAIL)."""

    def __repr__(self):
        return "Fail"

    def __bool__(self):
        return False


FAIL = Fail()


@dataclass(frozen=True)
class Subst:
    bindings: dict = field(default_factory=dict)
    constraints: tuple = ()

    def lookup(self, v: UVar) -> Optional[Term]:
        return self.bindings.get(v.ref)

    def with_binding(self, v: UVar, t: Term) -> "Subst":
        b = dict(self.bindings)
        b[v.ref] = t
        return Subst(b, self.constraints)

    def with_constraints(self, cs: tuple) -> "Subst":
        return Subst(self.bindings, cs)


def walk(t: Term, s: Subst) -> Term:
    """Resolve the head of t through the substitution, reducing applications
    of bound schema variables and folding literal sums."""
    while True:
        if isinstance(t, UVar):
            b = s.lookup(t)
            if b is None:
                return t
            t = b
        elif isinstance(t, VApp):
            f = walk(t.var, s)
            if isinstance(f, UVar):
                return VApp(f, t.args)
            t = beta_apply(f, t.args)
        elif isinstance(t, Sum):
            a = walk(t.left, s)
            b = walk(t.right, s)
            folded = mksum(a, b)
            if not isinstance(folded, Sum):
                t = folded
                continue
            return folded
        else:
            return t


def beta_apply(f: Term, args: tuple) -> Term:
    for a in args:
        if not isinstance(f, Abs):
            raise PatternError("schema variable applied to more arguments "
                               "than its binder accepts")
        f = subst_bvar_term(f.body, a)
    return f


def apply_term(t: Term, s: Subst) -> Term:
    t = walk(t, s)
    if isinstance(t, Sum):
        return mksum(apply_term(t.left, s), apply_term(t.right, s))
    if isinstance(t, App):
        return App(t.head, tuple(apply_term(a, s) for a in t.args))
    if isinstance(t, VApp):
        return VApp(t.var, tuple(apply_term(a, s) for a in t.args))
    if isinstance(t, Abs):
        return Abs(apply_term(t.body, s), t.hint)
    return t


def apply_atom(a: Atom, s: Subst) -> Atom:
    return Atom(a.tag, tuple(apply_term(x, s) for x in a.args))


def apply_rexpr(e: RExpr, s: Subst) -> RExpr:
    if isinstance(e, Atom):
        return apply_atom(e, s)
    if isinstance(e, Debt):
        return Debt(apply_atom(e.atom, s))
    if isinstance(e, (Zero, One)):
        return e
    if isinstance(e, Plus):
        return Plus(apply_rexpr(e.left, s), apply_rexpr(e.right, s))
    if isinstance(e, Times):
        return Times(apply_rexpr(e.left, s), apply_rexpr(e.right, s))
    if isinstance(e, Quant):
        return Quant(apply_rexpr(e.body, s), e.hint)
    if isinstance(e, MapsTo):
        return MapsTo(apply_rexpr(e.rule, s), apply_rexpr(e.expr, s))
    if isinstance(e, DMapsTo):
        return DMapsTo(apply_rexpr(e.rule, s), apply_rexpr(e.expr, s))
    raise TypeError(f"not an expression: {e!r}")


def apply_item(x, s: Subst):
    if isinstance(x, Debt):
        return Debt(apply_atom(x.atom, s))
    return apply_rexpr(x, s)


def term_uvars(t: Term, s: Subst, acc: set) -> None:
    t = walk(t, s)
    if isinstance(t, UVar):
        acc.add(t)
    elif isinstance(t, Sum):
        term_uvars(t.left, s, acc)
        term_uvars(t.right, s, acc)
    elif isinstance(t, App):
        for a in t.args:
            term_uvars(a, s, acc)
    elif isinstance(t, VApp):
        acc.add(t.var)
        for a in t.args:
            term_uvars(a, s, acc)
    elif isinstance(t, Abs):
        term_uvars(t.body, s, acc)


def term_is_ground(t: Term, s: Subst) -> bool:
    acc: set = set()
    term_uvars(t, s, acc)
    return not acc


def item_is_ground(x, s: Subst) -> bool:
    if isinstance(x, Debt):
        return item_is_ground(x.atom, s)
    if isinstance(x, Atom):
        return all(term_is_ground(a, s) for a in x.args)
    if isinstance(x, (Zero, One)):
        return True
    if isinstance(x, (Plus, Times, MapsTo, DMapsTo)):
        l = x.rule if isinstance(x, (MapsTo, DMapsTo)) else x.left
        r = x.expr if isinstance(x, (MapsTo, DMapsTo)) else x.right
        return item_is_ground(l, s) and item_is_ground(r, s)
    if isinstance(x, Quant):
        return item_is_ground(x.body, s)
    raise TypeError(f"not a context item: {x!r}")


def max_evar_level(t: Term, s: Subst) -> int:
    """-1 when no eigenvariable occurs."""
    t = walk(t, s)
    if isinstance(t, EVar):
        return t.level
    if isinstance(t, Sum):
        return max(max_evar_level(t.left, s), max_evar_level(t.right, s))
    if isinstance(t, (App, VApp)):
        m = -1
        for a in t.args:
            m = max(m, max_evar_level(a, s))
        return m
    if isinstance(t, Abs):
        return max_evar_level(t.body, s)
    return -1


def occurs(v: UVar, t: Term, s: Subst) -> bool:
    t = walk(t, s)
    if isinstance(t, UVar):
        return t.ref == v.ref
    if isinstance(t, Sum):
        return occurs(v, t.left, s) or occurs(v, t.right, s)
    if isinstance(t, (App, VApp)):
        if isinstance(t, VApp) and t.var.ref == v.ref:
            return True
        return any(occurs(v, a, s) for a in t.args)
    if isinstance(t, Abs):
        return occurs(v, t.body, s)
    return False


class _Gen:
    """Process-wide supply of fresh unification-variable refs."""

    def __init__(self):
        self.n = 0

    def fresh(self, level: int, hint: str) -> UVar:
        self.n += 1
        return UVar(self.n, level, hint)


GEN = _Gen()


def _bind(v: UVar, t: Term, s: Subst):
    """Bind v := t after occurs, scope, and closedness checks.

    Unification variables inside t that claim a wider eigenvariable scope
    than v are pruned down to v's level, so the scope invariant survives
    later instantiation. Residual constraints are NOT re-examined here;
    the public unify entry point does that once per call.
    """
    if occurs(v, t, s):
        return FAIL
    if free_bvars(t):
        return FAIL
    if max_evar_level(t, s) >= v.level:
        return FAIL
    inner: set = set()
    term_uvars(t, s, inner)
    for w in inner:
        if w.ref != v.ref and w.level > v.level:
            s = s.with_binding(w, GEN.fresh(v.level, w.hint))
    return s.with_binding(v, apply_term(t, s))


def _flatten(t: Term, s: Subst):
    """Flatten nested sums into (non-literal leaves, literal total)."""
    t = walk(t, s)
    if isinstance(t, Sum):
        l1, k1 = _flatten(t.left, s)
        l2, k2 = _flatten(t.right, s)
        return l1 + l2, k1 + k2
    if isinstance(t, Nat):
        return [], t.value
    return [t], 0


def _solve_sum(lhs, lhs_k, rhs, rhs_k, s: Subst):
    """Settle sum(lhs)+lhs_k = sum(rhs)+rhs_k as far as possible.

    Returns an updated Subst (possibly with the equation residuated) or FAIL.
    """
    lhs = [walk(x, s) for x in lhs]
    rhs = [walk(x, s) for x in rhs]
    # re-flatten: walking may have exposed nested sums or literals
    fl, fk = [], lhs_k
    for x in lhs:
        xs, k = _flatten(x, s)
        fl += xs
        fk += k
    fr, rk = [], rhs_k
    for x in rhs:
        xs, k = _flatten(x, s)
        fr += xs
        rk += k
    lhs, lhs_k, rhs, rhs_k = fl, fk, fr, rk

    # cancel structurally identical leaves pairwise
    rem = list(rhs)
    kept = []
    for x in lhs:
        for i, y in enumerate(rem):
            if apply_term(x, s) == apply_term(y, s):
                del rem[i]
                break
        else:
            kept.append(x)
    lhs, rhs = kept, rem

    if not lhs and not rhs:
        return s if lhs_k == rhs_k else FAIL
    # orient so the literal surplus sits on the right
    if not rhs and lhs_k > rhs_k:
        return FAIL  # leaves must contribute a negative amount
    if not lhs and rhs_k > lhs_k:
        return FAIL
    if len(lhs) == 1 and not rhs:
        target = rhs_k - lhs_k
        return _unify(lhs[0], Nat(target), s)
    if len(rhs) == 1 and not lhs:
        target = lhs_k - rhs_k
        return _unify(rhs[0], Nat(target), s)
    flex = any(isinstance(x, (UVar, VApp)) for x in lhs + rhs)
    if not flex:
        # ground-but-symbolic leaves: require a structural pairing
        if len(lhs) != len(rhs) or lhs_k != rhs_k:
            return FAIL
        for x, y in zip(sorted(lhs, key=term_key), sorted(rhs, key=term_key)):
            s = _unify(x, y, s)
            if s is FAIL:
                return FAIL
        return s
    cs = s.constraints + (SumEq(tuple(lhs), lhs_k, tuple(rhs), rhs_k),)
    return s.with_constraints(cs)


def resolve_constraints(s: Subst):
    """Re-examine residual sum equations until a fixed point."""
    for _ in range(100):  # convergence cap; each pass shrinks or stabilizes
        before = (s.bindings, s.constraints)
        pending = s.constraints
        s2 = s.with_constraints(())
        for eq in pending:
            s2 = _solve_sum(list(eq.lhs), eq.lhs_k, list(eq.rhs), eq.rhs_k, s2)
            if s2 is FAIL:
                return FAIL
        if (s2.bindings, s2.constraints) == before:
            return s2
        s = s2
    return s


def _unify(a: Term, b: Term, s: Subst):
    a = walk(a, s)
    b = walk(b, s)
    if a == b:
        return s
    if isinstance(a, UVar):
        return _bind(a, b, s)
    if isinstance(b, UVar):
        return _bind(b, a, s)
    if isinstance(a, Sum) or isinstance(b, Sum):
        la, ka = _flatten(a, s)
        lb, kb = _flatten(b, s)
        return _solve_sum(la, ka, lb, kb, s)
    if isinstance(a, Nat) and isinstance(b, Nat):
        return s if a.value == b.value else FAIL
    if isinstance(a, VApp) or isinstance(b, VApp):
        if isinstance(a, VApp) and isinstance(b, VApp) and a.var.ref == b.var.ref:
            if len(a.args) != len(b.args):
                return FAIL
            for x, y in zip(a.args, b.args):
                s = _unify(x, y, s)
                if s is FAIL:
                    return FAIL
            return s
        if not isinstance(a, VApp):
            a, b = b, a
        return _invert_pattern(a, b, s)
    if isinstance(a, App) and isinstance(b, App):
        if a.head != b.head or len(a.args) != len(b.args):
            return FAIL
        for x, y in zip(a.args, b.args):
            s = _unify(x, y, s)
            if s is FAIL:
                return FAIL
        return s
    if isinstance(a, Abs) and isinstance(b, Abs):
        return _unify(a.body, b.body, s)
    if isinstance(a, EVar) and isinstance(b, EVar):
        return s if (a.name, a.level) == (b.name, b.level) else FAIL
    if isinstance(a, BVar) and isinstance(b, BVar):
        return s if a.index == b.index else FAIL
    return FAIL


def unify(a: Term, b: Term, s: Subst):
    """Most general unifier extending s, or FAIL.

    First-order everywhere, plus the pattern fragment for schema variables
    applied to distinct bound variables. Residual sum constraints are
    re-examined before returning.
    """
    r = _unify(a, b, s)
    if r is FAIL:
        return FAIL
    return resolve_constraints(r)


def _invert_pattern(va: VApp, t: Term, s: Subst):
    """Solve  V(x1..xk) = t  where the xi must be distinct bound variables."""
    ids = []
    for x in va.args:
        x = walk(x, s)
        if not isinstance(x, BVar) or x.index in ids:
            raise PatternError(
                "schema variable applied to a non-pattern argument list; "
                "only distinct bound variables are supported here")
        ids.append(x.index)
    k = len(ids)
    body = _invert_body(va.var, ids, t, 0, s)
    if body is FAIL:
        return FAIL
    lam: Term = body
    hints = "xyzuvw"
    for i in range(k):
        lam = Abs(lam, hints[(k - 1 - i) % len(hints)])
    return _bind(va.var, lam, s)


def _invert_body(v: UVar, ids, t: Term, depth: int, s: Subst):
    t = walk(t, s)
    if isinstance(t, BVar):
        if t.index < depth:
            return t
        outer = t.index - depth
        if outer in ids:
            # position j from the binder list becomes index (k-1-j) under
            # the new abstractions, shifted past the local binders
            j = ids.index(outer)
            return BVar(len(ids) - 1 - j + depth)
        return FAIL
    if isinstance(t, UVar):
        if t.ref == v.ref:
            return FAIL
        return t
    if isinstance(t, (EVar, Nat)):
        return t
    if isinstance(t, Sum):
        l = _invert_body(v, ids, t.left, depth, s)
        r = _invert_body(v, ids, t.right, depth, s)
        if l is FAIL or r is FAIL:
            return FAIL
        return mksum(l, r)
    if isinstance(t, App):
        args = []
        for a in t.args:
            r = _invert_body(v, ids, a, depth, s)
            if r is FAIL:
                return FAIL
            args.append(r)
        return App(t.head, tuple(args))
    if isinstance(t, VApp):
        if t.var.ref == v.ref:
            return FAIL
        args = []
        for a in t.args:
            r = _invert_body(v, ids, a, depth, s)
            if r is FAIL:
                return FAIL
            args.append(r)
        return VApp(t.var, tuple(args))
    if isinstance(t, Abs):
        r = _invert_body(v, ids, t.body, depth + 1, s)
        if r is FAIL:
            return FAIL
        return Abs(r, t.hint)
    return FAIL


def unify_atoms(a: Atom, b: Atom, s: Subst):
    if a.tag != b.tag or len(a.args) != len(b.args):
        return FAIL
    for x, y in zip(a.args, b.args):
        s = unify(x, y, s)
        if s is FAIL:
            return FAIL
    return s


# ---------------------------------------------------------------------------
# Rule instantiation


def instantiate_rule(rule: RuleDef, s: Subst) -> RuleDef:
    """Apply s to the rule body; variables not bound by s stay schematic."""
    remaining = tuple((n, v) for (n, v) in rule.schema
                      if s.lookup(v) is None)
    return RuleDef(rule.name, remaining, apply_rexpr(rule.body, s))


def subst_for(rule: RuleDef, assignment: dict) -> Subst:
    """Build a Substitution binding the rule's schema variables by name."""
    by_name = dict(rule.schema)
    s = Subst()
    for name, t in assignment.items():
        if name not in by_name:
            raise ConfigError(f"rule {rule.name!r} has no schema variable {name!r}")
        s = s.with_binding(by_name[name], t)
    return s


def freshen_rule(rule: RuleDef, level: int):
    """Rename schema variables to fresh UVars at the given signature level.

    Returns (body, mapping name -> fresh UVar).
    """
    s = Subst()
    mapping = {}
    for name, v in rule.schema:
        f = GEN.fresh(level, name)
        mapping[name] = f
        s = s.with_binding(v, f)
    return apply_rexpr(rule.body, s), mapping
