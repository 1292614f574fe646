"""Backward proof search over the focused calculus.

The driver is iterative deepening on the number of decide steps per branch.
Goal-side rules are invertible and applied in a fixed deterministic order;
all nondeterminism (rule choice, additive branches, multiplicative splits,
unification) lives in backtracking generators that thread one substitution
through sibling obligations.

Borders (sequents of atoms and debts) repeat easily under classical biases,
so each branch carries a loop-check set of the ground borders it has passed
through. A repeated ground border only disables further decides there,
closures still apply. Borders with unsolved variables are never pruned: the
same shape can come back under different constraints, so treating it as a
repeat can cut a real proof.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .core import (
    App, Atom, Debt, DMapsTo, EVar, MapsTo, One, Plus, Quant, Sum, Times,
    UVar, VApp, Zero, Abs, Nat, BVar, ONE, ZERO,
    ConfigError, FAIL, GEN, Subst, apply_item, apply_rexpr, apply_term,
    bias_of, canon, freshen_rule, item_is_ground, open_rexpr,
    partition_border, unify_atoms,
)
from .proofs import FProof, fseq_right, fseq_focus, fseq_release, proof_size


@dataclass
class SearchLimits:
    max_depth: int = 12          # decide steps per branch
    max_nodes: int = 2_000_000   # total search nodes, all iterations
    max_seconds: float = 0.0     # wall clock budget, 0 = none


@dataclass
class SearchStats:
    nodes: int = 0           # search nodes, the budget meter
    proof_nodes: int = 0     # size of the returned proof, 0 if none
    decides: int = 0
    backtracks: int = 0
    borders: int = 0
    iterations: int = 0
    seconds: float = 0.0


@dataclass
class Proved:
    proof: FProof
    stats: SearchStats

    def __bool__(self):
        return True


@dataclass
class NotFound:
    exhausted: bool
    stats: SearchStats

    def __bool__(self):
        return False


class _Stop(Exception):
    """Node or time budget ran out mid-iteration."""


# ---------------------------------------------------------------------------
# Goal-side phase, one deterministic step at a time


def right_phase(ctx: tuple):
    """Pick the next invertible step for a context of goal items.

    Returns one of
      ("zeroR", x)                close immediately
      ("oneR", x, rest)           drop a unit
      ("timesR", x, rest)         unfold a pair in place
      ("quantR", x, rest)         open a binder (caller supplies the variable)
      ("plusR", x, rest)          fork both branches
      ("border",)                 nothing left to decompose
    """
    for x in ctx:
        if isinstance(x, Zero):
            return ("zeroR", x)
    for cls_ in (One, Times, Quant, Plus):
        for i, x in enumerate(ctx):
            if isinstance(x, cls_):
                return (cls_.__name__.lower() + "R", x, ctx[:i] + ctx[i + 1:])
    for x in ctx:
        if not isinstance(x, (Atom, Debt)):
            raise ConfigError(f"cannot decompose goal item {x!r}")
    return ("border",)


def expand_right(ctx, sig: tuple = (), pick=None):
    """Run the goal-side phase to all its leaves without deciding anything.

    Returns a sorted list of outcomes: ("closed",) for branches ended by a
    zero, ("border", nsig, items) otherwise. pick(choices) may reorder which
    decomposable item goes first; the result should not depend on it.
    """
    out = []
    _expand(canon(ctx), tuple(sig), pick, out)
    return sorted(out, key=repr)


def _expand(ctx, sig, pick, out):
    for x in ctx:
        if isinstance(x, Zero):
            out.append(("closed",))
            return
    choices = [i for i, x in enumerate(ctx)
               if isinstance(x, (One, Times, Quant, Plus))]
    if not choices:
        out.append(("border", len(sig), canon(ctx)))
        return
    i = choices[0] if pick is None else pick(ctx, choices)
    x = ctx[i]
    rest = ctx[:i] + ctx[i + 1:]
    if isinstance(x, One):
        _expand(rest, sig, pick, out)
    elif isinstance(x, Times):
        _expand(rest + (x.left, x.right), sig, pick, out)
    elif isinstance(x, Plus):
        _expand(rest + (x.left,), sig, pick, out)
        _expand(rest + (x.right,), sig, pick, out)
    else:
        nm = x.hint
        while nm in sig:
            nm += "'"
        ev = EVar(nm, len(sig))
        _expand(rest + (open_rexpr(x.body, ev),), sig + (nm,), pick, out)


# ---------------------------------------------------------------------------
# Border keys for the branch loop check


class _OpenTerm(Exception):
    """Keying hit an unsolved variable, so the border has no ground key."""


def _key_term(t, s: Subst):
    from .core import walk
    t = walk(t, s)
    if isinstance(t, UVar):
        raise _OpenTerm
    if isinstance(t, Nat):
        return ("n", t.value)
    if isinstance(t, Sum):
        return ("s", _key_term(t.left, s), _key_term(t.right, s))
    if isinstance(t, EVar):
        return ("e", t.level)
    if isinstance(t, BVar):
        return ("b", t.index)
    if isinstance(t, App):
        return ("a", t.head) + tuple(_key_term(a, s) for a in t.args)
    if isinstance(t, VApp):
        return ("va", _key_term(t.var, s)) + tuple(
            _key_term(a, s) for a in t.args)
    if isinstance(t, Abs):
        return ("l", _key_term(t.body, s))
    raise TypeError(f"not a term: {t!r}")


def _key_atom(a: Atom, s):
    return (a.tag,) + tuple(_key_term(t, s) for t in a.args)


def border_key(lin, cls, sig, s: Subst):
    """A branch-local identity for a border sequent, or None when the border
    still contains unsolved variables. Only ground borders take part in the
    loop check: an open variable may pick up different bindings the next time
    the same shape appears, so only a ground repeat is a true repeat."""
    try:
        lk = tuple(sorted(
            (isinstance(x, Debt),
             _key_atom(x.atom if isinstance(x, Debt) else x, s))
            for x in lin))
        ck = frozenset(_key_atom(x, s) for x in cls)
    except _OpenTerm:
        return None
    return (len(sig), lk, ck)


def _splits(items: tuple):
    """All ways to divide a multiset in two, without duplicates."""
    n = len(items)
    seen = set()
    for mask in range(1 << n):
        s1 = tuple(items[i] for i in range(n) if mask >> i & 1)
        key = canon(s1)
        if key in seen:
            continue
        seen.add(key)
        s2 = tuple(items[i] for i in range(n) if not mask >> i & 1)
        yield s1, s2


# ---------------------------------------------------------------------------
# The search proper


class _Search:
    def __init__(self, ruleset, limits: SearchLimits, trace, stats: SearchStats,
                 no_debit=False, no_loop_check=False):
        self.rules = ruleset.rules
        self.bias = ruleset.bias
        self.limits = limits
        self.trace = trace
        self.stats = stats
        self.no_debit = no_debit
        self.no_loop_check = no_loop_check
        self.cut = False
        self.maxd = 0
        self.t0 = time.monotonic()

    def tick(self):
        st = self.stats
        st.nodes += 1
        if self.limits.max_nodes and st.nodes > self.limits.max_nodes:
            raise _Stop()
        if self.limits.max_seconds and (st.nodes & 0x3ff) == 0:
            if time.monotonic() - self.t0 > self.limits.max_seconds:
                raise _Stop()

    def emit(self, event, depth, detail):
        if self.trace is not None:
            self.trace(f"{event}\t{depth}\t{detail}")

    # -- right sequents -----------------------------------------------------

    def seq_prove(self, ctx, sig, depth, s, seen):
        self.tick()
        ctx = canon(ctx)
        step = right_phase(ctx)
        kind = step[0]
        if kind == "zeroR":
            yield s, FProof("zeroR", fseq_right(sig, ctx))
            return
        if kind == "oneR":
            for s2, p in self.seq_prove(step[2], sig, depth, s, seen):
                yield s2, FProof("oneR", fseq_right(sig, ctx), (p,))
            return
        if kind == "timesR":
            x, rest = step[1], step[2]
            sub = rest + (x.left, x.right)
            for s2, p in self.seq_prove(sub, sig, depth, s, seen):
                yield s2, FProof("timesR", fseq_right(sig, ctx), (p,), x)
            return
        if kind == "quantR":
            x, rest = step[1], step[2]
            nm = x.hint
            while nm in sig:
                nm += "'"
            ev = EVar(nm, len(sig))
            sub = rest + (open_rexpr(x.body, ev),)
            for s2, p in self.seq_prove(sub, sig + (nm,), depth, s, seen):
                yield s2, FProof("quantR", fseq_right(sig, ctx), (p,), (x, ev))
            return
        if kind == "plusR":
            x, rest = step[1], step[2]
            for s1, p1 in self.seq_prove(rest + (x.left,), sig, depth, s, seen):
                for s2, p2 in self.seq_prove(rest + (x.right,), sig, depth,
                                             s1, seen):
                    yield s2, FProof("plusR", fseq_right(sig, ctx),
                                     (p1, p2), x)
            return

        # a border: all items atomic
        self.stats.borders += 1
        part = partition_border(ctx, self.bias)
        lin, cls = part
        if self.trace is not None:
            from . import dsl
            self.emit("border", depth,
                      ", ".join(dsl.render_rexpr(apply_item(x, s))
                                for x in ctx))
        yield from self.close_border(lin, cls, sig, ctx, s)

        if not self.no_loop_check:
            key = border_key(lin, cls, sig, s)
            if key is not None:
                if key in seen:
                    return
                seen = seen | {key}
        if depth >= self.maxd:
            self.cut = True
            return
        for rd in self.rules:
            self.stats.decides += 1
            self.emit("decide", depth, rd.name)
            body, _ = freshen_rule(rd, len(sig))
            for s2, pf in self.left_focus(body, lin, cls, sig,
                                          depth + 1, s, seen):
                yield s2, FProof("decide", fseq_right(sig, ctx), (pf,),
                                 rd.name)
            self.stats.backtracks += 1
            self.emit("backtrack", depth, rd.name)

    # -- axiom closures at a border ------------------------------------------

    def close_border(self, lin, cls, sig, ctx, s):
        debts = [x for x in lin if isinstance(x, Debt)]
        if len(debts) != 1:
            return
        d = debts[0]
        b = bias_of(d.atom, self.bias)
        if b == 1 and len(lin) == 2:
            other = next(x for x in lin if x is not d)
            if isinstance(other, Atom):
                s2 = unify_atoms(d.atom, other, s)
                if s2 is not FAIL:
                    yield s2, FProof("initd", fseq_right(sig, ctx))
        elif b == 2 and len(lin) == 1:
            tried = []
            for c in cls:
                if c in tried:
                    continue
                tried.append(c)
                s2 = unify_atoms(d.atom, c, s)
                if s2 is not FAIL:
                    yield s2, FProof("initd", fseq_right(sig, ctx))

    # -- focused decomposition ------------------------------------------------

    def left_focus(self, r, share, cls, sig, depth, s, seen):
        self.tick()

        def seq():
            return fseq_focus(sig, r, share, cls)

        if isinstance(r, Atom):
            b = bias_of(r, self.bias)
            if b == -1:
                if len(share) == 1 and isinstance(share[0], Atom):
                    s2 = unify_atoms(r, share[0], s)
                    if s2 is not FAIL:
                        yield s2, FProof("initL", seq())
                return
            if b == -2:
                if share:
                    return
                tried = []
                for c in cls:
                    if c in tried:
                        continue
                    tried.append(c)
                    s2 = unify_atoms(r, c, s)
                    if s2 is not FAIL:
                        yield s2, FProof("initL", seq())
                return
            if self.no_debit:
                return
            if b == 1:
                sub = share + cls + (Debt(r),)
                for s2, p in self.seq_prove(sub, sig, depth, s, seen):
                    yield s2, FProof("debit1", seq(), (p,))
                return
            if share:
                return
            for s2, p in self.seq_prove(cls + (Debt(r),), sig, depth, s, seen):
                yield s2, FProof("debit2", seq(), (p,))
            return
        if isinstance(r, One):
            if not share:
                yield s, FProof("oneL", seq())
            return
        if isinstance(r, Zero):
            return
        if isinstance(r, Plus):
            for s2, p in self.left_focus(r.left, share, cls, sig, depth, s, seen):
                yield s2, FProof("plusL1", seq(), (p,))
            for s2, p in self.left_focus(r.right, share, cls, sig, depth, s, seen):
                yield s2, FProof("plusL2", seq(), (p,))
            return
        if isinstance(r, Times):
            for sh1, sh2 in _splits(share):
                for s1, p1 in self.left_focus(r.left, sh1, cls, sig,
                                              depth, s, seen):
                    for s2, p2 in self.left_focus(r.right, sh2, cls, sig,
                                                  depth, s1, seen):
                        yield s2, FProof("timesL", seq(), (p1, p2))
            return
        if isinstance(r, MapsTo):
            # when the produced side can only cancel a debt (positive atom),
            # test that unification before committing to the rule side: it is
            # a plain match, and failing it early avoids growing subsearches
            # whose outcome cannot matter
            eager = (isinstance(r.expr, Atom)
                     and bias_of(r.expr, self.bias) > 0)
            for sh1, sh2 in _splits(share):
                if eager:
                    for s1, p2 in self.release(r.expr, sh2, cls, sig,
                                               depth, s, seen):
                        for s2, p1 in self.left_focus(r.rule, sh1, cls, sig,
                                                      depth, s1, seen):
                            yield s2, FProof("mapstoL", seq(), (p1, p2))
                else:
                    for s1, p1 in self.left_focus(r.rule, sh1, cls, sig,
                                                  depth, s, seen):
                        for s2, p2 in self.release(r.expr, sh2, cls, sig,
                                                   depth, s1, seen):
                            yield s2, FProof("mapstoL", seq(), (p1, p2))
            return
        if isinstance(r, DMapsTo):
            eager = (isinstance(r.expr, Atom)
                     and bias_of(r.expr, self.bias) > 0)
            if eager:
                for s1, p2 in self.release(r.expr, share, cls, sig,
                                           depth, s, seen):
                    for s2, p1 in self.left_focus(r.rule, (), cls, sig,
                                                  depth, s1, seen):
                        yield s2, FProof("dmapstoL", seq(), (p1, p2))
                return
            for s1, p1 in self.left_focus(r.rule, (), cls, sig, depth, s, seen):
                for s2, p2 in self.release(r.expr, share, cls, sig,
                                           depth, s1, seen):
                    yield s2, FProof("dmapstoL", seq(), (p1, p2))
            return
        if isinstance(r, Quant):
            v = GEN.fresh(len(sig), r.hint.upper() or "T")
            opened = open_rexpr(r.body, v)
            for s2, p in self.left_focus(opened, share, cls, sig,
                                         depth, s, seen):
                yield s2, FProof("quantL", seq(), (p,), v)
            return
        raise ConfigError(f"cannot focus on {r!r}")

    def release(self, e, share, cls, sig, depth, s, seen):
        self.tick()
        if isinstance(e, Atom) and bias_of(e, self.bias) > 0:
            # a positive atom is never released back into the goal phase; it
            # can only pay off one pending debt on the spot
            if len(share) == 1 and isinstance(share[0], Debt):
                s2 = unify_atoms(e, share[0].atom, s)
                if s2 is not FAIL:
                    yield s2, FProof("initR", fseq_release(sig, e, share, cls))
            return
        sub = share + cls + (e,)
        for s2, p in self.seq_prove(sub, sig, depth, s, seen):
            yield s2, FProof("release", fseq_release(sig, e, share, cls), (p,))


# ---------------------------------------------------------------------------
# Reification: bake the final substitution into the proof


def _rexpr_uvars(e, s, acc):
    from .core import term_uvars
    if isinstance(e, Atom):
        for t in e.args:
            term_uvars(t, s, acc)
    elif isinstance(e, Debt):
        _rexpr_uvars(e.atom, s, acc)
    elif isinstance(e, (Plus, Times)):
        _rexpr_uvars(e.left, s, acc)
        _rexpr_uvars(e.right, s, acc)
    elif isinstance(e, (MapsTo, DMapsTo)):
        _rexpr_uvars(e.rule, s, acc)
        _rexpr_uvars(e.expr, s, acc)
    elif isinstance(e, Quant):
        _rexpr_uvars(e.body, s, acc)


def _proof_uvars(p: FProof, s, acc):
    from .core import term_uvars
    q = p.seq
    for x in q.ctx + q.share + q.cls:
        _rexpr_uvars(x, s, acc)
    if q.focus is not None:
        _rexpr_uvars(q.focus, s, acc)
    if isinstance(p.detail, UVar):
        term_uvars(p.detail, s, acc)
    for prem in p.premises:
        _proof_uvars(prem, s, acc)


def _apply_proof(p: FProof, s) -> FProof:
    q = p.seq
    if q.kind == "right":
        seq = fseq_right(q.sig, tuple(apply_item(x, s) for x in q.ctx))
    else:
        mk = fseq_focus if q.kind == "focus" else fseq_release
        seq = mk(q.sig, apply_rexpr(q.focus, s),
                 tuple(apply_item(x, s) for x in q.share),
                 tuple(apply_item(x, s) for x in q.cls))
    detail = p.detail
    if isinstance(detail, (UVar, Sum, App, VApp, Nat, EVar, Abs, BVar)):
        detail = apply_term(detail, s)
    elif isinstance(detail, tuple):
        detail = (apply_rexpr(detail[0], s), detail[1])
    elif detail is not None and not isinstance(detail, str):
        detail = apply_rexpr(detail, s)
    return FProof(p.rule, seq, tuple(_apply_proof(x, s) for x in p.premises),
                  detail)


def reify(proof: FProof, s: Subst) -> FProof:
    """Apply the final substitution everywhere and close any variables that
    survived the search with fresh constants."""
    acc: set = set()
    _proof_uvars(proof, s, acc)
    for i, v in enumerate(sorted(acc, key=lambda v: v.ref)):
        s = s.with_binding(v, App(f"_k{i}", ()))
    return _apply_proof(proof, s)


# ---------------------------------------------------------------------------
# Entry points


def prove(ruleset, goal, limits: SearchLimits = None, trace=None,
          no_debit=False, no_loop_check=False):
    """Search for a focused proof of the goal under the rule set.

    Returns Proved (with a fully reified proof) or NotFound. NotFound.exhausted
    means every branch failed finitely below the depth limit, so no proof
    exists at any depth; otherwise the limit itself may be to blame.

    no_debit drops the debt-creating rules (positive-bias atoms then only
    close through direct axioms); no_loop_check disables the border loop
    check, which can make classical rule sets diverge.
    """
    if isinstance(limits, dict):
        limits = SearchLimits(**limits)
    limits = limits or SearchLimits()
    stats = SearchStats()
    eng = _Search(ruleset, limits, trace, stats, no_debit=no_debit,
                  no_loop_check=no_loop_check)
    ctx = canon(goal.items)
    sig = tuple(goal.sig)
    exhausted = False
    saw_residual = False
    try:
        for maxd in range(0, limits.max_depth + 1):
            stats.iterations += 1
            eng.cut = False
            eng.maxd = maxd
            for s_final, proof in eng.seq_prove(ctx, sig, 0, Subst(),
                                                frozenset()):
                if s_final.constraints:
                    saw_residual = True
                    continue
                stats.seconds = time.monotonic() - eng.t0
                out = reify(proof, s_final)
                stats.proof_nodes = proof_size(out)
                return Proved(out, stats)
            if not eng.cut:
                exhausted = not saw_residual
                break
    except _Stop:
        exhausted = False
    stats.seconds = time.monotonic() - eng.t0
    return NotFound(exhausted, stats)


def close_border(ruleset, lin, cls, sig=(), s: Subst = None):
    """Enumerate immediate axiom closures of a border sequent."""
    eng = _Search(ruleset, SearchLimits(), None, SearchStats())
    ctx = canon(tuple(lin) + tuple(cls))
    return list(eng.close_border(canon(lin), canon(cls), tuple(sig), ctx,
                                 s or Subst()))


def left_focus(ruleset, rexpr, share, cls, sig=(), s: Subst = None,
               max_depth: int = 6):
    """Enumerate focused decompositions of a rule expression against a
    border. Yields (substitution, proof) pairs."""
    limits = SearchLimits(max_depth=max_depth)
    eng = _Search(ruleset, limits, None, SearchStats())
    eng.maxd = max_depth
    yield from eng.left_focus(rexpr, canon(share), canon(cls), tuple(sig),
                              0, s or Subst(), frozenset())
