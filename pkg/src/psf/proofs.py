"""Proof objects for the two calculi, checkers, and translations.

Focused proofs (FProof) are what the search engine produces. Ground proofs
(BProof) use explicit structural rules (contraction/weakening on classical
atoms) and a nondeterministic decide; they are easier to audit. f_to_b
compiles the former into the latter; both checkers work node by node and
share nothing with the search code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import (
    Abs, App, Atom, BVar, Debt, DMapsTo, EVar, MapsTo, Nat, One, Plus, Quant,
    RuleDef, Sum, Times, UVar, VApp, Zero, ZERO, ONE,
    Realm, bias_of, canon, freshen_rule, is_expr, item_key, ms_remove,
    open_rexpr, partition_border, realm_of, unify_atoms, Subst, FAIL,
    apply_rexpr, apply_term,
)
from . import dsl


class ProofError(Exception):
    pass


# ---------------------------------------------------------------------------
# Sequents and proof trees


@dataclass(frozen=True)
class FSeq:
    """A sequent of the focused calculus.

    kind "right":   |- ctx                  (sig; mixed multiset)
    kind "focus":   focus >> share ; cls    (rule expression under focus)
    kind "release": focus >>r share ; cls   (goal expression being released)
    """

    kind: str
    sig: tuple = ()
    ctx: tuple = ()
    focus: object = None
    share: tuple = ()
    cls: tuple = ()


@dataclass(frozen=True)
class FProof:
    rule: str
    seq: FSeq
    premises: tuple = ()
    detail: object = None


@dataclass(frozen=True)
class BSeq:
    """left |- right with explicit rule context on the left."""

    sig: tuple = ()
    left: tuple = ()
    right: tuple = ()


@dataclass(frozen=True)
class BProof:
    rule: str
    seq: BSeq
    premises: tuple = ()
    detail: object = None


def fseq_right(sig, ctx) -> FSeq:
    return FSeq("right", tuple(sig), canon(ctx))


def fseq_focus(sig, focus, share, cls) -> FSeq:
    return FSeq("focus", tuple(sig), (), focus, canon(share), canon(cls))


def fseq_release(sig, focus, share, cls) -> FSeq:
    return FSeq("release", tuple(sig), (), focus, canon(share), canon(cls))


def bseq(sig, left, right) -> BSeq:
    return BSeq(tuple(sig), canon(left), canon(right))


def proof_size(p) -> int:
    """Number of inference nodes in a proof tree (either calculus)."""
    return 1 + sum(proof_size(q) for q in p.premises)


def count_rule(p, name: str) -> int:
    """How often a rule label occurs in a proof tree."""
    return int(p.rule == name) + sum(count_rule(q, name) for q in p.premises)


# ---------------------------------------------------------------------------
# Well-formedness helpers


def _evars_term(t, acc):
    if isinstance(t, EVar):
        acc.append(t)
    elif isinstance(t, (Sum,)):
        _evars_term(t.left, acc)
        _evars_term(t.right, acc)
    elif isinstance(t, App):
        for a in t.args:
            _evars_term(a, acc)
    elif isinstance(t, VApp):
        _evars_term(t.var, acc)
        for a in t.args:
            _evars_term(a, acc)
    elif isinstance(t, Abs):
        _evars_term(t.body, acc)


def _evars_rexpr(e, acc):
    if isinstance(e, Atom):
        for a in e.args:
            _evars_term(a, acc)
    elif isinstance(e, Debt):
        _evars_rexpr(e.atom, acc)
    elif isinstance(e, (Plus, Times, MapsTo, DMapsTo)):
        _evars_rexpr(e.left if isinstance(e, (Plus, Times)) else e.rule, acc)
        _evars_rexpr(e.right if isinstance(e, (Plus, Times)) else e.expr, acc)
    elif isinstance(e, Quant):
        _evars_rexpr(e.body, acc)


def _check_levels(items, sig, where):
    acc = []
    for x in items:
        _evars_rexpr(x, acc)
    for v in acc:
        if v.level >= len(sig) or sig[v.level] != v.name:
            raise ProofError(
                f"{where}: eigenvariable {v.name} is out of scope")


def _is_instance_of(focus, rules, sig) -> bool:
    """Does some rule in the catalog instantiate to this focused expression?"""
    for rd in rules:
        body, _ = freshen_rule(rd, len(sig))
        s = _match_rexpr(body, focus, Subst())
        if s is not FAIL and not s.constraints:
            return True
    return False


def _match_rexpr(pat, tgt, s):
    """Unify two rule expressions structurally. Schema variables may only
    occur in the pattern side here, so this acts as one-way matching."""
    if type(pat) is not type(tgt):
        return FAIL
    if isinstance(pat, (Zero, One)):
        return s
    if isinstance(pat, Atom):
        return unify_atoms(pat, tgt, s)
    if isinstance(pat, Debt):
        return _match_rexpr(pat.atom, tgt.atom, s)
    if isinstance(pat, (Plus, Times)):
        s = _match_rexpr(pat.left, tgt.left, s)
        if s is FAIL:
            return FAIL
        return _match_rexpr(pat.right, tgt.right, s)
    if isinstance(pat, (MapsTo, DMapsTo)):
        s = _match_rexpr(pat.rule, tgt.rule, s)
        if s is FAIL:
            return FAIL
        return _match_rexpr(pat.expr, tgt.expr, s)
    if isinstance(pat, Quant):
        # bound variables line up by index, so compare bodies directly;
        # the closedness check on bindings handles capture avoidance
        return _match_rexpr(pat.body, tgt.body, s)
    return FAIL


def _same_ms(a, b) -> bool:
    return canon(a) == canon(b)


def _minus(ctx, x):
    return ms_remove(canon(ctx), x)


# ---------------------------------------------------------------------------
# Checker for focused proofs


def check_f(proof: FProof, ruleset, goal=None) -> bool:
    """Verify every inference in a focused proof. Raises ProofError."""
    if goal is not None:
        if proof.seq.kind != "right":
            raise ProofError("root sequent is not a right sequent")
        if tuple(goal.sig) != proof.seq.sig:
            raise ProofError("root signature differs from the goal")
        if canon(goal.items) != proof.seq.ctx:
            raise ProofError("root sequent differs from the goal")
    _check_f(proof, ruleset)
    return True


def _expect(cond, msg):
    if not cond:
        raise ProofError(msg)


def _check_f(p: FProof, rs) -> None:
    seq = p.seq
    bias = rs.bias
    name = p.rule
    if seq.kind == "right":
        _check_levels(seq.ctx, seq.sig, name)
    else:
        _check_levels(seq.share + seq.cls + (seq.focus,), seq.sig, name)

    if name == "zeroR":
        _expect(seq.kind == "right" and ZERO in seq.ctx, "zeroR needs a zero")
        _expect(not p.premises, "zeroR takes no premises")
    elif name == "oneR":
        _expect(seq.kind == "right" and ONE in seq.ctx, "oneR needs a one")
        q = _one_premise(p, "right")
        _expect(q.ctx == _minus(seq.ctx, ONE), "oneR premise mismatch")
        _expect(q.sig == seq.sig, "oneR signature mismatch")
    elif name == "plusR":
        x = p.detail
        _expect(isinstance(x, Plus) and x in seq.ctx, "plusR principal missing")
        _expect(len(p.premises) == 2, "plusR takes two premises")
        rest = _minus(seq.ctx, x)
        for prem, part in zip(p.premises, (x.left, x.right)):
            _expect(prem.seq.kind == "right" and prem.seq.sig == seq.sig,
                    "plusR premise shape")
            _expect(prem.seq.ctx == canon(rest + (part,)),
                    "plusR premise mismatch")
    elif name == "timesR":
        x = p.detail
        _expect(isinstance(x, Times) and x in seq.ctx, "timesR principal missing")
        q = _one_premise(p, "right")
        _expect(q.sig == seq.sig, "timesR signature mismatch")
        _expect(q.ctx == canon(_minus(seq.ctx, x) + (x.left, x.right)),
                "timesR premise mismatch")
    elif name == "quantR":
        x = p.detail[0]
        ev = p.detail[1]
        _expect(isinstance(x, Quant) and x in seq.ctx, "quantR principal missing")
        _expect(isinstance(ev, EVar) and ev.level == len(seq.sig),
                "quantR eigenvariable level")
        q = _one_premise(p, "right")
        _expect(q.sig == seq.sig + (ev.name,), "quantR signature mismatch")
        _expect(q.ctx == canon(_minus(seq.ctx, x) + (open_rexpr(x.body, ev),)),
                "quantR premise mismatch")
    elif name == "initd":
        _expect(seq.kind == "right" and not p.premises, "initd shape")
        part = partition_border(seq.ctx, bias)
        _expect(part is not None, "initd at a non-border sequent")
        lin, cls = part
        debts = [x for x in lin if isinstance(x, Debt)]
        _expect(len(debts) == 1, "initd needs exactly one pending debt")
        a = debts[0].atom
        _, sign = realm_of(a, bias)
        _expect(sign > 0, "initd needs a positively biased atom")
        if abs(bias_of(a, bias)) == 1:
            _expect(_same_ms(lin, (debts[0], a)),
                    "initd linear part must be the debt and its atom")
        else:
            _expect(_same_ms(lin, (debts[0],)) and a in cls,
                    "initd must find its atom in the classical part")
    elif name == "decide":
        _expect(seq.kind == "right", "decide starts from a right sequent")
        part = partition_border(seq.ctx, bias)
        _expect(part is not None, "decide at a non-border sequent")
        lin, cls = part
        q = _one_premise(p, "focus")
        _expect(q.sig == seq.sig, "decide signature mismatch")
        _expect(q.share == canon(lin) and q.cls == canon(cls),
                "decide premise context mismatch")
        _expect(_is_instance_of(q.focus, rs.rules, seq.sig),
                "decided expression is not an instance of any rule")
    elif name in ("plusL1", "plusL2"):
        _expect(seq.kind == "focus" and isinstance(seq.focus, Plus),
                f"{name} focus shape")
        q = _one_premise(p, "focus")
        want = seq.focus.left if name == "plusL1" else seq.focus.right
        _expect(q.focus == want and q.share == seq.share and q.cls == seq.cls
                and q.sig == seq.sig, f"{name} premise mismatch")
    elif name == "oneL":
        _expect(seq.kind == "focus" and isinstance(seq.focus, One),
                "oneL focus shape")
        _expect(not seq.share, "oneL requires an empty linear part")
        _expect(not p.premises, "oneL takes no premises")
    elif name == "timesL":
        _expect(seq.kind == "focus" and isinstance(seq.focus, Times),
                "timesL focus shape")
        _expect(len(p.premises) == 2, "timesL takes two premises")
        q1, q2 = p.premises[0].seq, p.premises[1].seq
        _expect(q1.kind == "focus" and q2.kind == "focus", "timesL premise kinds")
        _expect(q1.focus == seq.focus.left and q2.focus == seq.focus.right,
                "timesL premise foci")
        _expect(canon(q1.share + q2.share) == seq.share,
                "timesL must split the linear part")
        _expect(q1.cls == seq.cls and q2.cls == seq.cls
                and q1.sig == seq.sig and q2.sig == seq.sig,
                "timesL classical part mismatch")
    elif name == "mapstoL":
        _expect(seq.kind == "focus" and isinstance(seq.focus, MapsTo),
                "mapstoL focus shape")
        _expect(len(p.premises) == 2, "mapstoL takes two premises")
        q1, q2 = p.premises[0].seq, p.premises[1].seq
        _expect(q1.kind == "focus" and q1.focus == seq.focus.rule,
                "mapstoL first premise")
        _expect(q2.kind == "release" and q2.focus == seq.focus.expr,
                "mapstoL second premise")
        _expect(canon(q1.share + q2.share) == seq.share,
                "mapstoL must split the linear part")
        _expect(q1.cls == seq.cls and q2.cls == seq.cls
                and q1.sig == seq.sig and q2.sig == seq.sig,
                "mapstoL classical part mismatch")
    elif name == "dmapstoL":
        _expect(seq.kind == "focus" and isinstance(seq.focus, DMapsTo),
                "dmapstoL focus shape")
        _expect(len(p.premises) == 2, "dmapstoL takes two premises")
        q1, q2 = p.premises[0].seq, p.premises[1].seq
        _expect(q1.kind == "focus" and q1.focus == seq.focus.rule
                and not q1.share, "dmapstoL rule premise keeps no linear part")
        _expect(q2.kind == "release" and q2.focus == seq.focus.expr
                and q2.share == seq.share, "dmapstoL release premise")
        _expect(q1.cls == seq.cls and q2.cls == seq.cls
                and q1.sig == seq.sig and q2.sig == seq.sig,
                "dmapstoL classical part mismatch")
    elif name == "quantL":
        _expect(seq.kind == "focus" and isinstance(seq.focus, Quant),
                "quantL focus shape")
        t = p.detail
        _check_levels((Atom("_t", (t,)),), seq.sig, "quantL witness")
        q = _one_premise(p, "focus")
        _expect(q.focus == open_rexpr(seq.focus.body, t)
                and q.share == seq.share and q.cls == seq.cls
                and q.sig == seq.sig, "quantL premise mismatch")
    elif name == "initL":
        _expect(seq.kind == "focus" and isinstance(seq.focus, Atom),
                "initL focus shape")
        _expect(not p.premises, "initL takes no premises")
        _, sign = realm_of(seq.focus, bias)
        _expect(sign < 0, "initL needs a negatively biased atom")
        if abs(bias_of(seq.focus, bias)) == 1:
            _expect(_same_ms(seq.share, (seq.focus,)),
                    "initL must consume exactly its own atom")
        else:
            _expect(not seq.share and seq.focus in seq.cls,
                    "initL must find its atom in the classical part")
    elif name == "debit1":
        _expect(seq.kind == "focus" and isinstance(seq.focus, Atom),
                "debit1 focus shape")
        _expect(bias_of(seq.focus, bias) == 1, "debit1 needs bias +1")
        q = _one_premise(p, "right")
        _expect(q.sig == seq.sig, "debit1 signature mismatch")
        _expect(q.ctx == canon(seq.share + seq.cls + (Debt(seq.focus),)),
                "debit1 premise mismatch")
    elif name == "debit2":
        _expect(seq.kind == "focus" and isinstance(seq.focus, Atom),
                "debit2 focus shape")
        _expect(bias_of(seq.focus, bias) == 2, "debit2 needs bias +2")
        _expect(not seq.share, "debit2 requires an empty linear part")
        q = _one_premise(p, "right")
        _expect(q.sig == seq.sig, "debit2 signature mismatch")
        _expect(q.ctx == canon(seq.cls + (Debt(seq.focus),)),
                "debit2 premise mismatch")
    elif name == "release":
        _expect(seq.kind == "release", "release shape")
        e = seq.focus
        if isinstance(e, Atom):
            _, sign = realm_of(e, bias)
            _expect(sign < 0,
                    "a positive atom is never released, only paid to a debt")
        q = _one_premise(p, "right")
        _expect(q.sig == seq.sig, "release signature mismatch")
        _expect(q.ctx == canon(seq.share + seq.cls + (e,)),
                "release premise mismatch")
    elif name == "initR":
        _expect(seq.kind == "release" and isinstance(seq.focus, Atom),
                "initR shape")
        _expect(not p.premises, "initR takes no premises")
        _, sign = realm_of(seq.focus, bias)
        _expect(sign > 0, "initR needs a positively biased atom")
        _expect(seq.share == (Debt(seq.focus),),
                "initR must pay exactly its own debt")
    else:
        raise ProofError(f"unknown focused rule {name!r}")

    for prem in p.premises:
        _check_f(prem, rs)


def _one_premise(p, kind: str):
    if len(p.premises) != 1:
        raise ProofError(f"{p.rule} takes exactly one premise")
    q = p.premises[0].seq
    if q.kind != kind:
        raise ProofError(f"{p.rule} premise must be a {kind} sequent")
    return q


# ---------------------------------------------------------------------------
# Checker for ground proofs


def check_b(proof: BProof, ruleset, goal=None) -> bool:
    if goal is not None:
        if tuple(goal.sig) != proof.seq.sig or proof.seq.left != ():
            raise ProofError("root sequent differs from the goal")
        if canon(goal.items) != proof.seq.right:
            raise ProofError("root sequent differs from the goal")
    _check_b(proof, ruleset)
    return True


def _check_b(p: BProof, rs) -> None:
    seq = p.seq
    bias = rs.bias
    name = p.rule
    _check_levels(seq.left + seq.right, seq.sig, name)

    def prem(i=0):
        return p.premises[i].seq

    def expect_n(n):
        _expect(len(p.premises) == n, f"{name} takes {n} premise(s)")

    if name == "zeroR":
        _expect(ZERO in seq.right, "zeroR needs a zero on the right")
        expect_n(0)
    elif name == "oneR":
        _expect(ONE in seq.right, "oneR needs a one on the right")
        expect_n(1)
        _expect(prem() == bseq(seq.sig, seq.left, _minus(seq.right, ONE)),
                "oneR premise mismatch")
    elif name == "plusR":
        x = p.detail
        _expect(isinstance(x, Plus) and x in seq.right, "plusR principal missing")
        expect_n(2)
        rest = _minus(seq.right, x)
        _expect(prem(0) == bseq(seq.sig, seq.left, rest + (x.left,)),
                "plusR first premise mismatch")
        _expect(prem(1) == bseq(seq.sig, seq.left, rest + (x.right,)),
                "plusR second premise mismatch")
    elif name == "timesR":
        x = p.detail
        _expect(isinstance(x, Times) and x in seq.right, "timesR principal missing")
        expect_n(1)
        _expect(prem() == bseq(seq.sig, seq.left,
                               _minus(seq.right, x) + (x.left, x.right)),
                "timesR premise mismatch")
    elif name == "quantR":
        x, ev = p.detail
        _expect(isinstance(x, Quant) and x in seq.right, "quantR principal missing")
        _expect(isinstance(ev, EVar) and ev.level == len(seq.sig),
                "quantR eigenvariable level")
        expect_n(1)
        _expect(prem() == bseq(seq.sig + (ev.name,), seq.left,
                               _minus(seq.right, x) + (open_rexpr(x.body, ev),)),
                "quantR premise mismatch")
    elif name == "oneL":
        _expect(seq.left == (ONE,) and seq.right == (), "oneL closes 1 |- only")
        expect_n(0)
    elif name in ("plusL1", "plusL2"):
        x = p.detail
        _expect(isinstance(x, Plus) and x in seq.left, f"{name} principal missing")
        expect_n(1)
        part = x.left if name == "plusL1" else x.right
        _expect(prem() == bseq(seq.sig, _minus(seq.left, x) + (part,), seq.right),
                f"{name} premise mismatch")
    elif name == "timesL":
        x = p.detail
        _expect(isinstance(x, Times) and x in seq.left, "timesL principal missing")
        expect_n(2)
        q1, q2 = prem(0), prem(1)
        _expect(q1.sig == seq.sig and q2.sig == seq.sig, "timesL signatures")
        lrest = _minus(seq.left, x)
        _expect(x.left in q1.left and x.right in q2.left,
                "timesL premises must keep their halves")
        _expect(canon(ms_remove(q1.left, x.left) + ms_remove(q2.left, x.right))
                == lrest, "timesL must split the rule context")
        _expect(canon(q1.right + q2.right) == seq.right,
                "timesL must split the right side")
    elif name == "mapstoL":
        x = p.detail
        _expect(isinstance(x, MapsTo) and x in seq.left, "mapstoL principal missing")
        expect_n(2)
        q1, q2 = prem(0), prem(1)
        _expect(q1.sig == seq.sig and q2.sig == seq.sig, "mapstoL signatures")
        _expect(x.rule in q1.left, "mapstoL first premise keeps the rule part")
        _expect(x.expr in q2.right, "mapstoL second premise proves the body")
        lrest = _minus(seq.left, x)
        _expect(canon(ms_remove(q1.left, x.rule) + q2.left) == lrest,
                "mapstoL must split the rule context")
        _expect(canon(q1.right + ms_remove(q2.right, x.expr)) == seq.right,
                "mapstoL must split the right side")
    elif name == "dmapstoL":
        x = p.detail
        _expect(isinstance(x, DMapsTo) and x in seq.left, "dmapstoL principal missing")
        expect_n(2)
        q1, q2 = prem(0), prem(1)
        _expect(q1.sig == seq.sig and q2.sig == seq.sig, "dmapstoL signatures")
        _expect(q1.left == (x.rule,), "dmapstoL first premise is the bare rule")
        for y in q1.right:
            ok = isinstance(y, Atom) and realm_of(y, bias)[0] is Realm.CLASSICAL
            _expect(ok, "dmapstoL first premise right side must be classical")
        _expect(x.expr in q2.right, "dmapstoL second premise proves the body")
        _expect(q2.left == _minus(seq.left, x), "dmapstoL rule context mismatch")
        _expect(canon(q1.right + ms_remove(q2.right, x.expr)) == seq.right,
                "dmapstoL right side mismatch")
    elif name == "quantL":
        x, t = p.detail
        _expect(isinstance(x, Quant) and x in seq.left, "quantL principal missing")
        _check_levels((Atom("_t", (t,)),), seq.sig, "quantL witness")
        expect_n(1)
        _expect(prem() == bseq(seq.sig,
                               _minus(seq.left, x) + (open_rexpr(x.body, t),),
                               seq.right),
                "quantL premise mismatch")
    elif name == "decide":
        expect_n(1)
        q = prem()
        _expect(q.sig == seq.sig and q.right == seq.right, "decide keeps the goal")
        added = list(q.left)
        for y in seq.left:
            _expect(y in added, "decide may only add to the rule context")
            added.remove(y)
        _expect(added, "decide must add at least one rule instance")
        for y in added:
            _expect(_is_instance_of(y, rs.rules, seq.sig),
                    "decide added a non-rule")
    elif name == "init":
        _expect(len(seq.left) == 1 and _same_ms(seq.right, seq.left),
                "init closes E |- E only")
        _expect(is_expr(seq.left[0]), "init needs a goal-side expression")
        expect_n(0)
    elif name == "initd":
        expect_n(0)
        _expect(seq.left == (), "initd keeps no rule context")
        _expect(len(seq.right) == 2, "initd closes |- ~A,A only")
        debts = [x for x in seq.right if isinstance(x, Debt)]
        atoms = [x for x in seq.right if isinstance(x, Atom)]
        _expect(len(debts) == 1 and len(atoms) == 1 and debts[0].atom == atoms[0],
                "initd closes |- ~A,A only")
        _, sign = realm_of(atoms[0], bias)
        _expect(sign > 0, "initd needs a positively biased atom")
    elif name == "debit1":
        x = p.detail
        _expect(isinstance(x, Atom) and bias_of(x, bias) == 1 and x in seq.left,
                "debit1 principal missing")
        expect_n(1)
        _expect(prem() == bseq(seq.sig, _minus(seq.left, x),
                               seq.right + (Debt(x),)),
                "debit1 premise mismatch")
    elif name == "debit2":
        x = p.detail
        _expect(isinstance(x, Atom) and bias_of(x, bias) == 2,
                "debit2 principal missing")
        _expect(seq.left == (x,), "debit2 keeps no other rule context")
        for y in seq.right:
            ok = isinstance(y, Atom) and realm_of(y, bias)[0] is Realm.CLASSICAL
            _expect(ok, "debit2 right side must be classical")
        expect_n(1)
        _expect(prem() == bseq(seq.sig, (), seq.right + (Debt(x),)),
                "debit2 premise mismatch")
    elif name == "contrR":
        x = p.detail
        _expect(isinstance(x, Atom) and realm_of(x, bias)[0] is Realm.CLASSICAL,
                "contrR works on classical atoms only")
        _expect(x in seq.right, "contrR principal missing")
        expect_n(1)
        _expect(prem() == bseq(seq.sig, seq.left, seq.right + (x,)),
                "contrR premise mismatch")
    elif name == "weakR":
        x = p.detail
        _expect(isinstance(x, Atom) and realm_of(x, bias)[0] is Realm.CLASSICAL,
                "weakR works on classical atoms only")
        _expect(x in seq.right, "weakR principal missing")
        expect_n(1)
        _expect(prem() == bseq(seq.sig, seq.left, _minus(seq.right, x)),
                "weakR premise mismatch")
    else:
        raise ProofError(f"unknown ground rule {name!r}")

    for q in p.premises:
        _check_b(q, rs)


# ---------------------------------------------------------------------------
# Focused-to-ground compilation


def f_to_b(proof: FProof, ruleset) -> BProof:
    """Compile a focused proof into a ground proof with explicit
    contraction and weakening steps."""
    if proof.seq.kind != "right":
        raise ProofError("can only compile a proof of a right sequent")
    return _fb_right(proof, ruleset.bias)


def _fb_right(p: FProof, bias) -> BProof:
    seq = p.seq
    s = bseq(seq.sig, (), seq.ctx)
    name = p.rule
    if name == "zeroR":
        return BProof("zeroR", s)
    if name == "oneR":
        return BProof("oneR", s, (_fb_right(p.premises[0], bias),))
    if name == "plusR":
        return BProof("plusR", s,
                      tuple(_fb_right(q, bias) for q in p.premises), p.detail)
    if name == "timesR":
        return BProof("timesR", s, (_fb_right(p.premises[0], bias),), p.detail)
    if name == "quantR":
        return BProof("quantR", s, (_fb_right(p.premises[0], bias),), p.detail)
    if name == "initd":
        lin, cls = partition_border(seq.ctx, bias)
        debt = next(x for x in lin if isinstance(x, Debt))
        if len(lin) == 2:
            keep = canon(lin)
            drop = list(cls)
        else:
            keep = canon(lin + (debt.atom,))
            drop = list(cls)
            drop.remove(debt.atom)
        core = BProof("initd", bseq(seq.sig, (), keep))
        return _weaken_chain(core, drop, seq.sig, (), bias)
    if name == "decide":
        foc = p.premises[0]
        inner = _fb_focus(foc, bias)
        return BProof("decide", s, (inner,), foc.seq.focus)
    raise ProofError(f"unexpected rule {name!r} at a right sequent")


def _weaken_chain(proof: BProof, extras, sig, left, bias) -> BProof:
    """Wrap a proof with weakR steps so the conclusion also carries extras."""
    out = proof
    acc = list(proof.seq.right)
    for x in extras:
        acc.append(x)
        out = BProof("weakR", bseq(sig, left, tuple(acc)), (out,), x)
    return out


def _contract_chain(proof: BProof, extras, bias) -> BProof:
    """Wrap a proof whose conclusion right side has duplicated classical
    atoms so the duplicates collapse (reading downward: contraction)."""
    out = proof
    right = list(proof.seq.right)
    for x in extras:
        right.remove(x)
        out = BProof("contrR", bseq(proof.seq.sig, proof.seq.left, tuple(right)),
                     (out,), x)
    return out


def _fb_focus(p: FProof, bias) -> BProof:
    """Focus sequent R >> share;cls becomes R |- share,cls."""
    seq = p.seq
    s = bseq(seq.sig, (seq.focus,), seq.share + seq.cls)
    name = p.rule
    if name in ("plusL1", "plusL2"):
        inner = _fb_focus(p.premises[0], bias)
        return BProof(name, s, (inner,), seq.focus)
    if name == "oneL":
        core = BProof("oneL", bseq(seq.sig, (ONE,), ()))
        return _weaken_chain(core, list(seq.cls), seq.sig, (ONE,), bias)
    if name == "timesL":
        q1, q2 = p.premises
        b1, b2 = _fb_focus(q1, bias), _fb_focus(q2, bias)
        dup = bseq(seq.sig, (seq.focus,), seq.share + seq.cls + seq.cls)
        split = BProof("timesL", dup, (b1, b2), seq.focus)
        return _contract_chain(split, list(seq.cls), bias)
    if name == "mapstoL":
        q1, q2 = p.premises
        b1 = _fb_focus(q1, bias)
        b2 = _fb_release(q2, bias)
        dup = bseq(seq.sig, (seq.focus,), seq.share + seq.cls + seq.cls)
        split = BProof("mapstoL", dup, (b1, b2), seq.focus)
        return _contract_chain(split, list(seq.cls), bias)
    if name == "dmapstoL":
        q1, q2 = p.premises
        b1 = _fb_focus(q1, bias)
        b2 = _fb_release(q2, bias)
        dup = bseq(seq.sig, (seq.focus,), seq.share + seq.cls + seq.cls)
        split = BProof("dmapstoL", dup, (b1, b2), seq.focus)
        return _contract_chain(split, list(seq.cls), bias)
    if name == "quantL":
        inner = _fb_focus(p.premises[0], bias)
        return BProof("quantL", s, (inner,), (seq.focus, p.detail))
    if name == "initL":
        a = seq.focus
        if abs(bias_of(a, bias)) == 1:
            core = BProof("init", bseq(seq.sig, (a,), (a,)))
            return _weaken_chain(core, list(seq.cls), seq.sig, (a,), bias)
        drop = list(seq.cls)
        drop.remove(a)
        core = BProof("init", bseq(seq.sig, (a,), (a,)))
        return _weaken_chain(core, drop, seq.sig, (a,), bias)
    if name == "debit1":
        inner = _fb_right(p.premises[0], bias)
        return BProof("debit1", s, (inner,), seq.focus)
    if name == "debit2":
        inner = _fb_right(p.premises[0], bias)
        return BProof("debit2", s, (inner,), seq.focus)
    raise ProofError(f"unexpected rule {p.rule!r} at a focus sequent")


def _fb_release(p: FProof, bias) -> BProof:
    if p.rule == "release":
        return _fb_right(p.premises[0], bias)
    if p.rule == "initR":
        # the paid debt becomes a two-item identity, the classical side is
        # restored by weakening
        a = p.seq.focus
        core = BProof("initd", bseq(p.seq.sig, (), canon((Debt(a), a))))
        return _weaken_chain(core, list(p.seq.cls), p.seq.sig, (), bias)
    raise ProofError(f"unexpected rule {p.rule!r} at a release sequent")


# ---------------------------------------------------------------------------
# Identity expansion


def atomically_close(e, sig: tuple = ()) -> BProof:
    """A ground proof of E |- E that only uses init at atoms."""
    s = bseq(sig, (e,), (e,))
    if isinstance(e, Atom):
        return BProof("init", s)
    if isinstance(e, Zero):
        return BProof("zeroR", s)
    if isinstance(e, One):
        ax = BProof("oneL", bseq(sig, (ONE,), ()))
        return BProof("oneR", s, (ax,))
    if isinstance(e, Plus):
        lft = BProof("plusL1", bseq(sig, (e,), (e.left,)),
                     (atomically_close(e.left, sig),), e)
        rgt = BProof("plusL2", bseq(sig, (e,), (e.right,)),
                     (atomically_close(e.right, sig),), e)
        return BProof("plusR", s, (lft, rgt), e)
    if isinstance(e, Times):
        split = BProof("timesL", bseq(sig, (e,), (e.left, e.right)),
                       (atomically_close(e.left, sig),
                        atomically_close(e.right, sig)), e)
        return BProof("timesR", s, (split,), e)
    if isinstance(e, Quant):
        nm = e.hint
        while nm in sig:
            nm += "'"
        ev = EVar(nm, len(sig))
        opened = open_rexpr(e.body, ev)
        inst = BProof("quantL", bseq(sig + (nm,), (e,), (opened,)),
                      (atomically_close(opened, sig + (nm,)),), (e, ev))
        return BProof("quantR", s, (inst,), (e, ev))
    raise ProofError(f"cannot close over {e!r}")


# ---------------------------------------------------------------------------
# Rendering and serialization


def _seq_text(seq) -> str:
    if isinstance(seq, BSeq):
        sig = (" ".join(seq.sig) + " ; ") if seq.sig else ""
        left = ", ".join(dsl.render_rexpr(x) for x in seq.left)
        right = ", ".join(dsl.render_rexpr(x) for x in seq.right)
        return f"{sig}{left} |- {right}"
    sig = (" ".join(seq.sig) + " ; ") if seq.sig else ""
    if seq.kind == "right":
        return f"{sig}|- " + ", ".join(dsl.render_rexpr(x) for x in seq.ctx)
    arrow = ">>" if seq.kind == "focus" else ">>r"
    share = ", ".join(dsl.render_rexpr(x) for x in seq.share)
    cls = ", ".join(dsl.render_rexpr(x) for x in seq.cls)
    return f"{sig}{dsl.render_rexpr(seq.focus)} {arrow} {share} ; {cls}"


def _detail_text(detail) -> str:
    if detail is None:
        return ""
    if isinstance(detail, str):
        return f"[{detail}]"
    if isinstance(detail, tuple):
        return ""
    try:
        return f"[{dsl.render_rexpr(detail)}]"
    except TypeError:
        return f"[{dsl.render_term(detail)}]"


def proof_to_text(p, indent: int = 0) -> str:
    pad = "  " * indent
    line = f"{pad}{p.rule}{_detail_text(p.detail)}  {_seq_text(p.seq)}"
    parts = [line]
    for q in p.premises:
        parts.append(proof_to_text(q, indent + 1))
    return "\n".join(parts)


def proof_to_latex(p) -> str:
    prems = " \\quad ".join(proof_to_latex(q) for q in p.premises)
    seq = _seq_latex(p.seq)
    if not p.premises:
        return f"\\dfrac{{}}{{{seq}}}"
    return f"\\dfrac{{{prems}}}{{{seq}}}"


def _seq_latex(seq) -> str:
    if isinstance(seq, BSeq):
        left = ", ".join(dsl.latex_rexpr(x) for x in seq.left)
        right = ", ".join(dsl.latex_rexpr(x) for x in seq.right)
        return f"{left} \\vdash {right}"
    if seq.kind == "right":
        return "\\vdash " + ", ".join(dsl.latex_rexpr(x) for x in seq.ctx)
    arrow = "\\Downarrow" if seq.kind == "focus" else "\\Downarrow_r"
    share = ", ".join(dsl.latex_rexpr(x) for x in seq.share)
    cls = ", ".join(dsl.latex_rexpr(x) for x in seq.cls)
    return f"{dsl.latex_rexpr(seq.focus)} {arrow} {share} ; {cls}"


def _detail_to_json(detail):
    if detail is None:
        return None
    if isinstance(detail, str):
        return {"d": "name", "v": detail}
    if isinstance(detail, tuple):
        x, t = detail
        return {"d": "pair", "e": dsl.rexpr_to_json(x),
                "t": dsl.term_to_json(t)}
    try:
        return {"d": "expr", "v": dsl.rexpr_to_json(detail)}
    except TypeError:
        return {"d": "term", "v": dsl.term_to_json(detail)}


def _detail_from_json(d):
    if d is None:
        return None
    if d["d"] == "name":
        return d["v"]
    if d["d"] == "pair":
        return (dsl.rexpr_from_json(d["e"]), dsl.term_from_json(d["t"]))
    if d["d"] == "expr":
        return dsl.rexpr_from_json(d["v"])
    return dsl.term_from_json(d["v"])


def _fseq_to_json(seq: FSeq):
    return {"kind": seq.kind, "sig": list(seq.sig),
            "ctx": [dsl.rexpr_to_json(x) for x in seq.ctx],
            "focus": None if seq.focus is None else dsl.rexpr_to_json(seq.focus),
            "share": [dsl.rexpr_to_json(x) for x in seq.share],
            "cls": [dsl.rexpr_to_json(x) for x in seq.cls]}


def _fseq_from_json(d) -> FSeq:
    return FSeq(d["kind"], tuple(d["sig"]),
                tuple(dsl.rexpr_from_json(x) for x in d["ctx"]),
                None if d["focus"] is None else dsl.rexpr_from_json(d["focus"]),
                tuple(dsl.rexpr_from_json(x) for x in d["share"]),
                tuple(dsl.rexpr_from_json(x) for x in d["cls"]))


def _bseq_to_json(seq: BSeq):
    return {"sig": list(seq.sig),
            "left": [dsl.rexpr_to_json(x) for x in seq.left],
            "right": [dsl.rexpr_to_json(x) for x in seq.right]}


def _bseq_from_json(d) -> BSeq:
    return BSeq(tuple(d["sig"]),
                tuple(dsl.rexpr_from_json(x) for x in d["left"]),
                tuple(dsl.rexpr_from_json(x) for x in d["right"]))


def _proof_to_obj(p):
    if isinstance(p, FProof):
        return {"kind": "f", "rule": p.rule, "seq": _fseq_to_json(p.seq),
                "detail": _detail_to_json(p.detail),
                "premises": [_proof_to_obj(q) for q in p.premises]}
    return {"kind": "b", "rule": p.rule, "seq": _bseq_to_json(p.seq),
            "detail": _detail_to_json(p.detail),
            "premises": [_proof_to_obj(q) for q in p.premises]}


def _proof_from_obj(d):
    prems = tuple(_proof_from_obj(q) for q in d["premises"])
    detail = _detail_from_json(d.get("detail"))
    if d["kind"] == "f":
        return FProof(d["rule"], _fseq_from_json(d["seq"]), prems, detail)
    return BProof(d["rule"], _bseq_from_json(d["seq"]), prems, detail)


def proof_to_json(p) -> str:
    return json.dumps(_proof_to_obj(p), sort_keys=True)


def proof_from_json(text: str):
    return _proof_from_obj(json.loads(text))


def count_rule(p, name: str) -> int:
    """How many nodes of a given rule a proof contains."""
    n = 1 if p.rule == name else 0
    return n + sum(count_rule(q, name) for q in p.premises)


def proof_size(p) -> int:
    return 1 + sum(proof_size(q) for q in p.premises)
