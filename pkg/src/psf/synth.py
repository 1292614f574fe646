"""Symbolic computation of the big-step inference rules a rewrite rule
induces under a bias assignment.

Each synthetic rule is one resolution of the don't-know choices in a
single decide: a pick of +-branches, with context splits left schematic.
Conclusion and premises are border-sequent schemas written over the
rule's own schema variables.  Slot names (D, D', ...) stand for
multisets of linear context items whose exact split is not fixed by the
rule; every schema also implicitly carries the shared classical context
(written Y).  Atoms consumed classically (bias -2) stay visible in the
conclusion and in every premise.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count
import json

from .core import (
    Atom, Debt, DMapsTo, MapsTo, One, Plus, Quant, RuleDef, Times, UVar,
    Zero, GEN, bias_of, open_rexpr,
)
from .dsl import latex_rexpr, render_rexpr, rexpr_to_json, schema_names


class SynthError(Exception):
    pass


@dataclass(frozen=True)
class SeqSchema:
    items: tuple
    slots: tuple


@dataclass(frozen=True)
class SyntheticRule:
    name: str
    conclusion: SeqSchema
    premises: tuple
    names: dict


# internal accumulator: one partially built alternative
@dataclass(frozen=True)
class _Alt:
    concl: tuple = ()
    cls: tuple = ()
    slots: tuple = ()
    prems: tuple = ()   # of (items, slot-tokens)


_NOTHING = _Alt()


def _merge(a: _Alt, b: _Alt) -> _Alt:
    return _Alt(a.concl + b.concl, a.cls + b.cls, a.slots + b.slots,
                a.prems + b.prems)


def _cross(xs, ys):
    return [_merge(a, b) for a in xs for b in ys]


def _right_items(e, bias, ctr, names):
    """Decompose a released expression the way the invertible right
    phase would, returning (slot tokens, premise item multisets).
    Additive branches share one slot; multiplicative pairs split it."""
    if isinstance(e, Zero):
        return (next(ctr),), []
    if isinstance(e, One):
        k = next(ctr)
        return (k,), [((), (k,))]
    if isinstance(e, Times):
        sa, pa = _right_items(e.left, bias, ctr, names)
        sb, pb = _right_items(e.right, bias, ctr, names)
        return sa + sb, pa + pb
    if isinstance(e, Plus):
        sa, pa = _right_items(e.left, bias, ctr, names)
        sb, pb = _right_items(e.right, bias, ctr, names)
        if len(sa) != 1 or len(sb) != 1:
            raise SynthError(
                "additive branch over a multiplicative split has no "
                "schematic context split")
        k = sa[0]
        pb = [(items, tuple(k if t == sb[0] else t for t in slots))
              for items, slots in pb]
        return (k,), pa + pb
    # atoms, debts and quantified bodies stay as border items
    k = next(ctr)
    return (k,), [((e,), (k,))]


def _strip_slots(prems):
    return tuple((items, ()) for items, _ in prems)


def _release(e, bias, empty, ctr, names):
    if isinstance(e, Atom) and bias_of(e, bias) > 0:
        # only initR can finish a positive atomic release
        if empty:
            return []
        return [_Alt(concl=(Debt(e),))]
    slots, prems = _right_items(e, bias, ctr, names)
    if empty:
        return [_Alt(prems=_strip_slots(prems))]
    return [_Alt(slots=slots, prems=tuple(prems))]


def _walk(r, bias, empty, ctr, names):
    if isinstance(r, Atom):
        d = bias_of(r, bias)
        if d == -1:
            return [] if empty else [_Alt(concl=(r,))]
        if d == -2:
            return [_Alt(cls=(r,))]
        if d == 1:
            if empty:
                return [_Alt(prems=(((Debt(r),), ()),))]
            k = next(ctr)
            return [_Alt(slots=(k,), prems=(((Debt(r),), (k,)),))]
        return [_Alt(prems=(((Debt(r),), ()),))]
    if isinstance(r, One):
        return [_NOTHING]
    if isinstance(r, Zero):
        return []
    if isinstance(r, Plus):
        return (_walk(r.left, bias, empty, ctr, names)
                + _walk(r.right, bias, empty, ctr, names))
    if isinstance(r, Times):
        return _cross(_walk(r.left, bias, empty, ctr, names),
                      _walk(r.right, bias, empty, ctr, names))
    if isinstance(r, MapsTo):
        return _cross(_walk(r.rule, bias, empty, ctr, names),
                      _release(r.expr, bias, empty, ctr, names))
    if isinstance(r, DMapsTo):
        return _cross(_walk(r.rule, bias, True, ctr, names),
                      _release(r.expr, bias, empty, ctr, names))
    if isinstance(r, Quant):
        v = GEN.fresh(0, r.hint)
        base = r.hint
        taken = set(names.values())
        nm, i = base, 1
        while nm in taken:
            nm, i = f"{base}{i}", i + 1
        names[v.ref] = nm
        return _walk(open_rexpr(r.body, v), bias, empty, ctr, names)
    raise SynthError(f"cannot synthesize from {type(r).__name__}")


def _slot_names(tokens):
    return {t: "D" + "'" * i for i, t in enumerate(tokens)}


def _assemble(alt: _Alt, name: str, names: dict) -> SyntheticRule:
    order = []
    for k in alt.slots:
        if k not in order:
            order.append(k)
    for _, slots in alt.prems:
        for k in slots:
            if k not in order:
                order.append(k)
    disp = _slot_names(order)
    concl = SeqSchema(alt.concl + alt.cls,
                      tuple(disp[k] for k in alt.slots))
    prems = tuple(SeqSchema(items + alt.cls, tuple(disp[k] for k in slots))
                  for items, slots in alt.prems)
    return SyntheticRule(name, concl, prems, dict(names))


def synthesize(rule: RuleDef, bias) -> list:
    """All synthetic inference rules a decide on this rule can induce."""
    names = dict(schema_names(rule))
    alts = _walk(rule.body, bias, False, count(), names)
    if len(alts) == 1:
        return [_assemble(alts[0], rule.name, names)]
    return [_assemble(a, f"{rule.name}#{i + 1}", names)
            for i, a in enumerate(alts)]


# ---------------------------------------------------------------------------
# Rendering


def _seq_text(seq: SeqSchema, names) -> str:
    parts = [render_rexpr(x, uv=names) for x in seq.items]
    parts += list(seq.slots)
    parts.append("Y")
    return "|- " + ", ".join(parts)


def _rule_text(sr: SyntheticRule) -> str:
    top = "    ".join(_seq_text(p, sr.names) for p in sr.premises)
    bot = _seq_text(sr.conclusion, sr.names)
    width = max(len(top), len(bot))
    lines = []
    if top:
        lines.append(top.center(width).rstrip())
    lines.append("-" * width + f"  [{sr.name}]")
    lines.append(bot.center(width).rstrip())
    return "\n".join(lines)


def _seq_latex(seq: SeqSchema, names) -> str:
    parts = [latex_rexpr(x, uv=names) for x in seq.items]
    parts += ["\\Delta" + "'" * s.count("'") for s in seq.slots]
    parts.append("\\Upsilon")
    return "\\vdash " + ", ".join(parts)


def _rule_latex(sr: SyntheticRule) -> str:
    prems = " \\quad ".join(_seq_latex(p, sr.names) for p in sr.premises)
    concl = _seq_latex(sr.conclusion, sr.names)
    return (f"\\infer[\\textsc{{{sr.name}}}]"
            f"{{{concl}}}{{{prems}}}")


def _seq_json(seq: SeqSchema):
    return {"items": [rexpr_to_json(x) for x in seq.items],
            "slots": list(seq.slots)}


def render_synthetic(rules, format: str = "text") -> str:
    if isinstance(rules, SyntheticRule):
        rules = [rules]
    if format == "text":
        return "\n\n".join(_rule_text(r) for r in rules) + "\n"
    if format == "latex":
        return "\n".join(_rule_latex(r) for r in rules) + "\n"
    if format == "json":
        return json.dumps(
            [{"name": r.name,
              "conclusion": _seq_json(r.conclusion),
              "premises": [_seq_json(p) for p in r.premises]}
             for r in rules], indent=2) + "\n"
    raise SynthError(f"unknown format {format!r}")
