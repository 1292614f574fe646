"""Surface syntax for rule files and goals, plus text/latex/json rendering.

Rule files use `->` and `=>` for the two rewrite arrows (equal precedence,
left associative), `*` binding tighter than `+`, both right associative,
`one`/`zero` for the units, `quant x\\ e` for expression-level binders and
`x\\ t` for object-level abstractions. Uppercase identifiers are schema
variables. Term positions accept both `X+Y` and `plus(X,Y)` for object sums;
the printer emits the infix form. Comments run from `%` to end of line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import (
    Abs, App, Atom, BVar, Debt, DMapsTo, EVar, MapsTo, Nat, One, Plus, Quant,
    RExpr, RuleDef, Sum, Term, Times, UVar, VApp, Zero, ZERO, ONE, GEN,
    is_expr, mksum,
)

KEYWORDS = {"tag", "bias", "rule", "one", "zero", "quant", "sig"}

_PUNCT = [
    ("->", "ARROW"), ("=>", "DARROW"), ("(", "LPAR"), (")", "RPAR"),
    (",", "COMMA"), (".", "DOT"), (":", "COLON"), ("\\", "BSLASH"),
    ("~", "TILDE"), ("/", "SLASH"), ("=", "EQ"), ("+", "PLUS"),
    ("-", "MINUS"), ("*", "STAR"),
]


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str):
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("NAT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            toks.append(Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for lit, kind in _PUNCT:
            if text.startswith(lit, i):
                toks.append(Token(kind, lit, line, col))
                i += len(lit)
                col += len(lit)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("EOF", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Rule sets and goals


@dataclass(frozen=True)
class RuleSet:
    name: str
    tags: dict  # tag -> arity, insertion ordered
    bias: dict  # tag -> bias value
    rules: tuple  # RuleDefs in file order
    notes: str = ""

    def rule_named(self, name: str) -> RuleDef:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def without(self, name: str) -> "RuleSet":
        """Copy of this rule set minus one rule (e.g. search without a cut)."""
        self.rule_named(name)  # KeyError on typo
        kept = tuple(r for r in self.rules if r.name != name)
        return RuleSet(self.name, self.tags, self.bias, kept, self.notes)


@dataclass(frozen=True)
class GoalSpec:
    sig: tuple  # eigenvariable names, level = position
    items: tuple  # Exprs and Debts


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.next()
        if t.kind != kind:
            raise ParseError(f"expected {kind}, found {t.text!r}", t.line, t.col)
        return t

    def err(self, msg: str, t: Token = None):
        t = t or self.peek()
        raise ParseError(msg, t.line, t.col)

    # -- rule files ---------------------------------------------------------

    def parse_file(self, name: str) -> RuleSet:
        tags: dict = {}
        bias: dict = {}
        rules: list = []
        names: set = set()
        while self.peek().kind != "EOF":
            t = self.next()
            if t.kind != "IDENT":
                self.err("expected a declaration", t)
            if t.text == "tag":
                ident = self.expect("IDENT")
                self.expect("SLASH")
                arity = int(self.expect("NAT").text)
                self.expect("DOT")
                if ident.text in tags:
                    self.err(f"duplicate tag declaration {ident.text!r}", ident)
                tags[ident.text] = arity
            elif t.text == "bias":
                ident = self.expect("IDENT")
                self.expect("EQ")
                sign = self.next()
                if sign.kind not in ("PLUS", "MINUS"):
                    self.err("expected + or -", sign)
                mag = self.expect("NAT")
                if mag.text not in ("1", "2"):
                    self.err("bias magnitude must be 1 or 2", mag)
                self.expect("DOT")
                if ident.text not in tags:
                    self.err(f"bias for undeclared tag {ident.text!r}", ident)
                v = int(mag.text)
                bias[ident.text] = v if sign.kind == "PLUS" else -v
            elif t.text == "rule":
                ident = self.expect("IDENT")
                if ident.text in names:
                    self.err(f"duplicate rule name {ident.text!r}", ident)
                names.add(ident.text)
                self.expect("COLON")
                env = _Env(tags, sig=())
                body = self.parse_rexpr(env)
                self.expect("DOT")
                rules.append(RuleDef(ident.text, tuple(env.schema.items()), body))
            else:
                self.err(f"unknown declaration {t.text!r}", t)
        missing = [tg for tg in tags if tg not in bias]
        if missing:
            t = self.peek()
            raise ParseError(f"no bias declared for tags: {', '.join(missing)}",
                             t.line, t.col)
        return RuleSet(name, tags, bias, tuple(rules))

    # -- goals --------------------------------------------------------------

    def parse_goal(self, rs: RuleSet) -> GoalSpec:
        sig: list = []
        if self.peek().kind == "IDENT" and self.peek().text == "sig":
            self.next()
            while self.peek().kind == "IDENT":
                nm = self.next().text
                if nm in sig:
                    self.err(f"duplicate signature variable {nm!r}")
                sig.append(nm)
            self.expect("DOT")
        env = _Env(rs.tags, sig=tuple(sig), allow_schema=False)
        items: list = []
        while True:
            if self.peek().kind == "TILDE":
                self.next()
                at = self.parse_atomic(env)
                if not isinstance(at, Atom):
                    self.err("a debt must wrap a single atom")
                items.append(Debt(at))
            else:
                e = self.parse_rexpr(env)
                if not is_expr(e):
                    self.err("goals may not contain rewrite arrows")
                items.append(e)
            if self.peek().kind == "COMMA":
                self.next()
                continue
            break
        self.expect("EOF")
        return GoalSpec(tuple(sig), tuple(items))

    # -- expressions --------------------------------------------------------

    def parse_rexpr(self, env) -> RExpr:
        left = self.parse_sum(env)
        while self.peek().kind in ("ARROW", "DARROW"):
            op = self.next()
            right = self.parse_sum(env)
            if not is_expr(right):
                self.err("the right-hand side of an arrow must be "
                         "arrow-free", op)
            left = MapsTo(left, right) if op.kind == "ARROW" else DMapsTo(left, right)
        return left

    def parse_sum(self, env) -> RExpr:
        parts = [self.parse_prod(env)]
        while self.peek().kind == "PLUS":
            self.next()
            parts.append(self.parse_prod(env))
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = Plus(p, out)
        return out

    def parse_prod(self, env) -> RExpr:
        parts = [self.parse_atomic(env)]
        while self.peek().kind == "STAR":
            self.next()
            parts.append(self.parse_atomic(env))
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = Times(p, out)
        return out

    def parse_atomic(self, env) -> RExpr:
        t = self.next()
        if t.kind == "LPAR":
            e = self.parse_rexpr(env)
            self.expect("RPAR")
            return e
        if t.kind != "IDENT":
            self.err("expected an expression", t)
        if t.text == "one":
            return ONE
        if t.text == "zero":
            return ZERO
        if t.text == "quant":
            name = self.expect("IDENT").text
            self.expect("BSLASH")
            body = self.parse_atomic(env.bind(name))
            return Quant(body, name)
        if t.text[0].isupper():
            self.err("a schema variable cannot stand alone as an atom", t)
        tag = t.text
        if tag not in env.tags:
            self.err(f"undeclared tag {tag!r}", t)
        args: list = []
        if self.peek().kind == "LPAR":
            self.next()
            args.append(self.parse_term(env))
            while self.peek().kind == "COMMA":
                self.next()
                args.append(self.parse_term(env))
            self.expect("RPAR")
        if len(args) != env.tags[tag]:
            self.err(f"tag {tag!r} expects {env.tags[tag]} argument(s), "
                     f"got {len(args)}", t)
        return Atom(tag, tuple(args))

    # -- object terms -------------------------------------------------------

    def parse_term(self, env) -> Term:
        parts = [self.parse_term_factor(env)]
        while self.peek().kind == "PLUS":
            self.next()
            parts.append(self.parse_term_factor(env))
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = mksum(p, out)
        return out

    def parse_term_factor(self, env) -> Term:
        t = self.next()
        if t.kind == "LPAR":
            inner = self.parse_term(env)
            self.expect("RPAR")
            return inner
        if t.kind == "NAT":
            return Nat(int(t.text))
        if t.kind != "IDENT":
            self.err("expected a term", t)
        name = t.text
        if self.peek().kind == "BSLASH":
            self.next()
            body = self.parse_term(env.bind(name))
            return Abs(body, name)
        if self.peek().kind == "LPAR":
            self.next()
            args = [self.parse_term(env)]
            while self.peek().kind == "COMMA":
                self.next()
                args.append(self.parse_term(env))
            self.expect("RPAR")
            if name == "plus":
                if len(args) != 2:
                    self.err("plus/2 expects two arguments", t)
                return mksum(args[0], args[1])
            if name[0].isupper():
                return VApp(env.schema_var(name, t, self), tuple(args))
            return App(name, tuple(args))
        idx = env.bound_index(name)
        if idx is not None:
            return BVar(idx)
        if name in env.signames:
            return EVar(name, env.signames.index(name))
        if name[0].isupper():
            return env.schema_var(name, t, self)
        return App(name, ())


class _Env:
    """Name resolution while parsing one rule or goal."""

    def __init__(self, tags: dict, sig: tuple, allow_schema: bool = True):
        self.tags = tags
        self.binders: tuple = ()
        self.signames = list(sig)
        self.allow_schema = allow_schema
        self.schema: dict = {}

    def bind(self, name: str) -> "_Env":
        child = _Env.__new__(_Env)
        child.tags = self.tags
        child.binders = (name,) + self.binders
        child.signames = self.signames
        child.allow_schema = self.allow_schema
        child.schema = self.schema
        return child

    def bound_index(self, name: str):
        try:
            return self.binders.index(name)
        except ValueError:
            return None

    def schema_var(self, name: str, tok: Token, parser: _Parser) -> UVar:
        if not self.allow_schema:
            parser.err("schema variables are not allowed in goals", tok)
        if name not in self.schema:
            self.schema[name] = GEN.fresh(0, name)
        return self.schema[name]


def parse_rules(text: str, name: str = "ruleset") -> RuleSet:
    return _Parser(text).parse_file(name)


def parse_goal(text: str, ruleset: RuleSet) -> GoalSpec:
    return _Parser(text).parse_goal(ruleset)


# ---------------------------------------------------------------------------
# Rendering


def _bvar_name(names, index, hint):
    if index < len(names):
        return names[index]
    return f"_{index}"


def _uvar_name(v: UVar, uv) -> str:
    if uv and v.ref in uv:
        return uv[v.ref]
    base = v.hint if v.hint[0].isupper() else v.hint.upper()
    return f"{base}_{v.ref}"


def render_term(t: Term, names: tuple = (), uv: dict = None) -> str:
    if isinstance(t, Nat):
        return str(t.value)
    if isinstance(t, Sum):
        return f"{render_term(t.left, names, uv)}+{render_term(t.right, names, uv)}"
    if isinstance(t, BVar):
        return _bvar_name(names, t.index, "x")
    if isinstance(t, EVar):
        return t.name
    if isinstance(t, UVar):
        return _uvar_name(t, uv)
    if isinstance(t, App):
        if not t.args:
            return t.head
        return f"{t.head}({','.join(render_term(a, names, uv) for a in t.args)})"
    if isinstance(t, VApp):
        head = render_term(t.var, names, uv)
        return f"{head}({','.join(render_term(a, names, uv) for a in t.args)})"
    if isinstance(t, Abs):
        nm = t.hint
        while nm in names:
            nm += "'"
        return f"{nm}\\ {render_term(t.body, (nm,) + names, uv)}"
    raise TypeError(f"not a term: {t!r}")


# precedence levels: arrows 0, + 1, * 2, atomic 3

def render_rexpr(e: RExpr, names: tuple = (), prec: int = 0, uv: dict = None) -> str:
    if isinstance(e, Atom):
        if not e.args:
            return e.tag
        return f"{e.tag}({','.join(render_term(a, names, uv) for a in e.args)})"
    if isinstance(e, Debt):
        return "~" + render_rexpr(e.atom, names, 3, uv)
    if isinstance(e, Zero):
        return "zero"
    if isinstance(e, One):
        return "one"
    if isinstance(e, (MapsTo, DMapsTo)):
        op = "->" if isinstance(e, MapsTo) else "=>"
        s = (f"{render_rexpr(e.rule, names, 0, uv)} {op} "
             f"{render_rexpr(e.expr, names, 1, uv)}")
        return f"({s})" if prec > 0 else s
    if isinstance(e, Plus):
        s = (f"{render_rexpr(e.left, names, 2, uv)} + "
             f"{render_rexpr(e.right, names, 1, uv)}")
        return f"({s})" if prec > 1 else s
    if isinstance(e, Times):
        s = (f"{render_rexpr(e.left, names, 3, uv)} * "
             f"{render_rexpr(e.right, names, 2, uv)}")
        return f"({s})" if prec > 2 else s
    if isinstance(e, Quant):
        nm = e.hint
        while nm in names:
            nm += "'"
        if isinstance(e.body, (Atom, Zero, One, Quant)):
            body = render_rexpr(e.body, (nm,) + names, 3, uv)
        else:
            body = f"({render_rexpr(e.body, (nm,) + names, 0, uv)})"
        s = f"quant {nm}\\ {body}"
        return f"({s})" if prec > 2 else s
    raise TypeError(f"not an expression: {e!r}")


def schema_names(r: RuleDef) -> dict:
    """Map the refs of a rule's schema variables back to their names."""
    return {v.ref: n for n, v in r.schema}


def render_ruledef(r: RuleDef) -> str:
    return f"rule {r.name}: {render_rexpr(r.body, uv=schema_names(r))}."


def render_ruleset(rs: RuleSet) -> str:
    lines = []
    for tag, arity in rs.tags.items():
        lines.append(f"tag {tag}/{arity}.")
    for tag in rs.tags:
        v = rs.bias[tag]
        lines.append(f"bias {tag} = {'+' if v > 0 else '-'}{abs(v)}.")
    for r in rs.rules:
        lines.append(render_ruledef(r))
    return "\n".join(lines) + "\n"


def render_goal(g: GoalSpec) -> str:
    parts = []
    if g.sig:
        parts.append("sig " + " ".join(g.sig) + ". ")
    items = []
    for x in g.items:
        if isinstance(x, Debt):
            items.append("~" + render_rexpr(x.atom, (), 3))
        else:
            items.append(render_rexpr(x))
    return "".join(parts) + ", ".join(items)


# -- latex -----------------------------------------------------------------


def latex_term(t: Term, names: tuple = (), uv: dict = None) -> str:
    if isinstance(t, Nat):
        return str(t.value)
    if isinstance(t, Sum):
        return f"{latex_term(t.left, names, uv)}{{+}}{latex_term(t.right, names, uv)}"
    if isinstance(t, BVar):
        return _bvar_name(names, t.index, "x")
    if isinstance(t, EVar):
        return t.name
    if isinstance(t, UVar):
        if uv and t.ref in uv:
            return uv[t.ref]
        return f"{t.hint}_{{{t.ref}}}"
    if isinstance(t, App):
        if not t.args:
            return f"\\mathit{{{t.head}}}"
        inner = ",".join(latex_term(a, names, uv) for a in t.args)
        return f"\\mathit{{{t.head}}}({inner})"
    if isinstance(t, VApp):
        inner = ",".join(latex_term(a, names, uv) for a in t.args)
        return f"{latex_term(t.var, names, uv)}({inner})"
    if isinstance(t, Abs):
        nm = t.hint
        while nm in names:
            nm += "'"
        return f"\\lambda {nm}.\\,{latex_term(t.body, (nm,) + names, uv)}"
    raise TypeError(f"not a term: {t!r}")


def latex_rexpr(e: RExpr, names: tuple = (), prec: int = 0, uv: dict = None) -> str:
    if isinstance(e, Atom):
        if not e.args:
            return f"\\mathsf{{{e.tag}}}"
        inner = ",".join(latex_term(a, names, uv) for a in e.args)
        return f"\\mathsf{{{e.tag}}}({inner})"
    if isinstance(e, Debt):
        return f"\\overline{{{latex_rexpr(e.atom, names, 3, uv)}}}"
    if isinstance(e, Zero):
        return "\\mathbf{0}"
    if isinstance(e, One):
        return "\\mathbf{1}"
    if isinstance(e, (MapsTo, DMapsTo)):
        op = "\\mapsto" if isinstance(e, MapsTo) else "\\Mapsto"
        s = f"{latex_rexpr(e.rule, names, 0, uv)} {op} {latex_rexpr(e.expr, names, 1, uv)}"
        return f"({s})" if prec > 0 else s
    if isinstance(e, Plus):
        s = f"{latex_rexpr(e.left, names, 2, uv)} + {latex_rexpr(e.right, names, 1, uv)}"
        return f"({s})" if prec > 1 else s
    if isinstance(e, Times):
        s = f"{latex_rexpr(e.left, names, 3, uv)} \\times {latex_rexpr(e.right, names, 2, uv)}"
        return f"({s})" if prec > 2 else s
    if isinstance(e, Quant):
        nm = e.hint
        while nm in names:
            nm += "'"
        s = f"\\mathsf{{quant}}\\,{nm}.\\,{latex_rexpr(e.body, (nm,) + names, 3, uv)}"
        return f"({s})" if prec > 2 else s
    raise TypeError(f"not an expression: {e!r}")


# -- json ------------------------------------------------------------------


def term_to_json(t: Term):
    if isinstance(t, Nat):
        return {"k": "nat", "v": t.value}
    if isinstance(t, Sum):
        return {"k": "sum", "l": term_to_json(t.left), "r": term_to_json(t.right)}
    if isinstance(t, BVar):
        return {"k": "bvar", "i": t.index}
    if isinstance(t, EVar):
        return {"k": "evar", "name": t.name, "level": t.level}
    if isinstance(t, UVar):
        return {"k": "uvar", "ref": t.ref, "level": t.level, "hint": t.hint}
    if isinstance(t, App):
        return {"k": "app", "head": t.head,
                "args": [term_to_json(a) for a in t.args]}
    if isinstance(t, VApp):
        return {"k": "vapp", "var": term_to_json(t.var),
                "args": [term_to_json(a) for a in t.args]}
    if isinstance(t, Abs):
        return {"k": "abs", "hint": t.hint, "body": term_to_json(t.body)}
    raise TypeError(f"not a term: {t!r}")


def term_from_json(d) -> Term:
    k = d["k"]
    if k == "nat":
        return Nat(d["v"])
    if k == "sum":
        return Sum(term_from_json(d["l"]), term_from_json(d["r"]))
    if k == "bvar":
        return BVar(d["i"])
    if k == "evar":
        return EVar(d["name"], d["level"])
    if k == "uvar":
        return UVar(d["ref"], d["level"], d["hint"])
    if k == "app":
        return App(d["head"], tuple(term_from_json(a) for a in d["args"]))
    if k == "vapp":
        return VApp(term_from_json(d["var"]), tuple(term_from_json(a) for a in d["args"]))
    if k == "abs":
        return Abs(term_from_json(d["body"]), d["hint"])
    raise ValueError(f"unknown term kind {k!r}")


def rexpr_to_json(e):
    if isinstance(e, Atom):
        return {"k": "atom", "tag": e.tag, "args": [term_to_json(a) for a in e.args]}
    if isinstance(e, Debt):
        return {"k": "debt", "atom": rexpr_to_json(e.atom)}
    if isinstance(e, Zero):
        return {"k": "zero"}
    if isinstance(e, One):
        return {"k": "one"}
    if isinstance(e, Plus):
        return {"k": "plus", "l": rexpr_to_json(e.left), "r": rexpr_to_json(e.right)}
    if isinstance(e, Times):
        return {"k": "times", "l": rexpr_to_json(e.left), "r": rexpr_to_json(e.right)}
    if isinstance(e, Quant):
        return {"k": "quant", "hint": e.hint, "body": rexpr_to_json(e.body)}
    if isinstance(e, MapsTo):
        return {"k": "mapsto", "rule": rexpr_to_json(e.rule), "expr": rexpr_to_json(e.expr)}
    if isinstance(e, DMapsTo):
        return {"k": "dmapsto", "rule": rexpr_to_json(e.rule), "expr": rexpr_to_json(e.expr)}
    raise TypeError(f"not an expression: {e!r}")


def rexpr_from_json(d):
    k = d["k"]
    if k == "atom":
        return Atom(d["tag"], tuple(term_from_json(a) for a in d["args"]))
    if k == "debt":
        return Debt(rexpr_from_json(d["atom"]))
    if k == "zero":
        return ZERO
    if k == "one":
        return ONE
    if k == "plus":
        return Plus(rexpr_from_json(d["l"]), rexpr_from_json(d["r"]))
    if k == "times":
        return Times(rexpr_from_json(d["l"]), rexpr_from_json(d["r"]))
    if k == "quant":
        return Quant(rexpr_from_json(d["body"]), d["hint"])
    if k == "mapsto":
        return MapsTo(rexpr_from_json(d["rule"]), rexpr_from_json(d["expr"]))
    if k == "dmapsto":
        return DMapsTo(rexpr_from_json(d["rule"]), rexpr_from_json(d["expr"]))
    raise ValueError(f"unknown expression kind {k!r}")


def render(value, format: str = "text") -> str:
    """Render an expression, rule, rule set, goal, or proof tree."""
    if format not in ("text", "latex", "json"):
        raise ValueError(f"unknown format {format!r}")
    if hasattr(value, "premises") and hasattr(value, "seq"):
        from . import proofs  # local import so proofs can import dsl
        if format == "json":
            return proofs.proof_to_json(value)
        if format == "latex":
            return proofs.proof_to_latex(value)
        return proofs.proof_to_text(value)
    if isinstance(value, GoalSpec):
        if format == "json":
            return json.dumps(
                {"sig": list(value.sig),
                 "items": [rexpr_to_json(x) for x in value.items]},
                sort_keys=True)
        if format == "latex":
            return ", ".join(latex_rexpr(x) for x in value.items)
        return render_goal(value)
    if isinstance(value, RuleDef):
        uv = schema_names(value)
        if format == "json":
            return json.dumps(
                {"name": value.name, "schema": [n for n, _ in value.schema],
                 "body": rexpr_to_json(value.body)},
                sort_keys=True)
        if format == "latex":
            return latex_rexpr(value.body, uv=uv)
        return render_ruledef(value)
    if isinstance(value, RuleSet):
        if format == "json":
            return json.dumps(
                {"name": value.name, "tags": value.tags, "bias": value.bias,
                 "rules": [{"name": r.name, "body": rexpr_to_json(r.body)}
                           for r in value.rules]},
                sort_keys=True)
        if format == "latex":
            return "\\\\\n".join(
                latex_rexpr(r.body, uv=schema_names(r)) for r in value.rules)
        return render_ruleset(value)
    if format == "json":
        return json.dumps(rexpr_to_json(value), sort_keys=True)
    if format == "latex":
        return latex_rexpr(value)
    return render_rexpr(value)
