"""Readers and printers for ``.onto`` ontologies, ``.sas`` systems and formulas.

Ontology files are line oriented. A bare ``X <= Y`` is a role inclusion when
either side is known to be a role (used with ``-``, under ``exists``, in a
binary assertion, or declared with a ``role`` line) and a concept inclusion
otherwise. System files are a token stream of ``vars``, ``consts``, ``init``
and ``transition`` statements, so a transition may span several lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .errors import ParseError
from .logic import (
    FALSE,
    TRUE,
    Concept,
    Constraint,
    Eq,
    Formula,
    Ind,
    Lit,
    Role,
    Signature,
    Term,
    Var,
    conj,
    disj,
    neg,
)
from .ontology import (
    ConceptAssertion,
    ConceptInclusion,
    Conj,
    EqualityAssertion,
    Exists,
    Ontology,
    RoleAssertion,
    RoleExpr,
    RoleInclusion,
    SourceSpan,
)
from .sas import ArtifactSystem, CaseFunction, OPartition, Transition, identity_updates

TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<op><=|==>|:=|->|!=|=|&|\||!|\(|\)|,|\{|\}|:|\.|-|;)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>[0-9]+)
    """,
    re.VERBOSE,
)

KEYWORDS = {"not", "exists", "true", "false", "vars", "consts", "init", "transition", "params", "guard", "case"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, source: str = "<input>") -> list[Token]:
    out: list[Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col, source)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            out.append(Token("nl", s, line, col))
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Stream:
    def __init__(self, toks: Sequence[Token], source: str):
        self.toks = list(toks)
        self.i = 0
        self.source = source

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def at(self, *texts: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "name") and t.text in texts

    def accept(self, *texts: str) -> Optional[Token]:
        if self.at(*texts):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return self.next()

    def name(self, what: str = "name") -> Token:
        t = self.peek()
        if t.kind != "name" or t.text in KEYWORDS:
            self.fail(f"expected {what}, found {t.text or 'end of input'!r}", t)
        return self.next()

    def fail(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col, self.source)

    def span(self, tok: Token) -> SourceSpan:
        last = self.toks[max(self.i - 1, 0)]
        return SourceSpan(self.source, tok.line, tok.col, last.line, last.col + len(last.text))


# --- formulas ------------------------------------------------------------------------


TermResolver = Callable[[Token], Term]


def _default_resolver(variables: Optional[Iterable[str]], individuals: Optional[Iterable[str]]) -> TermResolver:
    vs = set(variables) if variables is not None else None
    inds = set(individuals) if individuals is not None else None

    def resolve(tok: Token) -> Term:
        if vs is not None:
            return Var(tok.text) if tok.text in vs else Ind(tok.text)
        if inds is not None:
            return Ind(tok.text) if tok.text in inds else Var(tok.text)
        return Var(tok.text)

    return resolve


def _term(st: _Stream, resolve: TermResolver) -> Term:
    return resolve(st.name("term"))


def _atom(st: _Stream, resolve: TermResolver) -> Formula:
    """``NAME(t)``, ``NAME(t, t)``, ``t = t`` or ``t != t``."""
    if st.peek(1).kind == "op" and st.peek(1).text == "(":
        pred = st.name("predicate")
        st.expect("(")
        a = _term(st, resolve)
        if st.accept(","):
            b = _term(st, resolve)
            st.expect(")")
            return Role(pred.text, a, b)
        st.expect(")")
        return Concept(pred.text, a)
    left = _term(st, resolve)
    if st.accept("="):
        return Eq(left, _term(st, resolve))
    if st.accept("!="):
        return neg(Eq(left, _term(st, resolve)))
    st.fail("expected an atom")


def _formula(st: _Stream, resolve: TermResolver) -> Formula:
    parts = [_conjunction(st, resolve)]
    while st.accept("|"):
        parts.append(_conjunction(st, resolve))
    return disj(*parts) if len(parts) > 1 else parts[0]


def _conjunction(st: _Stream, resolve: TermResolver) -> Formula:
    parts = [_unary(st, resolve)]
    while st.accept("&"):
        parts.append(_unary(st, resolve))
    return conj(*parts) if len(parts) > 1 else parts[0]


def _unary(st: _Stream, resolve: TermResolver) -> Formula:
    if st.accept("!", "not"):
        return neg(_unary(st, resolve))
    if st.accept("("):
        f = _formula(st, resolve)
        st.expect(")")
        return f
    if st.accept("true"):
        return TRUE
    if st.accept("false"):
        return FALSE
    return _atom(st, resolve)


def parse_formula(
    text: str,
    variables: Optional[Iterable[str]] = None,
    individuals: Optional[Iterable[str]] = None,
    source: str = "<formula>",
) -> Formula:
    """Quantifier-free formula; names in ``variables`` (or not in ``individuals``) are variables."""
    st = _Stream([t for t in tokenize(text, source) if t.kind != "nl"], source)
    f = _formula(st, _default_resolver(variables, individuals))
    if st.peek().kind != "eof":
        st.fail(f"unexpected {st.peek().text!r}")
    return f


def _literal(st: _Stream, resolve: TermResolver) -> Lit:
    positive = not st.accept("!", "not")
    a = _atom(st, resolve)
    if isinstance(a, (Concept, Role, Eq)):
        return Lit(a, positive)
    return Lit(a.arg, not positive)  # t != t


# --- ontologies ------------------------------------------------------------------------


def _split_lines(toks: list[Token]) -> list[list[Token]]:
    lines: list[list[Token]] = [[]]
    for t in toks:
        if t.kind == "nl":
            lines.append([])
        elif t.kind != "eof":
            lines[-1].append(t)
    return [l for l in lines if l]


def _scan_roles(lines: list[list[Token]]) -> tuple[set[str], set[str]]:
    """Names that must be roles / concepts, judged from unambiguous uses."""
    roles, concepts = set(), set()
    for toks in lines:
        texts = [t.text for t in toks]
        if texts[0] == "role":
            roles.update(t.text for t in toks[1:] if t.kind == "name")
        elif texts[0] == "concept":
            concepts.update(t.text for t in toks[1:] if t.kind == "name")
        for k, t in enumerate(toks):
            if t.kind != "name":
                continue
            nxt = toks[k + 1].text if k + 1 < len(toks) else ""
            prev = toks[k - 1].text if k > 0 else ""
            if prev == "exists" or (nxt == "-" and t.text not in KEYWORDS):
                roles.add(t.text)
            if nxt == "(":
                arity = 2 if "," in texts[k:] else 1
                (roles if arity == 2 else concepts).add(t.text)
    return roles, concepts


def parse_onto(text: str, source: str = "<onto>") -> Ontology:
    lines = _split_lines(tokenize(text, source))
    roles, concepts = _scan_roles(lines)
    tbox, abox = [], []
    declared_c, declared_r, declared_i = set(), set(), set()
    for toks in lines:
        st = _Stream(toks + [Token("eof", "", toks[-1].line, toks[-1].col + len(toks[-1].text))], source)
        first = st.peek()
        if first.text in ("concept", "role", "individual") and st.peek(1).kind == "name":
            st.next()
            names = [st.name().text]
            while st.accept(","):
                names.append(st.name().text)
            {"concept": declared_c, "role": declared_r, "individual": declared_i}[first.text].update(names)
        elif any(t.text == "<=" for t in toks):
            tbox.append(_tbox_line(st, roles))
        else:
            abox.append(_abox_line(st))
        if st.peek().kind != "eof":
            st.fail(f"unexpected {st.peek().text!r}")
    return Ontology(tuple(tbox), tuple(abox), Signature(frozenset(declared_c), frozenset(declared_r), frozenset(declared_i)))


def _role_expr(st: _Stream) -> RoleExpr:
    n = st.name("role")
    return RoleExpr(n.text, bool(st.accept("-")))


def _tbox_line(st: _Stream, roles: set[str]):
    start = st.peek()
    if st.accept("exists"):
        r = _role_expr(st)
        filler = st.name("concept").text if st.accept(".") else None
        lhs = Exists(r, filler)
    elif st.peek(1).text == "-" or start.text in roles:
        lhs = _role_expr(st)
    else:
        names = [st.name("concept").text]
        while st.accept("&"):
            names.append(st.name("concept").text)
        lhs = Conj(tuple(names))
    st.expect("<=")
    negated = bool(st.accept("not", "!"))
    if isinstance(lhs, RoleExpr) or (st.peek().text in roles) or st.peek(1).text == "-":
        if not isinstance(lhs, RoleExpr):
            if isinstance(lhs, Conj) and len(lhs.names) == 1:
                lhs = RoleExpr(lhs.names[0])
            else:
                st.fail("role inclusion needs a role on the left", start)
        rhs = _role_expr(st)
        return RoleInclusion(lhs, rhs, negated, st.span(start))
    if st.at("exists"):
        st.fail("rhs must be a concept name")
    rhs = st.name("concept").text
    return ConceptInclusion(lhs, rhs, negated, st.span(start))


def _abox_line(st: _Stream):
    start = st.peek()
    positive = not st.accept("not", "!")
    if st.peek(1).text == "(":
        pred = st.name("predicate").text
        st.expect("(")
        a = st.name("individual").text
        if st.accept(","):
            b = st.name("individual").text
            st.expect(")")
            return RoleAssertion(pred, a, b, positive, st.span(start))
        st.expect(")")
        return ConceptAssertion(pred, a, positive, st.span(start))
    a = st.name("individual").text
    if st.accept("="):
        eq = True
    elif st.accept("!="):
        eq = False
    else:
        st.fail("expected an assertion")
    b = st.name("individual").text
    return EqualityAssertion(a, b, eq == positive, st.span(start))


def print_onto(O: Ontology) -> str:
    out = []
    for kind, names in (
        ("concept", O.declared.concepts),
        ("role", O.declared.roles),
        ("individual", O.declared.individuals),
    ):
        if names:
            out.append(f"{kind} " + ", ".join(sorted(names)))
    # a role inclusion between plain names needs its roles declared to read back
    ri_names = sorted({r.name for ax in O.role_inclusions for r in (ax.lhs, ax.rhs)} - set(O.declared.roles))
    if ri_names:
        out.append("role " + ", ".join(ri_names))
    out.extend(str(ax) for ax in O.tbox)
    out.extend(str(a) for a in O.abox)
    return "\n".join(out) + "\n"


# --- artifact systems --------------------------------------------------------------------


def parse_sas(text: str, ontology: Optional[Ontology] = None, source: str = "<sas>") -> ArtifactSystem:
    """Read a system; with an ontology, undeclared predicates and constants are errors."""
    st = _Stream([t for t in tokenize(text, source) if t.kind != "nl"], source)
    onto = ontology or Ontology()
    sig = onto.signature()
    vars_: list[str] = []
    consts: list[str] = []
    init: dict[str, tuple[str, Token]] = {}
    raw_transitions = []
    while st.peek().kind != "eof":
        if st.accept(";"):
            continue
        kw = st.peek()
        if st.accept("vars"):
            vars_.extend(_name_list(st))
        elif st.accept("consts"):
            consts.extend(_name_list(st))
        elif st.accept("init"):
            while True:
                x = st.name("variable")
                st.expect(":=")
                a = st.name("individual")
                if x.text in init:
                    st.fail(f"{x.text} initialised twice", x)
                init[x.text] = (a.text, a)
                if not st.accept(","):
                    break
        elif st.accept("transition"):
            raw_transitions.append(_transition_tokens(st, kw))
        else:
            st.fail(f"expected a statement, found {kw.text!r}")
    var_set = set(vars_)
    if len(var_set) != len(vars_):
        st.fail("duplicate artifact variable", st.toks[0])
    known_inds = set(sig.individuals) | set(consts) | {a for a, _ in init.values()}
    for x in vars_:
        if x not in init:
            st.fail(f"variable {x} has no initial value", st.toks[0])
    for x, (a, tok) in init.items():
        if x not in var_set:
            st.fail(f"{x} is not an artifact variable", tok)
    transitions = []
    for name, params, start, body in raw_transitions:
        transitions.append(_build_transition(name, params, start, body, vars_, known_inds, sig, ontology is not None, source))
    S = ArtifactSystem(
        onto,
        tuple(Var(x) for x in vars_),
        tuple((Var(x), Ind(init[x][0])) for x in vars_),
        tuple(transitions),
        tuple(consts),
    )
    return S


def _name_list(st: _Stream) -> list[str]:
    names = [st.name().text]
    while st.accept(","):
        names.append(st.name().text)
    return names


def _transition_tokens(st: _Stream, start: Token):
    parts = [st.name("transition name").text]
    while st.at(".") and st.peek(1).kind in ("num", "name"):
        st.next()
        parts.append(st.next().text)
    name = ".".join(parts)
    params: list[str] = []
    if st.accept("params"):
        params = _name_list(st)
    st.expect(":")
    body_start = st.i
    depth = 0
    while st.peek().kind != "eof":
        t = st.peek()
        if t.kind == "name" and t.text == "transition" and depth == 0:
            break
        if t.kind == "name" and t.text in ("vars", "consts", "init") and depth == 0:
            break
        if t.text == "{":
            depth += 1
        elif t.text == "}":
            depth -= 1
        if t.text == ";" and depth == 0:
            break
        st.next()
    body = st.toks[body_start : st.i] + [Token("eof", "", st.peek().line, st.peek().col)]
    return name, params, start, body


def _build_transition(name, params, start, body, vars_, known_inds, sig, strict, source) -> Transition:
    st = _Stream(body, source)
    scope = set(vars_) | set(params)
    for p in params:
        if p in vars_:
            st.fail(f"parameter {p} shadows an artifact variable", start)

    def resolve(tok: Token) -> Term:
        if tok.text in scope:
            return Var(tok.text)
        if strict and tok.text not in known_inds:
            st.fail(f"undeclared individual {tok.text!r}", tok)
        return Ind(tok.text)

    def check_pred(l: Lit, tok: Token) -> None:
        if not strict:
            return
        a = l.atom
        if isinstance(a, Concept) and a.pred not in sig.concepts:
            st.fail(f"unknown concept {a.pred!r}", tok)
        if isinstance(a, Role) and a.pred not in sig.roles:
            st.fail(f"unknown role {a.pred!r}", tok)

    def lit() -> Lit:
        tok = st.peek()
        l = _literal(st, resolve)
        check_pred(l, tok)
        return l

    st.expect("guard")
    guard: list[Lit] = []
    if not st.accept("true"):
        guard.append(lit())
        while st.accept("&"):
            guard.append(lit())
    st.expect("==>")
    updates: dict[Var, object] = {}
    counter = 0
    if st.peek().kind != "eof":
        while True:
            xt = st.name("artifact variable")
            if xt.text not in vars_:
                st.fail(f"{xt.text} is not an artifact variable", xt)
            x = Var(xt.text)
            if x in updates:
                st.fail(f"{xt.text} updated twice", xt)
            st.expect(":=")
            if st.accept("case"):
                st.expect("{")
                branches = []
                while True:
                    l = lit()
                    st.expect("->")
                    if st.at("case"):
                        st.fail("nested case functions are not supported")
                    branches.append((l, _term(st, resolve)))
                    if not st.accept("|"):
                        break
                st.expect("}")
                counter += 1
                updates[x] = CaseFunction(
                    f"F_{name}_{counter}", OPartition(tuple(l for l, _ in branches)), tuple(t for _, t in branches)
                )
            else:
                updates[x] = _term(st, resolve)
            if not st.accept(","):
                break
    if st.peek().kind != "eof":
        st.fail(f"unexpected {st.peek().text!r}")
    return Transition(
        name,
        tuple(Var(p) for p in params),
        Constraint(tuple(guard)),
        identity_updates([Var(x) for x in vars_], updates),
        SourceSpan(source, start.line, start.col),
    )


def print_sas(S: ArtifactSystem) -> str:
    out = ["vars " + ", ".join(x.name for x in S.vars)]
    if S.consts:
        out.append("consts " + ", ".join(S.consts))
    out.append("init " + ", ".join(f"{x.name} := {a.name}" for x, a in S.init))
    for t in S.transitions:
        head = f"transition {t.name}"
        if t.params:
            head += " params " + ", ".join(p.name for p in t.params)
        guard = " & ".join(str(l) for l in t.guard) if len(t.guard) else "true"
        ups = []
        for x, u in t.updates:
            if u == x:
                continue
            if isinstance(u, CaseFunction):
                ups.append(f"{x.name} := case {{ " + " | ".join(f"{str(l)} -> {term}" for l, term in u.branches) + " }")
            else:
                ups.append(f"{x.name} := {u}")
        out.append(f"{head} : guard {guard} ==> " + ", ".join(ups))
    return "\n".join(out) + "\n"
