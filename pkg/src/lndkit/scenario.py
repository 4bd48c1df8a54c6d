"""Line-oriented scenario files: declarations followed by named checks.

Grammar (one statement per line, ``#`` starts a comment)::

    vars NAME x, y, ... [params a, ...]
    scheme NAME vars (TABLE | x, y, ...) [params a, ...] [rel EXPR]...
           [invert x, ...] [roots_of_unity eps M]
    invert SCHEME x, ...
    roots_of_unity SCHEME eps M
    localize NAME from SCHEME at EXPR [partner w]
    derivation NAME on SCHEME images x:EXPR, ...
    morphism NAME from SOURCE to TARGET images x:EXPR, ...
    cover NAME on SCHEME charts EXPR, ... [glue EXPR]
    transition COVER I J EXPR
    check KIND ARGS...

``EXPR`` is a double-quoted polynomial, or a bare token without spaces.
A trailing backslash continues a statement on the next line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from . import constructions as C
from .cech import CoverDatum, coboundary_report, cocycle_check
from .ideal import budget, ideals_equal
from .lnd import (
    Derivation,
    check_action_axioms,
    check_equivariant,
    compare_radical,
    exp_action,
    fixed_locus,
    in_span,
    invariant_division,
    is_invariant,
    is_locally_nilpotent,
    kernel_search,
    make_derivation,
    nilpotency_degree,
)
from .modification import ModificationData, affine_modification, verify_modification_is_Y
from .polyring import ParseError, Poly, PolyError, VarTable
from .report import CheckFailed, Report, reporting
from .scheme import (
    Morphism,
    Scheme,
    SchemeError,
    is_isomorphism,
    make_morphism,
    make_scheme,
    smoothness_check,
)


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, path: str = "<scenario>"):
        self.line, self.col, self.path = line, col, path
        super().__init__(f"{path}:{line}:{col}: {message}")


_TOKEN = re.compile(r'\s*(?:(?P<str>"[^"\n]*")|(?P<punct>[:,=])|(?P<word>[^\s",:=#]+)|(?P<comment>#.*)|(?P<bad>"))')


@dataclass
class Token:
    kind: str  # word | str | punct
    text: str
    col: int
    poly: Optional[Poly] = None

    @property
    def value(self) -> str:
        return self.text[1:-1] if self.kind == "str" else self.text


@dataclass
class Statement:
    line: int
    tokens: List[Token]
    comment: str = ""


@dataclass
class CheckSpec:
    kind: str
    line: int
    label: str
    run: Callable[[], Report] = field(repr=False, default=None)


class _Deferred:
    """Placeholder for a declaration whose construction already failed."""

    def __init__(self, exc: Exception):
        self.exc = exc


@dataclass
class Scenario:
    source: str
    path: str
    objects: Dict[str, Any]
    declarations: List[Tuple[str, str]]
    checks: List[CheckSpec]
    statements: List[Statement]


# ---------------------------------------------------------------------------
# Lexing
# ---------------------------------------------------------------------------


def _logical_lines(src: str):
    """Yield ``(line_number, text)`` joining backslash continuations."""
    buf, start = "", 0
    for no, raw in enumerate(src.splitlines(), 1):
        text = raw
        if not buf:
            start = no
        if text.rstrip().endswith("\\"):
            buf += text.rstrip()[:-1] + " "
            continue
        buf += text
        yield start, buf
        buf = ""
    if buf:
        yield start, buf


def _tokenize(text: str, line: int, path: str) -> Tuple[List[Token], str]:
    toks, pos, comment = [], 0, ""
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.lastgroup is None:
            break
        kind = m.lastgroup
        if kind == "bad":
            raise ScenarioError("unterminated string", line, m.start(kind) + 1, path)
        if kind == "comment":
            comment = m.group(kind)
            break
        toks.append(Token(kind, m.group(kind), m.start(kind) + 1))
        pos = m.end()
    return toks, comment


class _Cursor:
    def __init__(self, st: Statement, path: str):
        self.st, self.path, self.i = st, path, 0

    def error(self, msg: str, tok: Token = None) -> ScenarioError:
        tok = tok or self.peek()
        col = tok.col if tok else (self.st.tokens[-1].col + len(self.st.tokens[-1].text) if self.st.tokens else 1)
        return ScenarioError(msg, self.st.line, col, self.path)

    def peek(self) -> Optional[Token]:
        return self.st.tokens[self.i] if self.i < len(self.st.tokens) else None

    def done(self) -> bool:
        return self.i >= len(self.st.tokens)

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of statement")
        self.i += 1
        return tok

    def word(self, what: str = "name") -> Token:
        tok = self.take()
        if tok.kind != "word":
            raise self.error(f"expected {what}", tok)
        return tok

    def keyword(self, kw: str) -> None:
        tok = self.take()
        if tok.kind != "word" or tok.text != kw:
            raise self.error(f"expected '{kw}'", tok)

    def accept(self, kw: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "word" and tok.text == kw:
            self.i += 1
            return True
        return False

    def punct(self, p: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "punct" and tok.text == p:
            self.i += 1
            return True
        return False

    def integer(self) -> int:
        tok = self.word("integer")
        if not tok.text.lstrip("-").isdigit():
            raise self.error("expected integer", tok)
        return int(tok.text)

    def expr(self, vars: VarTable) -> Poly:
        tok = self.take()
        if tok.kind == "punct":
            raise self.error("expected expression", tok)
        try:
            tok.poly = vars.parse(tok.value)
        except ParseError as exc:
            off = 1 if tok.kind == "str" else 0
            raise ScenarioError(str(exc), self.st.line, tok.col + off + max(exc.pos, 0), self.path) from None
        return tok.poly

    def expr_text(self, vars: VarTable) -> Tuple[Poly, str]:
        """An expression together with its source spelling, for labels."""
        tok = self.peek()
        p = self.expr(vars)
        return p, re.sub(r"\s+", "", tok.value)

    def names(self) -> List[str]:
        out = [self.word().text]
        while self.punct(","):
            out.append(self.word().text)
        return out

    def exprs(self, vars: VarTable) -> List[Poly]:
        out = [self.expr(vars)]
        while self.punct(","):
            out.append(self.expr(vars))
        return out

    def mapping(self, vars: VarTable, keys: VarTable, keys_name: str) -> Dict[str, Poly]:
        out = {}
        while True:
            key = self.word("variable")
            if key.text not in keys:
                raise self.error(f"{key.text!r} is not a variable of {keys_name}", key)
            if not self.punct(":"):
                raise self.error("expected ':'")
            if key.text in out:
                raise self.error(f"duplicate image for {key.text!r}", key)
            out[key.text] = self.expr(vars)
            if not self.punct(","):
                return out

    def end(self) -> None:
        if not self.done():
            raise self.error(f"unexpected token {self.peek().text!r}")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _Builder:
    def __init__(self, path: str, degree_bound: int):
        self.path = path
        self.degree_bound = degree_bound
        self.objects: Dict[str, Any] = {}
        self.kinds: Dict[str, str] = {}
        self.used: set = set()
        self.declarations: List[Tuple[str, str]] = []
        self.checks: List[CheckSpec] = []

    def declare(self, cur: _Cursor, tok: Token, kind: str, obj) -> None:
        if tok.text in self.objects:
            raise cur.error(f"duplicate name {tok.text!r}", tok)
        self.objects[tok.text] = obj
        self.kinds[tok.text] = kind
        self.declarations.append((kind, tok.text))

    def ref(self, cur: _Cursor, kind: str, tok: Token = None):
        tok = tok or cur.word(f"{kind} name")
        if tok.text not in self.objects:
            raise cur.error(f"undeclared {kind} {tok.text!r}", tok)
        if kind != "any" and self.kinds[tok.text] != kind:
            raise cur.error(f"{tok.text!r} is a {self.kinds[tok.text]}, not a {kind}", tok)
        self.used.add(tok.text)
        return self.objects[tok.text]

    def deferred(self, build: Callable[[], Any]):
        try:
            return build()
        except CheckFailed as exc:
            return _Deferred(exc)
        except (SchemeError, PolyError, ValueError) as exc:
            return _Deferred(exc)

    # -- statements ----------------------------------------------------------
    def statement(self, st: Statement) -> None:
        cur = _Cursor(st, self.path)
        head = cur.word("statement keyword")
        fn = getattr(self, f"st_{head.text}", None)
        if fn is None:
            raise cur.error(f"unknown statement {head.text!r}", head)
        fn(cur)
        cur.end()

    def st_vars(self, cur: _Cursor) -> None:
        name = cur.word()
        names = cur.names()
        params = cur.names() if cur.accept("params") else []
        try:
            table = VarTable(tuple(names) + tuple(p for p in params if p not in names), frozenset(params))
        except PolyError as exc:
            raise cur.error(str(exc), name) from None
        self.declare(cur, name, "vars", table)

    def st_scheme(self, cur: _Cursor) -> None:
        name = cur.word()
        cur.keyword("vars")
        names = cur.names()
        params: List[str] = []
        if len(names) == 1 and self.kinds.get(names[0]) == "vars":
            table = self.objects[names[0]]
            names, params = [n for n in table.names if n not in table.params], sorted(table.params)
        rels, invert, rou = [], [], None
        table = None
        while not cur.done():
            kw = cur.word("scheme clause")
            if kw.text == "params":
                params += cur.names()
            elif kw.text == "rel":
                rels.append(cur.take())
            elif kw.text == "invert":
                invert += cur.names()
            elif kw.text == "roots_of_unity":
                rou = (cur.word().text, cur.integer())
            else:
                raise cur.error(f"unknown scheme clause {kw.text!r}", kw)
        try:
            X = make_scheme(names + [p for p in params if p not in names], [], invert, rou, params, name.text)
        except (SchemeError, PolyError) as exc:
            raise cur.error(str(exc), name) from None
        polys = []
        for tok in rels:
            sub = _Cursor(Statement(cur.st.line, [tok]), self.path)
            polys.append(sub.expr(X.vars))
        self.declare(cur, name, "scheme", X.with_relations(polys, name.text))

    def _rebuild(self, cur: _Cursor, tok: Token, X: Scheme) -> None:
        if tok.text in self.used:
            raise cur.error(f"scheme {tok.text!r} is already in use; modify it before referring to it", tok)
        self.objects[tok.text] = X

    def st_invert(self, cur: _Cursor) -> None:
        tok = cur.word()
        was_used = tok.text in self.used
        X = self.ref(cur, "scheme", tok)
        if not was_used:
            self.used.discard(tok.text)
        for n in cur.names():
            if n not in X.vars:
                raise cur.error(f"{n!r} is not a variable of {tok.text}")
            X = X.localize(n)
        self._rebuild(cur, tok, X)

    def st_roots_of_unity(self, cur: _Cursor) -> None:
        tok = cur.word()
        was_used = tok.text in self.used
        X = self.ref(cur, "scheme", tok)
        if not was_used:
            self.used.discard(tok.text)
        eps, m = cur.word().text, cur.integer()
        if X.roots_of_unity:
            raise cur.error(f"{tok.text} already has a root of unity", tok)
        if m < 1:
            raise cur.error("root of unity order must be positive")
        vars = X.vars.extend([eps], [eps])
        Y = Scheme(vars, X.relations, X.localizations, (eps, m), X.name)
        self._rebuild(cur, tok, Y)

    def st_localize(self, cur: _Cursor) -> None:
        name = cur.word()
        cur.keyword("from")
        X = self.ref(cur, "scheme")
        cur.keyword("at")
        f = cur.expr(X.vars)
        partner = cur.word().text if cur.accept("partner") else None
        try:
            Y = X.localize(f, partner, name.text)
        except (SchemeError, PolyError) as exc:
            raise cur.error(str(exc), name) from None
        self.declare(cur, name, "scheme", Y)

    def st_derivation(self, cur: _Cursor) -> None:
        name = cur.word()
        cur.keyword("on")
        X = self.ref(cur, "scheme")
        cur.keyword("images")
        images = cur.mapping(X.vars, X.vars, X.name)
        self.declare(cur, name, "derivation",
                     self.deferred(lambda: make_derivation(X, images, name.text, check=False)))

    def st_morphism(self, cur: _Cursor) -> None:
        name = cur.word()
        cur.keyword("from")
        src = self.ref(cur, "scheme")
        cur.keyword("to")
        tgt = self.ref(cur, "scheme")
        cur.keyword("images")
        images = cur.mapping(src.vars, tgt.vars, tgt.name)
        self.declare(cur, name, "morphism",
                     self.deferred(lambda: make_morphism(src, tgt, images, name.text, check=False)))

    def st_cover(self, cur: _Cursor) -> None:
        name = cur.word()
        cur.keyword("on")
        X = self.ref(cur, "scheme")
        cur.keyword("charts")
        elems = cur.exprs(X.vars)
        glue = cur.expr(X.vars) if cur.accept("glue") else None
        self.declare(cur, name, "cover", CoverDatum(X, elems, glue=glue, name=name.text))

    def st_transition(self, cur: _Cursor) -> None:
        tok = cur.word()
        c: CoverDatum = self.ref(cur, "cover", tok)
        i, j = cur.integer(), cur.integer()
        if not (0 <= i < len(c) and 0 <= j < len(c)) or i == j:
            raise cur.error(f"chart indices must be distinct and below {len(c)}")
        if (i, j) in c.transitions:
            raise cur.error(f"transition ({i},{j}) already given")
        g = cur.expr(c.overlap(i, j).vars)
        c.set_transition(i, j, g)

    def st_check(self, cur: _Cursor) -> None:
        kind = cur.word("check kind")
        fn = getattr(self, f"ck_{kind.text}", None)
        if fn is None:
            raise cur.error(f"unknown check kind {kind.text!r}", kind)
        label, run = fn(cur)
        self.checks.append(CheckSpec(kind.text, cur.st.line, label, run))

    # -- checks ----------------------------------------------------------------
    def _obj(self, cur, kind):
        tok = cur.word(f"{kind} name")
        obj = self.ref(cur, kind, tok)
        return tok.text, obj

    def _options(self, cur: _Cursor, spec: Dict[str, str], vars: VarTable = None) -> Dict[str, Any]:
        """Trailing ``key value`` options; spec maps key to int|expr|exprs|word|words."""
        out: Dict[str, Any] = {}
        while not cur.done():
            kw = cur.word("option")
            kind = spec.get(kw.text)
            if kind is None:
                raise cur.error(f"unknown option {kw.text!r}", kw)
            if kw.text in out:
                raise cur.error(f"option {kw.text!r} given twice", kw)
            if kind == "int":
                out[kw.text] = cur.integer()
            elif kind == "expr":
                out[kw.text] = cur.expr(vars)
            elif kind == "exprs":
                out[kw.text] = cur.exprs(vars)
            elif kind == "words":
                out[kw.text] = cur.names()
            elif kind == "flag":
                out[kw.text] = True
            else:
                out[kw.text] = cur.word().text
        return out

    def ck_smooth(self, cur):
        n, X = self._obj(cur, "scheme")
        o = self._options(cur, {"codim": "int"})
        return f"smooth({n})", lambda: smoothness_check(X, o.get("codim"), name=f"smooth({n})")

    def ck_defined(self, cur):
        n, obj = self._obj(cur, "any")
        label = f"defined({n})"

        def run():
            with reporting(label) as rep:
                o = _live(obj)
                if isinstance(o, (Derivation, Morphism)):
                    o.check_well_defined()
                    rep.witnesses["certificate"] = o.certificates()
                    rep.check("well_defined", True)
                else:
                    raise SchemeError(f"{n} is not a derivation or morphism")
            return rep

        return label, run

    def ck_lnd(self, cur):
        n, d = self._obj(cur, "derivation")
        o = self._options(cur, {"cap": "int"})
        label = f"lnd({n})"

        def run():
            with reporting(label) as rep:
                dd = _certified(d)
                rep.check("well_defined", True)
                rep.absorb("nilpotent", is_locally_nilpotent(dd, o.get("cap", 32)))
            return rep

        return label, run

    def ck_action(self, cur):
        n, d = self._obj(cur, "derivation")
        o = self._options(cur, {"cap": "int"})
        label = f"action({n})"

        def run():
            with reporting(label) as rep:
                a = exp_action(_certified(d), o.get("cap", 32))
                rep.witnesses["coaction"] = a.images
                rep.absorb("axioms", check_action_axioms(a))
            return rep

        return label, run

    def ck_kernel(self, cur):
        n, d = self._obj(cur, "derivation")
        vars = _live_vars(d)
        o = self._options(cur, {"bound": "int", "base": "int", "contains": "exprs", "equals": "exprs"}, vars)
        bound = o.get("bound", self.degree_bound)
        label = f"kernel({n},bound={bound})"

        def run():
            with reporting(label) as rep:
                dd = _certified(d)
                X = dd.scheme
                found = kernel_search(dd, bound, o.get("base"))
                rep.witnesses["basis"] = found
                rep.witnesses["dimension"] = len(found)
                for p in o.get("contains", []):
                    rep.check(f"contains[{p}]", in_span(p, found, X), element=p)
                if "equals" in o:
                    want = o["equals"]
                    ok = all(in_span(p, want, X) for p in found) and all(in_span(p, found, X) for p in want)
                    rep.check("equals", ok)
                rep.notes.append(f"searched up to degree bound {bound}")
            return rep

        return label, run

    def _expect(self, cur) -> bool:
        if cur.accept("expect"):
            tok = cur.word("true or false")
            if tok.text not in ("true", "false"):
                raise cur.error("expected true or false", tok)
            return tok.text == "true"
        return True

    def ck_invariant(self, cur):
        n, d = self._obj(cur, "derivation")
        p, text = cur.expr_text(_live_vars(d))
        want = self._expect(cur)
        label = f"invariant({n},{text})"

        def run():
            with reporting(label) as rep:
                dd = _certified(d)
                rep.check("invariant" if want else "not_invariant", is_invariant(dd, p) == want, image=dd(p))
            return rep

        return label, run

    def ck_nilpotency(self, cur):
        n, d = self._obj(cur, "derivation")
        p, text = cur.expr_text(_live_vars(d))
        o = self._options(cur, {"cap": "int", "expect": "word"})
        cap = o.get("cap", 32)
        label = f"nilpotency({n},{text})"

        def run():
            with reporting(label) as rep:
                k = nilpotency_degree(_certified(d), p, cap)
                rep.witnesses["degree"] = k if k is not None else f"exceeded({cap})"
                if "expect" in o:
                    rep.check("expected", str(rep.witnesses["degree"]).startswith(o["expect"]),
                              degree=rep.witnesses["degree"])
                else:
                    rep.check("nilpotent", k is not None, element=p)
            return rep

        return label, run

    def ck_fixed(self, cur):
        n, d = self._obj(cur, "derivation")
        vars = _live_vars(d)
        o = self._options(cur, {"radical": "exprs", "empty": "flag"}, vars)
        label = f"fixed({n})"

        def run():
            with reporting(label) as rep:
                I = fixed_locus(_certified(d))
                rep.witnesses["ideal"] = list(I.gens)
                if o.get("empty"):
                    rep.check("empty", I.is_unit(), groebner=list(I.groebner()))
                if "radical" in o:
                    rep.absorb("radical", compare_radical(I, o["radical"]))
            return rep

        return label, run

    def ck_member(self, cur):
        n, X = self._obj(cur, "scheme")
        p, text = cur.expr_text(X.vars)
        want = self._expect(cur)
        label = f"member({n},{text})"

        def run():
            with reporting(label) as rep:
                r = X.nf(p)
                rep.check("member" if want else "not_member", r.is_zero() == want, normal_form=r)
                if want and r.is_zero():
                    rep.witnesses["certificate"] = X.ideal.lift(p)
            return rep

        return label, run

    def ck_unit(self, cur):
        n, X = self._obj(cur, "scheme")
        p, text = cur.expr_text(X.vars)
        want = self._expect(cur)
        label = f"unit({n},{text})"

        def run():
            with reporting(label) as rep:
                inv = X.unit_inverse(p)
                rep.check("unit" if want else "not_unit", (inv is not None) == want, element=p)
                if inv is not None:
                    rep.witnesses["inverse"] = inv
            return rep

        return label, run

    def ck_equivariant(self, cur):
        n, phi = self._obj(cur, "morphism")
        ns, ds = self._obj(cur, "derivation")
        nt, dt = self._obj(cur, "derivation")
        label = f"equivariant({n},{ns},{nt})"
        return label, lambda: _wrap(label, lambda: check_equivariant(_certified(phi), _certified(ds),
                                                                     _certified(dt), label))

    def ck_iso(self, cur):
        nf, f = self._obj(cur, "morphism")
        ng, g = self._obj(cur, "morphism")
        label = f"iso({nf},{ng})"
        return label, lambda: _wrap(label, lambda: is_isomorphism(_certified(f), _certified(g), label))

    def ck_divide(self, cur):
        n, d = self._obj(cur, "derivation")
        vars = _live_vars(d)
        (num, ntext), (den, dtext) = cur.expr_text(vars), cur.expr_text(vars)
        o = self._options(cur, {"expect": "expr"}, vars)
        label = f"divide({n},{ntext},{dtext})"

        def run():
            with reporting(label) as rep:
                dd = _certified(d)
                q = invariant_division(dd, num, den)
                rep.witnesses["quotient"] = q
                rep.check("quotient_invariant", is_invariant(dd, q), image=dd(q))
                if "expect" in o:
                    rep.check("expected", dd.scheme.equal(q, o["expect"]), quotient=q)
            return rep

        return label, run

    def ck_cocycle(self, cur):
        n, c = self._obj(cur, "cover")
        return f"cocycle({n})", lambda: cocycle_check(c, f"cocycle({n})")

    def ck_coboundary(self, cur):
        n, c = self._obj(cur, "cover")
        o = self._options(cur, {"degree": "int", "pole": "int", "expect": "word"})
        expect = o.get("expect", "solution")
        if expect not in ("solution", "none"):
            raise cur.error("expect must be 'solution' or 'none'")
        label = f"coboundary({n})"
        return label, lambda: coboundary_report(c, o.get("degree", 6), o.get("pole", 6), expect == "solution", label)

    def ck_modification(self, cur):
        n, X = self._obj(cur, "scheme")
        o = self._options(cur, {"center": "exprs", "divisor": "expr", "names": "words", "equals": "word"}, X.vars)
        if "center" not in o or "divisor" not in o:
            raise cur.error("modification needs 'center' and 'divisor'")
        other = None
        if "equals" in o:
            other = self.ref(cur, "scheme", Token("word", o["equals"], 0))
        label = f"modification({n})"

        def run():
            with reporting(label) as rep:
                data = ModificationData(X, o["center"], o["divisor"], o.get("names", ("z",)))
                M = affine_modification(data)
                rep.witnesses["presentation"] = list(M.ideal.gens)
                if other is not None:
                    if set(other.vars.names) != set(M.vars.names):
                        raise SchemeError("variables of the comparison scheme differ")
                    rep.check("equals", ideals_equal(M.ideal, other.ideal.with_vars(M.vars)))
            return rep

        return label, run

    def ck_construction(self, cur):
        name = cur.word("construction name")
        entry = CONSTRUCTIONS.get(name.text)
        if entry is None:
            raise cur.error(f"unknown construction {name.text!r}", name)
        kwargs: Dict[str, Any] = {}
        while not cur.done():
            key = cur.word("parameter")
            if not cur.punct("="):
                raise cur.error("expected '='")
            val = cur.take()
            kwargs[key.text] = int(val.value) if val.value.lstrip("-").isdigit() else val.value
        fn, required = entry
        missing = [k for k in required if k not in kwargs]
        if missing:
            raise cur.error(f"{name.text} needs {', '.join(missing)}", name)
        label = f"{name.text}({','.join(f'{k}={v}' for k, v in kwargs.items())})"

        def run():
            return _wrap(label, lambda: fn(**kwargs))

        return label, run


def _live(obj):
    if isinstance(obj, _Deferred):
        raise obj.exc
    return obj


def _live_vars(obj) -> VarTable:
    if isinstance(obj, _Deferred):
        return VarTable(())
    return obj.scheme.vars


def _certified(obj):
    obj = _live(obj)
    obj.check_well_defined()
    return obj


def _wrap(label: str, fn: Callable[[], Report]) -> Report:
    """Run a report-producing callable, capturing declaration failures."""
    with reporting(label) as outer:
        rep = fn()
        rep.name = label
        return rep
    return outer


def _family(m, n, r, h="1", params=""):
    return C.FamilyParams(int(m), int(n), int(r), str(h), tuple(p for p in str(params).split(",") if p))


def _cylinder(m, n, r, m2=None, n2=None, r2=None):
    other = (m2, n2, r2) if m2 is not None else None
    return C.cylinder_splitting(m, n, r, other)


CONSTRUCTIONS: Dict[str, Tuple[Callable[..., Report], Tuple[str, ...]]] = {
    "Xm": (lambda m, bound=3: C.check_Xm(m, kernel_bound=bound), ("m",)),
    "Xmnr": (lambda m, n, r: C.check_Xmnr(m, n, r), ("m", "n", "r")),
    "Y": (lambda **kw: C.check_Y(_family(**kw)), ("m", "n", "r")),
    "russell_alpha": (lambda bound=3: C.russell_alpha_check(bound=bound), ()),
    "phi_trivialization": (C.phi_trivialization, ("m",)),
    "fiber_ring_decomposition": (C.fiber_ring_decomposition, ("m",)),
    "slice_charts": (C.slice_charts, ("m", "n", "r")),
    "y_charts": (lambda **kw: C.y_charts(_family(**kw)), ("m", "n", "r")),
    "cylinder_splitting": (_cylinder, ("m", "n", "r")),
    "modification": (lambda **kw: verify_modification_is_Y(_family(**kw)), ("m", "n", "r")),
    "slice_cocycle": (lambda m, n, r: cocycle_check(C.slice_cover(m, n, r)), ("m", "n", "r")),
    "slice_coboundary": (
        lambda m, n, r, degree=6, pole=6: coboundary_report(C.slice_cover(m, n, r, invert_y=True), degree, pole),
        ("m", "n", "r"),
    ),
}


def parse_scenario(src: str, path: str = "<scenario>", degree_bound: int = 4) -> Scenario:
    """Parse and validate a scenario; raises :class:`ScenarioError`."""
    b = _Builder(path, degree_bound)
    statements = []
    for line, text in _logical_lines(src):
        toks, comment = _tokenize(text, line, path)
        st = Statement(line, toks, comment)
        statements.append(st)
        if toks:
            b.statement(st)
    return Scenario(src, path, b.objects, b.declarations, b.checks, statements)


def run_check(spec: CheckSpec, max_pairs: Optional[int] = None, max_terms: Optional[int] = None) -> Report:
    with budget(max_pairs, max_terms):
        with reporting(spec.label) as outer:
            rep = spec.run()
            rep.name = spec.label
            return rep
    return outer


def _spaced(expr: str) -> str:
    """Expression text with spaces exactly around binary ``+`` and ``-``."""
    out = []
    for ch in re.sub(r"\s+", "", expr):
        binary = ch in "+-" and out and out[-1] not in "(^*+- "
        out.append(f" {ch} " if binary else ch)
    return "".join(out)


def format_scenario(s: Scenario) -> str:
    """Canonical layout: single spaces, quoted expressions with uniform spacing.

    Expressions keep their factored shape so check labels are unchanged.
    """
    out = []
    for st in s.statements:
        parts = []
        for tok in st.tokens:
            text = f'"{_spaced(tok.value)}"' if tok.poly is not None else tok.text
            if tok.kind == "punct" and parts:
                parts[-1] += text
                if text == ",":
                    parts[-1] += " "
                continue
            if parts and (parts[-1].endswith(":") or parts[-1].endswith("=")):
                parts[-1] += text
            elif parts and parts[-1].endswith(" "):
                parts[-1] += text
            else:
                parts.append(text)
        line = " ".join(p.rstrip() if i < len(parts) - 1 else p for i, p in enumerate(parts)).rstrip()
        if st.comment:
            line = f"{line}  {st.comment}" if line else st.comment
        out.append(line)
    while out and not out[-1]:
        out.pop()
    return "\n".join(out) + "\n"
