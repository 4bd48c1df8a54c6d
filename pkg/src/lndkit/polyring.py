"""Exact sparse multivariate polynomials over the rationals.

A :class:`Poly` maps exponent tuples (one slot per variable of its
:class:`VarTable`) to nonzero :class:`~fractions.Fraction` coefficients.
Values are immutable; every operation returns a new canonical polynomial.

Formal parameters (``alpha`` style constants) are ordinary variables whose
table entry carries a flag.  They only interact with ideals through relations
that a caller adds explicitly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from operator import add as _add
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

Exponent = Tuple[int, ...]
Number = Union[int, Fraction]


class PolyError(ValueError):
    """Raised for variable-table mismatches and invalid polynomial operations."""


class ParseError(PolyError):
    def __init__(self, message: str, src: str = "", pos: int = -1):
        self.src = src
        self.pos = pos
        where = f" at position {pos}" if pos >= 0 else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class VarTable:
    """Ordered, immutable list of variable names with parameter flags."""

    names: Tuple[str, ...]
    params: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "params", frozenset(self.params))
        if len(set(names)) != len(names):
            raise PolyError(f"duplicate variable names in {names}")
        for n in names:
            if not _IDENT.fullmatch(n):
                raise PolyError(f"invalid variable name {n!r}")
        unknown = self.params - set(names)
        if unknown:
            raise PolyError(f"parameters {sorted(unknown)} are not variables")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise PolyError(f"unknown variable {name!r}") from None

    def is_param(self, name: str) -> bool:
        return name in self.params

    def extend(self, names: Iterable[str], params: Iterable[str] = ()) -> "VarTable":
        new = tuple(n for n in names if n not in self._index)
        return VarTable(self.names + new, self.params | frozenset(params))

    def drop(self, names: Iterable[str]) -> "VarTable":
        gone = set(names)
        return VarTable(tuple(n for n in self.names if n not in gone), self.params - gone)

    def fresh(self, base: str) -> str:
        """Return a name derived from ``base`` that is not yet in the table."""
        if base not in self._index:
            return base
        k = 1
        while f"{base}{k}" in self._index:
            k += 1
        return f"{base}{k}"

    # shorthand constructors
    def var(self, name: str) -> "Poly":
        return Poly.var(self, name)

    def gens(self) -> Tuple["Poly", ...]:
        return tuple(Poly.var(self, n) for n in self.names)

    def parse(self, src: str) -> "Poly":
        return parse_poly(src, self)

    def const(self, c: Number) -> "Poly":
        return Poly.const(self, c)


class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: VarTable, terms: Mapping[Exponent, Fraction] = None):
        self.vars = vars
        self.terms: Dict[Exponent, Fraction] = (
            {e: c if type(c) is Fraction else Fraction(c) for e, c in terms.items() if c} if terms else {}
        )
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, vars: VarTable) -> "Poly":
        return cls(vars)

    @classmethod
    def const(cls, vars: VarTable, c: Number) -> "Poly":
        c = Fraction(c)
        return cls(vars, {(0,) * len(vars): c} if c else None)

    @classmethod
    def var(cls, vars: VarTable, name: str) -> "Poly":
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(vars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, vars: VarTable, exp: Exponent, c: Number = 1) -> "Poly":
        c = Fraction(c)
        return cls(vars, {tuple(exp): c} if c else None)

    # -- basic queries ----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_coeff(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def total_degree(self, names: Iterable[str] = None) -> int:
        if not self.terms:
            return -1
        if names is None:
            return max(sum(e) for e in self.terms)
        idx = [self.vars.index(n) for n in names]
        return max(sum(e[i] for i in idx) for e in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def variables(self) -> Tuple[str, ...]:
        used = [False] * len(self.vars)
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(n for n, u in zip(self.vars.names, used) if u)

    def __len__(self) -> int:
        return len(self.terms)

    # -- coercion ---------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise PolyError("variable tables differ")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.vars, other)
        return NotImplemented

    def rebase(self, vars: VarTable) -> "Poly":
        """Re-express this polynomial over another table, matching by name."""
        if vars == self.vars:
            return self
        used = self.variables()
        for n in used:
            if n not in vars:
                raise PolyError(f"variable {n!r} missing from target table")
        pos = [(self.vars.index(n), vars.index(n)) for n in used]
        k = len(vars)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * k
            for i, j in pos:
                ne[j] = e[i]
            out[tuple(ne)] = c
        return Poly(vars, out)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly(self.vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly(self.vars)
            return Poly(self.vars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(map(_add, e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise PolyError(f"exponent must be a non-negative integer, got {k!r}")
        result = Poly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c: Number) -> "Poly":
        return self * Fraction(c)

    # -- calculus and substitution ---------------------------------------
    def diff(self, name: str) -> "Poly":
        """Formal partial derivative with respect to ``name``."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly(self.vars, out)

    def subs(self, mapping: Mapping[str, "Poly"], target: VarTable = None) -> "Poly":
        """Simultaneous substitution of variables by polynomials.

        Variables absent from ``mapping`` are sent to the same-named variable
        of ``target`` (default: this polynomial's table).
        """
        if target is None:
            if mapping:
                target = next(iter(mapping.values())).vars
            else:
                target = self.vars
        for n in mapping:
            if n not in self.vars:
                raise PolyError(f"cannot substitute unknown variable {n!r}")
        images = []
        for n in self.vars.names:
            if n in mapping:
                img = mapping[n]
                if not isinstance(img, Poly):
                    img = Poly.const(target, img)
                elif img.vars != target:
                    raise PolyError(f"image of {n!r} is over a different table")
                images.append(img)
            else:
                images.append(None)
        powers = [dict() for _ in images]
        result: Dict[Exponent, Fraction] = {}
        one = (0,) * len(target)
        for e, c in self.terms.items():
            term = Poly(target, {one: c})
            for i, k in enumerate(e):
                if not k:
                    continue
                img = images[i]
                if img is None:
                    img = Poly.var(target, self.vars.names[i])
                    images[i] = img
                pw = powers[i].get(k)
                if pw is None:
                    pw = img ** k
                    powers[i][k] = pw
                term = term * pw
                if not term.terms:
                    break
            for te, tc in term.terms.items():
                v = result.get(te, 0) + tc
                if v:
                    result[te] = v
                else:
                    del result[te]
        return Poly(target, result)

    def content_primitive(self) -> Tuple[Fraction, "Poly"]:
        """Split off the rational content so the primitive part has coprime
        integer coefficients and a positive leading coefficient."""
        if not self.terms:
            return Fraction(0), self
        from math import gcd

        den = 1
        for c in self.terms.values():
            den = den * c.denominator // gcd(den, c.denominator)
        g = 0
        for c in self.terms.values():
            g = gcd(g, int(c * den))
        content = Fraction(g, den)
        lead = self.terms[max(self.terms, key=grevlex_key)]
        if lead < 0:
            content = -content
        return content, Poly(self.vars, {e: c / content for e, c in self.terms.items()})

    # -- comparison & display ---------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.vars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vars.names == other.vars.names and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars.names, frozenset(self.terms.items())))
        return self._hash

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


def grevlex_key(e: Exponent) -> tuple:
    """Sort key for graded reverse lexicographic order (larger key = larger)."""
    return (sum(e),) + tuple(-k for k in reversed(e))


def poly_sum(polys: Iterable[Poly], vars: VarTable) -> Poly:
    out: Dict[Exponent, Fraction] = {}
    for p in polys:
        for e, c in p.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return Poly(vars, out)


def binomial(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


# ---------------------------------------------------------------------------
# Expression grammar
#
#   expr  := term (('+' | '-') term)*
#   term  := unary ('*' unary)*
#   unary := '-' unary | power
#   power := atom ('^' INT)?
#   atom  := INT | INT '/' INT | IDENT | '(' expr ')'
# ---------------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\s*/\s*\d+)?)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^()])|(?P<bad>\S))"
)


def _tokenize(src: str):
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:  # trailing whitespace
            break
        if m.lastgroup == "bad":
            raise ParseError(f"unexpected character {m.group('bad')!r}", src, m.start("bad"))
        if m.lastgroup is None:
            break
        toks.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str, vars: VarTable):
        self.src = src
        self.vars = vars
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.src, tok[2])

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.error("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            p = p * self.unary()
        tok = self.peek()
        if tok[0] in ("num", "ident") or (tok[0] == "op" and tok[1] == "("):
            self.error("missing '*' between factors")
        return p

    def unary(self) -> Poly:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num" or "/" in tok[1]:
                self.error("exponent must be a non-negative integer", tok)
            base = base ** int(tok[1])
            if self.peek()[0] == "op" and self.peek()[1] == "^":
                self.error("chained '^' is ambiguous; use parentheses")
        return base

    def atom(self) -> Poly:
        tok = self.take()
        kind, text, pos = tok
        if kind == "num":
            if "/" in text:
                a, b = (s.strip() for s in text.split("/"))
                if int(b) == 0:
                    raise ParseError("rational with zero denominator", self.src, pos)
                return Poly.const(self.vars, Fraction(int(a), int(b)))
            return Poly.const(self.vars, int(text))
        if kind == "ident":
            if text not in self.vars:
                raise ParseError(f"unknown identifier {text!r}", self.src, pos)
            return Poly.var(self.vars, text)
        if kind == "op" and text == "(":
            p = self.expr()
            if not (self.peek()[0] == "op" and self.peek()[1] == ")"):
                self.error("expected ')'")
            self.take()
            return p
        self.error(f"unexpected token {text!r}" if text else "unexpected end of input", tok)


def parse_poly(src: str, vars: VarTable) -> Poly:
    """Parse an expression in the polynomial grammar over ``vars``."""
    return _Parser(src, vars).parse()


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    """Canonical text form; terms in descending grevlex order."""
    if not p.terms:
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        mono = "*".join(
            name if k == 1 else f"{name}^{k}" for name, k in zip(p.vars.names, e) if k
        )
        a = abs(c)
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if not parts:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f"- {body}" if c < 0 else f"+ {body}")
    return " ".join(parts)
