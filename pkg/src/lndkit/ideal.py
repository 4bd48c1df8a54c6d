"""Gröbner bases over the rationals and the ideal operations built on them.

The engine works on raw ``{exponent: Fraction}`` dicts internally and speaks
:class:`~lndkit.polyring.Poly` at its boundary.  Everything the geometric
layers need (membership, elimination, saturation, units, radical membership,
intersections, comaximality) is phrased as a normal-form question.

Resource use is capped by a :class:`Budget` read from a context variable, so a
runaway computation surfaces as :class:`BudgetExceeded` instead of hanging.
"""

from __future__ import annotations

import contextvars
import heapq
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from operator import add as _add, sub as _sub
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .polyring import Exponent, Poly, PolyError, VarTable, grevlex_key

Terms = Dict[Exponent, Fraction]


class BudgetExceeded(RuntimeError):
    """A Gröbner computation exceeded its pair or term budget."""

    def __init__(self, what: str, limit: int):
        self.what = what
        self.limit = limit
        super().__init__(f"{what} budget of {limit} exceeded")


class NotInIdeal(ValueError):
    def __init__(self, remainder: Poly):
        self.remainder = remainder
        super().__init__(f"not a member; normal form {remainder}")


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 200_000
    max_terms: int = 100_000


_budget: contextvars.ContextVar = contextvars.ContextVar("lndkit_budget", default=Budget())


def current_budget() -> Budget:
    return _budget.get()


@contextmanager
def budget(max_pairs: Optional[int] = None, max_terms: Optional[int] = None):
    """Temporarily override the engine budget."""
    old = _budget.get()
    new = Budget(
        max_pairs if max_pairs is not None else old.max_pairs,
        max_terms if max_terms is not None else old.max_terms,
    )
    token = _budget.set(new)
    try:
        yield new
    finally:
        _budget.reset(token)


# ---------------------------------------------------------------------------
# Monomial orders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonomialOrder:
    """``grevlex``, ``lex``, or ``block`` (eliminated variables first, grevlex
    inside each block)."""

    kind: str = "grevlex"
    elim: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "elim", tuple(self.elim))

    def key(self, vars: VarTable):
        """Return a function mapping exponents to comparable keys (larger key =
        larger monomial)."""
        if self.kind == "grevlex":
            return grevlex_key
        if self.kind == "lex":
            return tuple
        idx_e = [vars.index(n) for n in vars.names if n in self.elim]
        idx_r = [vars.index(n) for n in vars.names if n not in self.elim]
        for n in self.elim:
            vars.index(n)

        def block_key(e):
            a = [e[i] for i in idx_e]
            b = [e[i] for i in idx_r]
            return (sum(a),) + tuple(-k for k in reversed(a)) + (sum(b),) + tuple(-k for k in reversed(b))

        return block_key

    def __str__(self) -> str:
        return self.kind if self.kind != "block" else f"block({','.join(self.elim)})"


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(elim: Iterable[str]) -> MonomialOrder:
    return MonomialOrder("block", tuple(elim))


# ---------------------------------------------------------------------------
# Raw-dict engine
# ---------------------------------------------------------------------------


def _divides(a: Exponent, b: Exponent) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a: Exponent, b: Exponent) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _mul_term(p: Terms, e: Exponent, c: Fraction) -> Terms:
    return {tuple(map(_add, k, e)): v * c for k, v in p.items()}


def _axpy(acc: Terms, p: Terms, e: Exponent, c: Fraction) -> None:
    """acc += c * x^e * p, in place."""
    for k, v in p.items():
        ne = tuple(map(_add, k, e))
        w = acc.get(ne, 0) + c * v
        if w:
            acc[ne] = w
        else:
            acc.pop(ne, None)


class _Engine:
    def __init__(self, nvars: int, keyfn):
        self.n = nvars
        self.keyfn = keyfn
        self._keys: Dict[Exponent, tuple] = {}
        self.budget = current_budget()
        self.pairs_done = 0

    def nkey(self, e: Exponent) -> tuple:
        k = self._keys.get(e)
        if k is None:
            k = tuple(-x for x in self.keyfn(e))
            self._keys[e] = k
        return k

    def lm(self, p: Terms) -> Exponent:
        return min(p, key=self.nkey)

    def monic(self, p: Terms) -> Tuple[Exponent, Terms]:
        m = self.lm(p)
        c = p[m]
        if c != 1:
            p = {e: v / c for e, v in p.items()}
        return m, p

    def reduce(self, p: Terms, basis: Sequence[Tuple[Exponent, Terms]], track: bool = False):
        """Full reduction of ``p`` by monic ``basis``.

        With ``track`` the quotients are returned too:
        ``p = sum(q[k] * basis[k]) + remainder``.
        """
        p = dict(p)
        heap = [(self.nkey(e), e) for e in p]
        heapq.heapify(heap)
        rem: Terms = {}
        quots: Dict[int, Terms] = {}
        max_terms = self.budget.max_terms
        while heap:
            _, m = heapq.heappop(heap)
            c = p.get(m)
            if c is None:
                continue
            for k, (lm, g) in enumerate(basis):
                if _divides(lm, m):
                    break
            else:
                rem[m] = c
                del p[m]
                continue
            q = tuple(map(_sub, m, lm))
            del p[m]
            for e, a in g.items():
                if e == lm:
                    continue
                ne = tuple(map(_add, e, q))
                old = p.get(ne)
                if old is None:
                    p[ne] = -c * a
                    heapq.heappush(heap, (self.nkey(ne), ne))
                else:
                    v = old - c * a
                    if v:
                        p[ne] = v
                    else:
                        del p[ne]
            if len(p) > max_terms:
                raise BudgetExceeded("term", max_terms)
            if track:
                qk = quots.setdefault(k, {})
                v = qk.get(q, 0) + c
                if v:
                    qk[q] = v
                else:
                    del qk[q]
        if track:
            return rem, quots
        return rem

    def spoly(self, f: Tuple[Exponent, Terms], g: Tuple[Exponent, Terms]) -> Terms:
        l = _lcm(f[0], g[0])
        s = _mul_term(f[1], tuple(map(_sub, l, f[0])), Fraction(1))
        _axpy(s, g[1], tuple(map(_sub, l, g[0])), Fraction(-1))
        return s

    def buchberger(self, gens: Iterable[Terms], track: bool = False):
        """Buchberger's algorithm with the coprime and chain criteria and the
        normal selection strategy.  Returns a (non-reduced) basis; with
        ``track`` each element also carries its cofactors w.r.t. ``gens``."""
        gens = [g for g in gens if g]
        ngens = len(gens)
        basis: List[Tuple[Exponent, Terms]] = []
        cofs: List[List[Terms]] = []
        pending = set()
        heap: List[tuple] = []
        one = (0,) * self.n

        def add_element(h: Terms, cof: Optional[List[Terms]]):
            m, hm = self.monic(h)
            if track:
                c = h[m]
                if c != 1:
                    cof = [{e: v / c for e, v in t.items()} for t in cof]
                cofs.append(cof)
            k = len(basis)
            basis.append((m, hm))
            for i in range(k):
                lm_i = basis[i][0]
                l = _lcm(lm_i, m)
                pending.add((i, k))
                heapq.heappush(heap, (sum(l), i, k))

        for idx, g in enumerate(gens):
            if track:
                r, quots = self.reduce(g, basis, track=True)
                if r:
                    cof = [dict() for _ in range(ngens)]
                    cof[idx] = {one: Fraction(1)}
                    self._subtract_quotients(cof, quots, cofs)
                    add_element(r, cof)
            else:
                r = self.reduce(g, basis)
                if r:
                    add_element(r, None)

        max_pairs = self.budget.max_pairs
        while heap:
            _, i, j = heapq.heappop(heap)
            pending.discard((i, j))
            lm_i, lm_j = basis[i][0], basis[j][0]
            if _coprime(lm_i, lm_j):
                continue
            l = _lcm(lm_i, lm_j)
            skip = False
            for k, (lm_k, _) in enumerate(basis):
                if k == i or k == j or not _divides(lm_k, l):
                    continue
                if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
                    skip = True
                    break
            if skip:
                continue
            self.pairs_done += 1
            if self.pairs_done > max_pairs:
                raise BudgetExceeded("pair", max_pairs)
            s = self.spoly(basis[i], basis[j])
            if track:
                h, quots = self.reduce(s, basis, track=True)
                if h:
                    cof = [dict() for _ in range(ngens)]
                    for t in range(ngens):
                        _axpy(cof[t], cofs[i][t], tuple(map(_sub, l, lm_i)), Fraction(1))
                        _axpy(cof[t], cofs[j][t], tuple(map(_sub, l, lm_j)), Fraction(-1))
                    self._subtract_quotients(cof, quots, cofs)
                    add_element(h, cof)
            else:
                h = self.reduce(s, basis)
                if h:
                    add_element(h, None)
        if track:
            return basis, cofs
        return basis

    @staticmethod
    def _subtract_quotients(cof: List[Terms], quots: Dict[int, Terms], cofs: List[List[Terms]]):
        for k, q in quots.items():
            for e, c in q.items():
                for t, ct in enumerate(cofs[k]):
                    if ct:
                        _axpy(cof[t], ct, e, -c)

    def reduced(self, basis: List[Tuple[Exponent, Terms]]) -> List[Tuple[Exponent, Terms]]:
        basis = sorted(basis, key=lambda b: self.nkey(b[0]))
        minimal = []
        for i, (m, g) in enumerate(basis):
            if any(_divides(m2, m) for j, (m2, _) in enumerate(basis) if j != i and (m2 != m or j < i)):
                continue
            minimal.append((m, g))
        out = []
        for i, (m, g) in enumerate(minimal):
            others = [b for j, b in enumerate(minimal) if j != i]
            tail = {e: c for e, c in g.items() if e != m}
            r = self.reduce(tail, others)
            r[m] = Fraction(1)
            out.append((m, r))
        out.sort(key=lambda b: self.nkey(b[0]))
        return out


# ---------------------------------------------------------------------------
# Ideal
# ---------------------------------------------------------------------------

_cache: Dict[tuple, Tuple[Poly, ...]] = {}
_cache_lock = threading.Lock()


def cached_bases():
    """Snapshot of every reduced basis computed so far, as (vars, order, basis)."""
    with _cache_lock:
        items = list(_cache.items())
    return [(key[0], key[2], basis) for key, basis in items]


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


class Ideal:
    """Ideal of a polynomial ring, given by generators."""

    def __init__(self, vars: VarTable, generators: Iterable[Poly] = ()):
        self.vars = vars
        gens = []
        seen = set()
        for g in generators:
            g = g.rebase(vars) if g.vars != vars else g
            if g.is_zero() or g in seen:
                continue
            seen.add(g)
            gens.append(g)
        self.gens: Tuple[Poly, ...] = tuple(gens)
        self._bases: Dict[MonomialOrder, Tuple[Poly, ...]] = {}
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"Ideal({', '.join(str(g) for g in self.gens) or '0'})"

    def _cache_key(self, order: MonomialOrder) -> tuple:
        return (self.vars, frozenset(frozenset(g.terms.items()) for g in self.gens), order)

    def groebner(self, order: MonomialOrder = GREVLEX) -> Tuple[Poly, ...]:
        """Reduced Gröbner basis, sorted by descending leading monomial."""
        basis = self._bases.get(order)
        if basis is not None:
            return basis
        key = self._cache_key(order)
        with _cache_lock:
            basis = _cache.get(key)
        if basis is None:
            eng = _Engine(len(self.vars), order.key(self.vars))
            raw = eng.reduced(eng.buchberger(g.terms for g in self.gens))
            basis = tuple(Poly(self.vars, g) for _, g in raw)
            with _cache_lock:
                _cache.setdefault(key, basis)
        with self._lock:
            self._bases.setdefault(order, basis)
        return basis

    def _raw_basis(self, order: MonomialOrder):
        eng = _Engine(len(self.vars), order.key(self.vars))
        return eng, [(eng.lm(g.terms), g.terms) for g in self.groebner(order)]

    def normal_form(self, p: Poly, order: MonomialOrder = GREVLEX) -> Poly:
        if p.vars != self.vars:
            p = p.rebase(self.vars)
        if p.is_zero():
            return p
        eng, basis = self._raw_basis(order)
        return Poly(self.vars, eng.reduce(p.terms, basis))

    def contains(self, p: Poly) -> bool:
        return self.normal_form(p).is_zero()

    __contains__ = contains

    def is_unit(self) -> bool:
        return any(g.is_constant() and not g.is_zero() for g in self.groebner())

    def lift(self, p: Poly, order: MonomialOrder = GREVLEX) -> List[Poly]:
        """Cofactors ``a`` with ``p == sum(a[i] * gens[i])``, verified exactly.

        Raises :class:`NotInIdeal` if ``p`` is not a member.
        """
        if p.vars != self.vars:
            p = p.rebase(self.vars)
        zero = [Poly(self.vars) for _ in self.gens]
        if p.is_zero():
            return zero
        if not self.gens:
            raise NotInIdeal(p)
        eng = _Engine(len(self.vars), order.key(self.vars))
        basis, cofs = eng.buchberger((g.terms for g in self.gens), track=True)
        rem, quots = eng.reduce(p.terms, basis, track=True)
        if rem:
            raise NotInIdeal(self.normal_form(p, order))
        out: List[Terms] = [dict() for _ in self.gens]
        for k, q in quots.items():
            for e, c in q.items():
                for t, ct in enumerate(cofs[k]):
                    if ct:
                        _axpy(out[t], ct, e, c)
        result = [Poly(self.vars, t) for t in out]
        check = Poly(self.vars)
        for a, g in zip(result, self.gens):
            check = check + a * g
        if check != p:
            raise AssertionError("lift certificate failed to verify")
        return result

    # -- constructors -----------------------------------------------------
    def __add__(self, other) -> "Ideal":
        if isinstance(other, Ideal):
            return Ideal(self.vars, self.gens + tuple(g.rebase(self.vars) for g in other.gens))
        return Ideal(self.vars, self.gens + tuple(other))

    def with_vars(self, vars: VarTable) -> "Ideal":
        return Ideal(vars, (g.rebase(vars) for g in self.gens))


def unit_ideal(vars: VarTable) -> Ideal:
    return Ideal(vars, [Poly.const(vars, 1)])


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def groebner_basis(I: Ideal, order: MonomialOrder = GREVLEX) -> Tuple[Poly, ...]:
    return I.groebner(order)


def normal_form(p: Poly, I: Ideal, order: MonomialOrder = GREVLEX) -> Poly:
    return I.normal_form(p, order)


def member(p: Poly, I: Ideal) -> bool:
    return I.contains(p)


def s_polynomial(f: Poly, g: Poly, order: MonomialOrder = GREVLEX) -> Poly:
    eng = _Engine(len(f.vars), order.key(f.vars))
    return Poly(f.vars, eng.spoly(eng.monic(f.terms), eng.monic(g.terms)))


def verify_groebner(basis: Sequence[Poly], order: MonomialOrder = GREVLEX) -> Optional[Tuple[int, int, Poly]]:
    """Check the Buchberger postcondition exhaustively.

    Returns ``None`` when every S-polynomial reduces to zero, else the first
    offending pair and its remainder.
    """
    if not basis:
        return None
    vars = basis[0].vars
    eng = _Engine(len(vars), order.key(vars))
    raw = [eng.monic(g.terms) for g in basis]
    for i in range(len(raw)):
        for j in range(i + 1, len(raw)):
            r = eng.reduce(eng.spoly(raw[i], raw[j]), raw)
            if r:
                return i, j, Poly(vars, r)
    return None


def elimination_ideal(I: Ideal, drop: Iterable[str]) -> Ideal:
    """``I`` intersected with the subring of the remaining variables, as an
    ideal over the reduced table."""
    drop = tuple(n for n in I.vars.names if n in set(drop))
    for n in drop:
        I.vars.index(n)
    if not drop:
        return Ideal(I.vars, I.groebner())
    basis = I.groebner(block_order(drop))
    idx = [I.vars.index(n) for n in drop]
    keep = I.vars.drop(drop)
    gens = [g.rebase(keep) for g in basis if all(e[i] == 0 for e in g.terms for i in idx)]
    return Ideal(keep, gens)


def saturate(I: Ideal, f: Poly) -> Ideal:
    """``I : f^infinity`` via an auxiliary inverse of ``f``."""
    if f.is_zero():
        raise PolyError("cannot saturate by zero")
    if f.is_constant():
        return Ideal(I.vars, I.groebner())
    w = I.vars.fresh("w_sat")
    big = I.vars.extend([w])
    wp = Poly.var(big, w)
    J = Ideal(big, [g.rebase(big) for g in I.gens] + [1 - f.rebase(big) * wp])
    return elimination_ideal(J, [w]).with_vars(I.vars)


def is_unit_mod(f: Poly, I: Ideal) -> Tuple[bool, Optional[Poly]]:
    """Whether ``f`` is a unit modulo ``I``; if so also an inverse ``g`` with
    ``f*g - 1`` in ``I`` (checked)."""
    if not (I + [f]).is_unit():
        return False, None
    if I.is_unit():
        return True, Poly(I.vars)
    w = I.vars.fresh("w_inv")
    big = I.vars.extend([w])
    wp = Poly.var(big, w)
    J = Ideal(big, [g.rebase(big) for g in I.gens] + [f.rebase(big) * wp - 1])
    g = J.normal_form(wp, block_order([w]))
    if g.degree_in(w) > 0:
        raise AssertionError("inverse normal form still involves the auxiliary variable")
    g = I.normal_form(g.rebase(I.vars))
    if not I.contains(f * g - 1):
        raise AssertionError("inverse certificate failed")
    return True, g


def radical_member(f: Poly, I: Ideal) -> bool:
    """Rabinowitsch test: ``f`` in rad(I) iff ``1`` in ``I + (1 - f*w)``."""
    if f.is_zero():
        return True
    w = I.vars.fresh("w_rad")
    big = I.vars.extend([w])
    J = Ideal(big, [g.rebase(big) for g in I.gens] + [1 - f.rebase(big) * Poly.var(big, w)])
    return J.is_unit()


def ideals_equal(I: Ideal, J: Ideal) -> bool:
    J = J.with_vars(I.vars) if J.vars != I.vars else J
    return I.groebner() == J.groebner()


def is_subset(I: Ideal, J: Ideal) -> bool:
    """Whether every generator of ``I`` lies in ``J``."""
    return all(J.contains(g) for g in I.gens)


def comaximal(I: Ideal, J: Ideal) -> Tuple[bool, Optional[Tuple[Poly, Poly]]]:
    """Whether ``I + J`` is the unit ideal; certificate ``1 = a + b`` with
    ``a`` in ``I`` and ``b`` in ``J``."""
    S = I + J
    if not S.is_unit():
        return False, None
    cof = S.lift(Poly.const(I.vars, 1))
    gens = S.gens
    a = Poly(I.vars)
    b = Poly(I.vars)
    left = set(I.gens)
    for c, g in zip(cof, gens):
        if g in left:
            a = a + c * g
        else:
            b = b + c * g
    if a + b != 1:
        raise AssertionError("comaximality certificate failed")
    return True, (a, b)


def intersect(I: Ideal, J: Ideal) -> Ideal:
    """``I`` intersected with ``J`` via ``s*I + (1-s)*J`` and elimination of ``s``."""
    s = I.vars.fresh("s_int")
    big = I.vars.extend([s])
    sp = Poly.var(big, s)
    gens = [sp * g.rebase(big) for g in I.gens] + [(1 - sp) * g.rebase(big) for g in J.gens]
    return elimination_ideal(Ideal(big, gens), [s]).with_vars(I.vars)
