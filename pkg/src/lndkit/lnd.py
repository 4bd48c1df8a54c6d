"""Derivations on presented rings, their exponentials, kernels and fixed loci."""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence

from .ideal import BudgetExceeded, Ideal, NotInIdeal, radical_member
from .linalg import nullspace
from .polyring import Poly, poly_sum
from .report import CheckFailed, Report, reporting
from .scheme import Morphism, PolyLike, Scheme, SchemeError, WellDefinednessError, make_morphism

DEFAULT_CAP = 32
MAX_KERNEL_MONOMIALS = 4000


class Derivation:
    """A k-derivation of ``scheme``, stored by its value on every variable.

    Partners are forced to ``d(w) = -w^2 * d(f)`` and constants to 0.
    """

    def __init__(self, scheme: Scheme, images: Mapping[str, Poly], name: str = ""):
        self.scheme = scheme
        self.images: Dict[str, Poly] = dict(images)
        self.name = name
        self._certificates = None

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self.images.items() if not v.is_zero())
        return f"Derivation({self.name or ''}: {body or '0'})"

    def raw(self, p: Poly) -> Poly:
        """Leibniz extension without reduction."""
        vars = self.scheme.vars
        p = self.scheme.poly(p)
        return poly_sum(
            (p.diff(n) * img for n, img in self.images.items() if not img.is_zero()), vars
        )

    def __call__(self, p: PolyLike) -> Poly:
        return self.scheme.nf(self.raw(self.scheme.poly(p)))

    def scaled(self, c, name: str = "") -> "Derivation":
        return Derivation(self.scheme, {k: v * Fraction(c) for k, v in self.images.items()}, name)

    def check_well_defined(self) -> None:
        for g in self.scheme.ideal.gens:
            r = self(g)
            if not r.is_zero():
                raise WellDefinednessError(g, r, "derivation")

    def certificates(self) -> Dict[str, List[Poly]]:
        """Cofactors writing each ``d(g)`` in terms of the ideal generators."""
        if self._certificates is None:
            I = self.scheme.ideal
            self._certificates = {str(g): I.lift(self.raw(g)) for g in I.gens}
        return self._certificates


def make_derivation(X: Scheme, images: Mapping[str, PolyLike], name: str = "",
                    check: bool = True) -> Derivation:
    """Certified derivation from images of the ambient variables."""
    partners = X.partners
    consts = set(X.constants)
    imgs: Dict[str, Poly] = {}
    for k, v in images.items():
        if k not in X.vars:
            raise SchemeError(f"{k!r} is not a variable of the scheme")
        if k in partners:
            raise SchemeError(f"image of localization partner {k!r} is derived, not supplied")
        p = X.poly(v)
        if k in consts:
            if not p.is_zero():
                raise SchemeError(f"constant {k!r} must be killed by a derivation")
            continue
        imgs[k] = p
    missing = [n for n in X.ambient() if n not in imgs]
    if missing:
        raise SchemeError(f"no image given for {', '.join(missing)}")
    for n in consts:
        imgs[n] = Poly(X.vars)
    # partners may invert expressions in earlier partners, so resolve in order
    for w, f in X.localizations:
        df = poly_sum((f.diff(n) * imgs[n] for n in f.variables()), X.vars)
        imgs[w] = -(X.var(w) ** 2) * df
    d = Derivation(X, {n: imgs[n] for n in X.vars.names}, name)
    if check:
        d.check_well_defined()
    return d


def zero_derivation(X: Scheme) -> Derivation:
    return make_derivation(X, {n: 0 for n in X.ambient()}, "0")


def apply(d: Derivation, p: PolyLike) -> Poly:
    return d(p)


def iterate(d: Derivation, p: PolyLike, cap: int = DEFAULT_CAP) -> List[Poly]:
    """Nonzero normal forms ``[p, d(p), d^2(p), ...]``.  The list has
    ``cap + 1`` entries exactly when ``p`` is not killed within ``cap`` steps."""
    q = d.scheme.nf(p)
    out = []
    while not q.is_zero() and len(out) <= cap:
        out.append(q)
        q = d(q)
    return out


def nilpotency_degree(d: Derivation, p: PolyLike, cap: int = DEFAULT_CAP) -> Optional[int]:
    """Least ``k`` with ``d^k(p) = 0``, or ``None`` if ``k > cap``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    q = d.scheme.nf(p)
    for k in range(cap + 1):
        if q.is_zero():
            return k
        if k < cap:
            q = d(q)
    return None


def is_locally_nilpotent(d: Derivation, cap: int = DEFAULT_CAP, name: str = None) -> Report:
    """Nilpotency degree of every variable; fails on the first one that
    exceeds ``cap``."""
    with reporting(name or f"lnd({d.name or 'd'})") as rep:
        table = {}
        for n in d.scheme.vars.names:
            k = nilpotency_degree(d, d.scheme.var(n), cap)
            table[n] = k if k is not None else f"exceeded({cap})"
            rep.check(f"nilpotent[{n}]", k is not None, generator=n)
        rep.witnesses["degrees"] = table
    return rep


# ---------------------------------------------------------------------------
# Exponential actions
# ---------------------------------------------------------------------------


class GaAction:
    """Coaction ``X -> X x A^1_T`` written as images over ``scheme + T``."""

    def __init__(self, derivation: Optional[Derivation], scheme: Scheme, time: str,
                 images: Mapping[str, Poly]):
        self.derivation = derivation
        self.scheme = scheme
        self.time = time
        self.product = scheme.with_variables([time])
        self.images: Dict[str, Poly] = {k: v.rebase(self.product.vars) for k, v in images.items()}

    def comorphism(self, check: bool = True) -> Morphism:
        return make_morphism(self.product, self.scheme, self.images, "exp", check=check)

    def with_image(self, name: str, image: Poly) -> "GaAction":
        imgs = dict(self.images)
        imgs[name] = image.rebase(self.product.vars)
        return GaAction(None, self.scheme, self.time, imgs)


def exp_action(d: Derivation, cap: int = DEFAULT_CAP, time: str = "T") -> GaAction:
    """``x -> sum d^i(x) T^i / i!`` on every variable; certified well defined."""
    X = d.scheme
    T = X.vars.fresh(time)
    P = X.with_variables([T])
    tp = P.var(T)
    images = {}
    for n in X.vars.names:
        seq = iterate(d, X.var(n), cap)
        if len(seq) > cap:
            raise CheckFailed(f"{n} is not nilpotent within {cap} steps", generator=n)
        images[n] = poly_sum(
            (q.rebase(P.vars) * tp ** i * Fraction(1, factorial(i)) for i, q in enumerate(seq)), P.vars
        )
    a = GaAction(d, X, T, images)
    a.comorphism(check=True)
    return a


def check_action_axioms(a: GaAction, name: str = "action_axioms") -> Report:
    """``T = 0`` is the identity and acting by ``S`` then ``T`` equals acting
    by ``S + T``."""
    X, T = a.scheme, a.time
    with reporting(name) as rep:
        P = a.product
        for n in X.vars.names:
            at0 = a.images[n].subs({T: Poly(P.vars)}, P.vars).rebase(X.vars)
            if not X.equal(at0, X.var(n)):
                rep.check("unit", False, generator=n, image=X.nf(at0))
                break
        else:
            rep.check("unit", True)
        S = P.vars.fresh("S")
        Q = P.with_variables([S])
        sp, tp = Q.var(S), Q.var(T)
        at_T = {k: v.rebase(Q.vars) for k, v in a.images.items()}
        at_S = {k: v.subs({T: sp}, Q.vars) for k, v in at_T.items()}
        for n in X.vars.names:
            lhs = at_S[n].subs(at_T, Q.vars)
            rhs = at_T[n].subs({T: sp + tp}, Q.vars)
            if not Q.equal(lhs, rhs):
                rep.check("coassociative", False, generator=n, difference=Q.nf(lhs - rhs))
                break
        else:
            rep.check("coassociative", True)
    return rep


def check_equivariant(phi: Morphism, d_src: Derivation, d_tgt: Derivation,
                      name: str = "equivariant") -> Report:
    """``d_src(phi*(g)) == phi*(d_tgt(g))`` for each target variable ``g``."""
    with reporting(name) as rep:
        X = phi.source
        for n in phi.target.vars.names:
            lhs = d_src(phi.images[n])
            rhs = X.nf(phi.pullback(d_tgt.images[n]))
            if lhs != rhs:
                rep.check("intertwines", False, generator=n, difference=X.nf(lhs - rhs))
                break
        else:
            rep.check("intertwines", True)
    return rep


# ---------------------------------------------------------------------------
# Fixed points and invariants
# ---------------------------------------------------------------------------


def fixed_locus(d: Derivation) -> Ideal:
    X = d.scheme
    return X.ideal + [d.images[n] for n in X.ambient()]


def compare_radical(I: Ideal, expected: Sequence[PolyLike]) -> Report:
    """Mutual radical membership of ``I`` and the ideal of ``expected``."""
    with reporting("radical_equal") as rep:
        E = Ideal(I.vars, [p if isinstance(p, Poly) else I.vars.parse(p) for p in expected])
        for label, A, B in (("expected<=rad(I)", E, I), ("I<=rad(expected)", I, E)):
            bad = next((g for g in A.gens if not radical_member(g, B)), None)
            rep.check(label, bad is None, generator=bad)
    return rep


def is_invariant(d: Derivation, p: PolyLike) -> bool:
    return d(p).is_zero()


def _standard_monomials(X: Scheme, groups: Sequence[Sequence[str]], bounds: Sequence[int]) -> List[Poly]:
    vars = X.vars
    leads = [max(g.terms, key=lambda e: _grevlex(e)) for g in X.ideal.groebner()]
    idx = [[vars.index(n) for n in grp] for grp in groups]

    def exps(k, bound):
        if k == 0:
            yield ()
            return
        for a in range(bound + 1):
            for rest in exps(k - 1, bound - a):
                yield (a,) + rest

    out = []
    for parts in product(*(list(exps(len(ix), b)) for ix, b in zip(idx, bounds))):
        e = [0] * len(vars)
        for ix, part in zip(idx, parts):
            for i, a in zip(ix, part):
                e[i] = a
        e = tuple(e)
        if any(all(x <= y for x, y in zip(lm, e)) for lm in leads):
            continue
        out.append(e)
        if len(out) > MAX_KERNEL_MONOMIALS:
            raise BudgetExceeded("kernel monomial", MAX_KERNEL_MONOMIALS)
    out.sort(key=_grevlex)
    return [Poly.monomial(vars, e) for e in out]


def _grevlex(e):
    return (sum(e),) + tuple(-k for k in reversed(e))


def kernel_search(d: Derivation, degree_bound: int = 4, base_bound: Optional[int] = None) -> List[Poly]:
    """Basis of invariants among standard monomial combinations.

    Variables split into those ``d`` kills (including constants) and the
    rest; each group's degree is bounded separately, the killed group by
    ``base_bound`` (default ``degree_bound``).  Returns normal forms.
    """
    if degree_bound < 1:
        raise ValueError("degree bound must be at least 1")
    X = d.scheme
    killed = [n for n in X.vars.names if d(X.var(n)).is_zero()]
    moving = [n for n in X.vars.names if n not in killed]
    monos = _standard_monomials(
        X, [killed, moving], [degree_bound if base_bound is None else base_bound, degree_bound]
    )
    columns = [d(m).terms for m in monos]
    basis = nullspace(columns)
    out = [poly_sum((monos[j] * c for j, c in vec.items()), X.vars) for vec in basis]
    out = [p.content_primitive()[1] for p in out]
    out.sort(key=lambda p: _grevlex(max(p.terms, key=_grevlex)))
    return out


def in_span(p: Poly, span: Sequence[Poly], X: Scheme) -> bool:
    """Whether ``p`` is a Q-linear combination of ``span`` modulo the ideal."""
    target = X.nf(p)
    cols = [X.nf(q).terms for q in span]
    return len(nullspace(cols + [target.terms])) > len(nullspace(cols))


def invariant_division(d: Derivation, numerator: PolyLike, divisor: PolyLike) -> Poly:
    """``p`` with ``numerator == divisor * p`` modulo the ideal; both inputs
    must be invariant, and so is the returned quotient when the divisor is a
    non-zero-divisor."""
    X = d.scheme
    num, den = X.poly(numerator), X.poly(divisor)
    for label, p in (("numerator", num), ("divisor", den)):
        if not is_invariant(d, p):
            raise CheckFailed(f"{label} is not invariant", **{label: p, "image": d(p)})
    if X.contains(den):
        raise CheckFailed("divisor is zero in the ring", divisor=den)
    J = Ideal(X.vars, [den] + list(X.ideal.gens))
    try:
        cof = J.lift(num)
    except NotInIdeal as exc:
        raise CheckFailed("not divisible", remainder=exc.remainder) from None
    q = X.nf(cof[0])
    if not X.equal(num, den * q):
        raise AssertionError("division certificate failed")
    return q
