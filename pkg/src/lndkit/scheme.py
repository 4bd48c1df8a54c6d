"""Affine schemes as presented quotient rings, and morphisms between them.

A :class:`Scheme` is ``Q[vars] / I``.  Localizations are realized by a
partner variable ``w`` and the relation ``f*w - 1``; inverting a variable
``x`` uses the partner name ``x_inv``.  A primitive m-th root of unity is a
constant-layer variable cut out by the m-th cyclotomic polynomial.

Morphisms are stored as comorphisms: one image per target variable, written
over the source variables.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .ideal import Ideal, is_unit_mod
from .polyring import Poly, VarTable
from .report import CheckFailed, Report, reporting

PolyLike = Union[Poly, str, int, Fraction]


class SchemeError(ValueError):
    pass


class WellDefinednessError(CheckFailed):
    """A map does not send the target ideal into the source ideal."""

    def __init__(self, generator: Poly, normal_form: Poly, what: str = "morphism"):
        self.generator = generator
        self.normal_form = normal_form
        super().__init__(
            f"{what} is not well defined on generator {generator}",
            generator=generator,
            normal_form=normal_form,
        )


def cyclotomic(m: int) -> List[int]:
    """Integer coefficients (constant term first) of the m-th cyclotomic
    polynomial."""
    if m < 1:
        raise ValueError("cyclotomic index must be positive")
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _exact_div(num, cyclotomic(d))
    return num


def _exact_div(a: List[int], b: List[int]) -> List[int]:
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        q[i] = c
        for j, bj in enumerate(b):
            a[i + j] -= c * bj
    if any(a):
        raise ArithmeticError("inexact cyclotomic division")
    return q


def inverse_name(var: str) -> str:
    return f"{var}_inv"


class Scheme:
    """Spectrum of ``Q[vars]/I`` with Laurent partners and optional root of unity."""

    def __init__(
        self,
        vars: VarTable,
        relations: Iterable[Poly] = (),
        localizations: Iterable[Tuple[str, Poly]] = (),
        roots_of_unity: Optional[Tuple[str, int]] = None,
        name: str = "",
    ):
        self.vars = vars
        self.name = name
        self.relations: Tuple[Poly, ...] = tuple(r.rebase(vars) for r in relations)
        self.localizations: Tuple[Tuple[str, Poly], ...] = tuple(
            (w, f.rebase(vars)) for w, f in localizations
        )
        self.roots_of_unity = roots_of_unity
        for w, _ in self.localizations:
            vars.index(w)
        gens = list(self.relations)
        for w, f in self.localizations:
            gens.append(f * Poly.var(vars, w) - 1)
        if roots_of_unity is not None:
            eps, m = roots_of_unity
            e = Poly.var(vars, eps)
            gens.append(sum((e ** k * c for k, c in enumerate(cyclotomic(m)) if c), Poly(vars)))
        self.ideal = Ideal(vars, gens)

    # -- queries ------------------------------------------------------------
    def __repr__(self) -> str:
        label = f"{self.name}: " if self.name else ""
        return f"Scheme({label}{', '.join(self.vars.names)} / {self.ideal})"

    @property
    def partners(self) -> Dict[str, Poly]:
        return dict(self.localizations)

    @property
    def constants(self) -> Tuple[str, ...]:
        """Variables any k-derivation must kill: parameters and the root of unity."""
        c = set(self.vars.params)
        if self.roots_of_unity:
            c.add(self.roots_of_unity[0])
        return tuple(n for n in self.vars.names if n in c)

    def ambient(self) -> Tuple[str, ...]:
        """Variables that are neither localization partners nor constants."""
        skip = set(self.partners) | set(self.constants)
        return tuple(n for n in self.vars.names if n not in skip)

    def poly(self, p: PolyLike) -> Poly:
        if isinstance(p, Poly):
            return p.rebase(self.vars) if p.vars != self.vars else p
        if isinstance(p, str):
            return self.vars.parse(p)
        return Poly.const(self.vars, p)

    def var(self, name: str) -> Poly:
        return Poly.var(self.vars, name)

    def nf(self, p: PolyLike) -> Poly:
        return self.ideal.normal_form(self.poly(p))

    def contains(self, p: PolyLike) -> bool:
        return self.nf(p).is_zero()

    def equal(self, a: PolyLike, b: PolyLike) -> bool:
        return self.contains(self.poly(a) - self.poly(b))

    def unit_inverse(self, p: PolyLike) -> Optional[Poly]:
        ok, inv = is_unit_mod(self.poly(p), self.ideal)
        return inv if ok else None

    def is_empty(self) -> bool:
        return self.ideal.is_unit()

    # -- derived schemes ----------------------------------------------------
    def _rebuilt(self, vars=None, relations=None, localizations=None, name=None) -> "Scheme":
        vars = vars or self.vars
        return Scheme(
            vars,
            relations if relations is not None else self.relations,
            localizations if localizations is not None else self.localizations,
            self.roots_of_unity,
            self.name if name is None else name,
        )

    def with_relations(self, extra: Iterable[PolyLike], name: str = None) -> "Scheme":
        """Closed subscheme cut out by extra relations."""
        return self._rebuilt(relations=self.relations + tuple(self.poly(p) for p in extra), name=name)

    def with_variables(self, names: Iterable[str], params: Iterable[str] = (), name: str = None) -> "Scheme":
        """Product with affine space in the new variables."""
        return self._rebuilt(vars=self.vars.extend(names, params), name=name)

    def localize(self, element: PolyLike, partner: str = None, name: str = None) -> "Scheme":
        """Principal open subset where ``element`` is invertible."""
        f = self.poly(element)
        if partner is None:
            vs = f.variables()
            if len(f) == 1 and len(vs) == 1 and f == self.var(vs[0]):
                partner = inverse_name(vs[0])
            else:
                partner = self.vars.fresh("w_loc")
        if partner in self.partners:
            if self.partners[partner] != f:
                raise SchemeError(f"partner {partner!r} already inverts {self.partners[partner]}")
            return self
        vars = self.vars.extend([partner])
        return Scheme(
            vars,
            [r.rebase(vars) for r in self.relations],
            [(w, e.rebase(vars)) for w, e in self.localizations] + [(partner, f.rebase(vars))],
            self.roots_of_unity,
            self.name if name is None else name,
        )

    def localize_many(self, items: Mapping[str, PolyLike]) -> "Scheme":
        X = self
        for w, f in items.items():
            X = X.localize(f, partner=w)
        return X


def make_scheme(
    vars: Union[VarTable, Sequence[str]],
    generators: Iterable[PolyLike] = (),
    inverted: Iterable[str] = (),
    roots_of_unity: Optional[Tuple[str, int]] = None,
    params: Iterable[str] = (),
    name: str = "",
) -> Scheme:
    """Build a scheme; each inverted variable gets a partner ``<x>_inv``."""
    if not isinstance(vars, VarTable):
        vars = VarTable(tuple(vars), frozenset(params))
    elif params:
        vars = VarTable(vars.names, vars.params | frozenset(params))
    inverted = list(inverted)
    for x in inverted:
        if x not in vars:
            raise SchemeError(f"inverted variable {x!r} is not a variable of the scheme")
    extra = [inverse_name(x) for x in inverted]
    if roots_of_unity is not None:
        eps, m = roots_of_unity
        if m < 1:
            raise SchemeError("root of unity order must be positive")
        extra.append(eps)
    full = vars.extend(extra, [roots_of_unity[0]] if roots_of_unity else ())
    rels = [g if isinstance(g, Poly) else full.parse(g) if isinstance(g, str) else Poly.const(full, g)
            for g in generators]
    locs = [(inverse_name(x), Poly.var(full, x)) for x in inverted]
    return Scheme(full, rels, locs, roots_of_unity, name)


def affine_space(names: Sequence[str], params: Iterable[str] = (), name: str = "") -> Scheme:
    return make_scheme(names, params=params, name=name)


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------


class Morphism:
    """``source -> target`` given by the comorphism on target variables."""

    def __init__(self, source: Scheme, target: Scheme, images: Mapping[str, Poly], name: str = ""):
        self.source = source
        self.target = target
        self.images: Dict[str, Poly] = dict(images)
        self.name = name
        self._certificates = None

    def __repr__(self) -> str:
        body = ", ".join(f"{k} -> {v}" for k, v in self.images.items())
        return f"Morphism({self.name or ''}: {body})"

    def pullback(self, p: PolyLike) -> Poly:
        p = self.target.poly(p)
        return p.subs(self.images, self.source.vars)

    def check_well_defined(self) -> None:
        for g in self.target.ideal.gens:
            r = self.source.nf(self.pullback(g))
            if not r.is_zero():
                raise WellDefinednessError(g, r)

    def certificates(self) -> Dict[str, List[Poly]]:
        """Cofactors expressing each pulled-back target generator in the
        source ideal."""
        if self._certificates is None:
            self._certificates = {
                str(g): self.source.ideal.lift(self.pullback(g)) for g in self.target.ideal.gens
            }
        return self._certificates


def make_morphism(
    source: Scheme,
    target: Scheme,
    images: Mapping[str, PolyLike],
    name: str = "",
    check: bool = True,
) -> Morphism:
    """Certified morphism.  Target variables without an image default to the
    same-named source variable; partner images are solved as inverses."""
    imgs: Dict[str, Poly] = {}
    for k, v in images.items():
        if k not in target.vars:
            raise SchemeError(f"{k!r} is not a variable of the target")
        imgs[k] = source.poly(v)
    partners = target.partners
    for n in target.vars.names:
        if n in imgs or n in partners:
            continue
        if n in source.vars:
            imgs[n] = source.var(n)
        else:
            raise SchemeError(f"no image given for target variable {n!r}")
    for w, f in partners.items():
        if w in imgs:
            continue
        pf = f.subs(imgs, source.vars) if f.variables() else f.rebase(source.vars)
        inv = source.unit_inverse(pf)
        if inv is None:
            raise WellDefinednessError(f * target.var(w) - 1, source.nf(pf), "morphism (non-unit image)")
        imgs[w] = inv
    phi = Morphism(source, target, {n: imgs[n] for n in target.vars.names}, name)
    if check:
        phi.check_well_defined()
    return phi


def identity(X: Scheme) -> Morphism:
    return Morphism(X, X, {n: X.var(n) for n in X.vars.names}, "id")


def same_presentation(X: Scheme, Y: Scheme) -> bool:
    return X.vars.names == Y.vars.names and X.ideal.groebner() == Y.ideal.with_vars(X.vars).groebner()


def compose(f: Morphism, g: Morphism) -> Morphism:
    """``f o g`` for ``g: X -> Y`` and ``f: Y -> Z``."""
    if g.target.vars.names != f.source.vars.names:
        raise SchemeError("cannot compose: target of g differs from source of f")
    images = {n: g.pullback(p.rebase(g.target.vars)) for n, p in f.images.items()}
    return Morphism(g.source, f.target, images, f"{f.name}.{g.name}" if f.name or g.name else "")


def is_isomorphism(f: Morphism, g: Morphism, name: str = "is_isomorphism") -> Report:
    """Pass iff ``g o f`` and ``f o g`` fix every variable modulo the ideals."""
    with reporting(name) as rep:
        for label, h, X in (("g.f=id", compose(g, f), f.source), ("f.g=id", compose(f, g), g.source)):
            bad = [
                n for n in X.vars.names
                if not X.equal(h.images[n], X.var(n))
            ]
            witness = {"generator": bad[0], "image": X.nf(h.images[bad[0]])} if bad else {}
            rep.check(label, not bad, **witness)
    return rep


class FiberProduct(Scheme):
    """``X x_S Y`` with its two projections and the renaming of the right
    factor's colliding variables."""

    left: Morphism
    right: Morphism
    renaming: Dict[str, str]


def fiber_product(f: Morphism, g: Morphism, suffix: str = "_r", name: str = "") -> FiberProduct:
    """Fiber product over an affine base.

    The left factor keeps its names; colliding right-factor names get
    ``suffix``; each base variable contributes ``f*(s) - g*(s)``.
    Constants shared by both factors (parameters, the root of unity) are
    identified rather than renamed.
    """
    X, Y, S = f.source, g.source, f.target
    if g.target.vars.names != S.vars.names:
        raise SchemeError("fiber product needs a common base")
    shared_consts = set(X.constants) & set(Y.constants)
    if X.roots_of_unity and Y.roots_of_unity and X.roots_of_unity != Y.roots_of_unity:
        raise SchemeError("factors use different roots of unity")
    renaming = {}
    for n in Y.vars.names:
        if n in shared_consts:
            renaming[n] = n
            continue
        new = n
        while new in X.vars or new in renaming.values():
            new = new + suffix
        renaming[n] = new
    fresh = [renaming[n] for n in Y.vars.names if renaming[n] not in X.vars]
    vars = X.vars.extend(fresh, [renaming[n] for n in Y.vars.params])
    ren = {n: Poly.var(vars, renaming[n]) for n in Y.vars.names}
    rels = [r.rebase(vars) for r in X.relations]
    rels += [r.subs(ren, vars) for r in Y.relations]
    for s in S.vars.names:
        rels.append(f.images[s].rebase(vars) - g.images[s].subs(ren, vars))
    locs = [(w, e.rebase(vars)) for w, e in X.localizations]
    locs += [(renaming[w], e.subs(ren, vars)) for w, e in Y.localizations]
    rou = X.roots_of_unity or (
        (renaming[Y.roots_of_unity[0]], Y.roots_of_unity[1]) if Y.roots_of_unity else None
    )
    P = FiberProduct(vars, rels, locs, rou, name)
    P.renaming = renaming
    P.left = Morphism(P, X, {n: P.var(n) for n in X.vars.names}, "pr1")
    P.right = Morphism(P, Y, {n: P.var(renaming[n]) for n in Y.vars.names}, "pr2")
    return P


# ---------------------------------------------------------------------------
# Smoothness
# ---------------------------------------------------------------------------


def determinant(rows: List[List[Poly]]) -> Poly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = Poly(rows[0][0].vars)
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        term = rows[0][j] * determinant([r[:j] + r[j + 1:] for r in rows[1:]])
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobian_minors(polys: Sequence[Poly], names: Sequence[str], size: int) -> List[Poly]:
    jac = [[p.diff(n) for n in names] for p in polys]
    out = []
    for rows in combinations(range(len(polys)), size):
        for cols in combinations(range(len(names)), size):
            d = determinant([[jac[r][c] for c in cols] for r in rows])
            if not d.is_zero():
                out.append(d)
    return out


def smoothness_check(X: Scheme, codim: Optional[int] = None, certify: bool = True,
                     name: str = None) -> Report:
    """Jacobian criterion for a complete-intersection presentation: smooth iff
    ``1`` lies in the ideal plus the maximal minors of the Jacobian."""
    gens = list(X.ideal.gens)
    with reporting(name or f"smooth({X.name or 'X'})") as rep:
        if codim is None:
            codim = len(gens)
        if codim != len(gens):
            raise SchemeError(
                f"declared codimension {codim} differs from the {len(gens)} defining equations"
            )
        minors = jacobian_minors(gens, X.vars.names, codim) if codim else [Poly.const(X.vars, 1)]
        J = X.ideal + minors
        smooth = J.is_unit()
        rep.witnesses["minors"] = len(minors)
        if smooth and certify:
            cof = J.lift(Poly.const(X.vars, 1))
            rep.witnesses["certificate"] = {str(g): c for g, c in zip(J.gens, cof) if not c.is_zero()}
        if not smooth:
            rep.check("jacobian", False, singular_ideal=list(J.groebner()))
        else:
            rep.check("jacobian", True)
    return rep
