"""Affine modifications ``A[J/f]`` presented by elimination from the Rees algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

from .constructions import FamilyParams, build_Y
from .ideal import Ideal, elimination_ideal, ideals_equal, saturate
from .polyring import Poly
from .report import CheckFailed, Report, reporting
from .scheme import PolyLike, Scheme, is_isomorphism, make_morphism, make_scheme


@dataclass
class ModificationData:
    base: Scheme
    center: Sequence[PolyLike]
    divisor: PolyLike
    names: Sequence[str] = field(default_factory=lambda: ("z",))

    def __post_init__(self):
        self.center = [self.base.poly(g) for g in self.center]
        self.divisor = self.base.poly(self.divisor)
        if self.divisor.is_zero():
            raise ValueError("divisor must be nonzero")
        if not (self.base.ideal + self.center).contains(self.divisor):
            raise CheckFailed("divisor is not in the center", divisor=self.divisor)

    def fractions(self) -> List[Poly]:
        """Center generators other than the divisor itself (up to scalars)."""
        f = self.divisor
        return [g for g in self.center
                if not g.is_zero() and not (g.is_constant() or _proportional(g, f))]


def _proportional(g: Poly, f: Poly) -> bool:
    return g.content_primitive()[1] == f.content_primitive()[1]


def _new_names(d: ModificationData, k: int) -> List[str]:
    names = list(d.names)[:k]
    vars = d.base.vars
    while len(names) < k:
        names.append(vars.fresh(f"z{len(names)}"))
    clash = [n for n in names if n in vars]
    if clash:
        raise ValueError(f"new variable names {clash} clash with the base")
    return names


def affine_modification(d: ModificationData, cross_check: bool = True) -> Scheme:
    """``base[g/f]``: eliminate ``upsilon`` from ``(1 - f*upsilon, Z_g - g*upsilon)``.

    With ``cross_check`` the result is compared with the ``f``-saturation of
    ``(f*Z_g - g)``.
    """
    X = d.base
    gs = d.fractions()
    if not gs:
        return X
    names = _new_names(d, len(gs))
    vars = X.vars.extend(names)
    ups = vars.fresh("upsilon")
    big = vars.extend([ups])
    U = Poly.var(big, ups)
    f = d.divisor.rebase(big)
    gens = [g.rebase(big) for g in X.ideal.gens] + [1 - f * U]
    gens += [Poly.var(big, z) - g.rebase(big) * U for z, g in zip(names, gs)]
    I = elimination_ideal(Ideal(big, gens), [ups]).with_vars(vars)
    if cross_check:
        lin = [g.rebase(vars) for g in X.ideal.gens]
        lin += [d.divisor.rebase(vars) * Poly.var(vars, z) - g.rebase(vars) for z, g in zip(names, gs)]
        J = saturate(Ideal(vars, lin), d.divisor.rebase(vars))
        if not ideals_equal(I, J):
            raise AssertionError("Rees elimination and saturation disagree")
    return Scheme(vars, I.groebner(), [], X.roots_of_unity, f"{X.name or 'A'}[J/f]")


def y_modification_data(p: FamilyParams) -> ModificationData:
    base = make_scheme(["x", "y", "t"] + list(p.params), params=p.params, name="A3")
    h = base.poly(p.h)
    g = base.poly(f"y^{p.m} - t^{p.r}") + base.var("x") * h
    f = base.poly(f"x^{p.n}")
    return ModificationData(base, [f, g], f, ("z",))


def verify_modification_is_Y(p: FamilyParams) -> Report:
    """The modification of affine 3-space along ``(x^n, y^m - t^r + x h)``
    with divisor ``x^n`` is ``Y(m,n,r,h)``; also checks ``f``-saturation and
    that both sides agree after inverting ``x``."""
    with reporting(f"modification(m={p.m},n={p.n},r={p.r},h={p.h})") as rep:
        d = y_modification_data(p)
        M = affine_modification(d)
        Y, _ = build_Y(p)
        rep.witnesses["presentation"] = list(M.ideal.gens)
        rep.check("equals_Y", ideals_equal(M.ideal, Y.ideal.with_vars(M.vars)))
        f = d.divisor.rebase(M.vars)
        rep.check("f_saturated", ideals_equal(saturate(M.ideal, f), M.ideal))
        Bx = d.base.localize("x")
        Mx = M.localize("x")
        g = d.fractions()[0].rebase(Bx.vars)
        into_M = make_morphism(Mx, Bx, {n: n for n in d.base.vars.names}, "A3_x->M_x")
        from_M = make_morphism(Bx, Mx, {"z": g * Bx.var("x_inv") ** p.n}, "M_x->A3_x")
        rep.absorb("localization_iso", is_isomorphism(into_M, from_M, "localization_iso"))
    return rep
