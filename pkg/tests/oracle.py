"""Independent reference computations (sympy) used only by the tests."""

import sympy

from lndkit.polyring import Poly, VarTable, format_poly


def to_sympy(p: Poly):
    syms = sympy.symbols(p.vars.names)
    env = dict(zip(p.vars.names, syms))
    return sympy.sympify(format_poly(p).replace("^", "**"), locals=env), syms


def from_sympy(expr, vars: VarTable) -> Poly:
    return vars.parse(str(sympy.expand(expr)).replace("**", "^"))


def sympy_groebner(polys, vars: VarTable, order: str = "grevlex"):
    syms = sympy.symbols(vars.names)
    env = dict(zip(vars.names, syms))
    exprs = [sympy.sympify(format_poly(p).replace("^", "**"), locals=env) for p in polys]
    G = sympy.groebner(exprs, *syms, order=order)
    return {from_sympy(g.as_expr(), vars).content_primitive()[1] for g in G.exprs}
