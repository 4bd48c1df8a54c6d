import random

import pytest

from lndkit.ideal import (
    GREVLEX,
    LEX,
    BudgetExceeded,
    Ideal,
    NotInIdeal,
    block_order,
    budget,
    comaximal,
    elimination_ideal,
    ideals_equal,
    intersect,
    is_unit_mod,
    radical_member,
    s_polynomial,
    saturate,
    verify_groebner,
)
from lndkit.polyring import Poly, VarTable

from oracle import sympy_groebner

V = VarTable(("x", "y", "z"))


def I(*gens, vars=V):
    return Ideal(vars, [vars.parse(g) for g in gens])


def monic_set(basis):
    return {g.content_primitive()[1] for g in basis}


CASES = [
    ("x^2 - y", "x*y - z"),
    ("x^2*y - 1", "x*y^2 - x"),
    ("x^3 - 2*x*y", "x^2*y - 2*y^2 + x"),
    ("x*y*z - 1", "x + y + z", "x*y + y*z + x*z"),
    ("y^2 - x^3 - x", "z*y - 1"),
]


@pytest.mark.parametrize("gens", CASES)
@pytest.mark.parametrize("order, name", [(GREVLEX, "grevlex"), (LEX, "lex")])
def test_reduced_basis_matches_sympy(gens, order, name):
    G = I(*gens).groebner(order)
    assert verify_groebner(G, order) is None
    assert monic_set(G) == sympy_groebner([V.parse(g) for g in gens], V, name)


def test_normal_form_examples():
    J = I("x^2 - y", "y^2 - 1")
    assert J.normal_form(V.parse("x^4")).is_constant()
    assert J.contains(V.parse("x^4 - 1"))
    assert not J.contains(V.parse("x"))
    assert I("x", "y").normal_form(V.parse("x*y + z")) == V.parse("z")


def test_lift_certificate_and_not_in_ideal():
    J = I("x*y - 1", "y^2 - z")
    p = V.parse("x*z - y")
    cof = J.lift(p)
    assert sum((a * g for a, g in zip(cof, J.gens)), Poly(V)) == p
    with pytest.raises(NotInIdeal):
        J.lift(V.parse("x"))


def test_unit_ideal_and_unit_mod():
    assert I("x*y - 1", "x").is_unit()
    ok, inv = is_unit_mod(V.parse("x"), I("x*y - 1"))
    assert ok and I("x*y - 1").contains(inv * V.parse("x") - 1)
    assert is_unit_mod(V.parse("x"), I("x^2 - y"))[0] is False


def test_elimination_twisted_cubic():
    W = VarTable(("t", "x", "y", "z"))
    J = I("x - t", "y - t^2", "z - t^3", vars=W)
    E = elimination_ideal(J, ["t"])
    assert set(E.vars.names) == {"x", "y", "z"}
    assert ideals_equal(E, I("y - x^2", "z - x*y", "x*z - y^2", vars=E.vars))


def test_saturation():
    J = I("x*y", "x*z")
    S = saturate(J, V.parse("x"))
    assert ideals_equal(S, I("y", "z"))
    assert saturate(I("x*y - x", "x^2"), V.parse("x")).is_unit()
    assert ideals_equal(saturate(I("x^2*y", "x*z^2"), V.parse("x")), I("y", "z^2"))
    assert ideals_equal(saturate(J, V.parse("1")), J)


def test_intersection_and_comaximal():
    K = intersect(I("x"), I("y"))
    assert ideals_equal(K, I("x*y"))
    ok, (a, b) = comaximal(I("x"), I("x - 1"))
    assert ok and (a + b) == Poly.const(V, 1)
    assert I("x").contains(a) and I("x - 1").contains(b)
    assert comaximal(I("x"), I("x*y"))[0] is False


def test_radical_member():
    assert radical_member(V.parse("x"), I("x^3"))
    assert not radical_member(V.parse("y"), I("x^3"))


def test_block_order_eliminates_first():
    G = I("x - y^2", "z - x*y").groebner(block_order(["x"]))
    assert verify_groebner(G, block_order(["x"])) is None
    assert any(set(g.variables()) <= {"y", "z"} for g in G)


def test_s_polynomial_cancels_leading_terms():
    s = s_polynomial(V.parse("x^2 - y"), V.parse("x*y - z"))
    assert s == V.parse("x*z - y^2") or s == -V.parse("x*z - y^2")


def test_budget_exceeded():
    big = I("x^3 - 2*x*y*z + y^2", "y^3 - x*z^2 + 1", "z^3 - x^2*y + z")
    with budget(max_pairs=1):
        with pytest.raises(BudgetExceeded):
            Ideal(V, big.gens).groebner(LEX)
    with budget(max_terms=3):
        with pytest.raises(BudgetExceeded):
            Ideal(V, big.gens + (V.parse("x*y*z + x + y + z + 7"),)).groebner(LEX)


def test_determinism_of_bases():
    rng = random.Random(7)
    gens = [V.parse(g) for g in CASES[3]]
    orders = [list(gens) for _ in range(3)]
    for o in orders:
        rng.shuffle(o)
    results = [tuple(Ideal(V, o).groebner()) for o in orders]
    assert all(set(r) == set(results[0]) for r in results)


W = VarTable(("x", "y", "u", "v", "t", "Z", "upsilon"))


def test_reference_examples():
    def J(*g):
        return Ideal(W, [W.parse(s) for s in g])

    assert J("x^2 - y").normal_form(W.parse("x^2")) == W.parse("y")
    # x^2*v leads under grevlex, so y*u is already reduced
    assert J("x^2*v - y*u - 1").normal_form(W.parse("y*u")) == W.parse("y*u")
    assert J("x^2*v - y*u - 1").normal_form(W.parse("0")).is_zero()
    assert J("x^2 - y", "x").contains(W.parse("y"))
    assert not J("x", "y").contains(W.parse("1"))
    E = elimination_ideal(J("x - t", "y - t^2"), ["t"])
    assert ideals_equal(E, Ideal(E.vars, [E.vars.parse("y - x^2")]))
    R = elimination_ideal(J("1 - x^2*upsilon", "Z - (y^2 - t^3 + x)*upsilon"), ["upsilon"])
    assert ideals_equal(R, Ideal(R.vars, [R.vars.parse("x^2*Z - (y^2 - t^3 + x)")]))
    assert ideals_equal(saturate(J("x*y"), W.parse("x")), J("y"))
    assert ideals_equal(saturate(J("x^2*y"), W.parse("x")), J("y"))
    assert saturate(J("x^2"), W.parse("x")).is_unit()
    ok, inv = is_unit_mod(W.parse("x"), J("x*y - 1"))
    assert ok and inv == W.parse("y")
    assert is_unit_mod(W.parse("x"), J("x*y"))[0] is False
