import pytest

from lndkit.report import FAIL, PASS
from lndkit.scheme import (
    SchemeError,
    WellDefinednessError,
    compose,
    cyclotomic,
    fiber_product,
    identity,
    is_isomorphism,
    make_morphism,
    make_scheme,
    smoothness_check,
)


@pytest.mark.parametrize("m, coeffs", [
    (1, [-1, 1]), (2, [1, 1]), (3, [1, 1, 1]), (4, [1, 0, 1]), (6, [1, -1, 1]), (12, [1, 0, -1, 0, 1]),
])
def test_cyclotomic(m, coeffs):
    assert cyclotomic(m) == coeffs


def test_root_of_unity_arithmetic():
    X = make_scheme(["x"], roots_of_unity=("e", 3))
    assert X.equal("e^3", 1)
    assert not X.contains("e - 1")
    assert X.unit_inverse("e - 1") is not None
    assert X.equal("1 + e + e^2", 0)
    assert "e" in X.constants


def test_sl2_smooth_and_cone_singular():
    sl2 = make_scheme(["a", "b", "c", "d"], ["a*d - b*c - 1"], name="SL2")
    rep = smoothness_check(sl2)
    assert rep.status == PASS and rep.witnesses["certificate"]
    cone = make_scheme(["x", "y", "z"], ["x^2 + y^2 - z^2"], name="cone")
    rep = smoothness_check(cone)
    assert rep.status == FAIL and "jacobian.singular_ideal" in rep.witnesses
    assert smoothness_check(sl2, codim=2).status != PASS


def test_localization_partners():
    X = make_scheme(["x", "y"], inverted=["x"])
    assert X.equal("x*x_inv", 1)
    assert X.unit_inverse("x^2") == X.poly("x_inv^2")
    Y = X.localize("y + 1")
    w = [n for n in Y.partners if n != "x_inv"][0]
    assert Y.equal(f"(y+1)*{w}", 1)
    assert make_scheme(["x"], ["x"]).localize("x").is_empty()


def test_morphism_auto_inverts_partner_images():
    A = make_scheme(["s"], inverted=["s"])
    B = make_scheme(["x"], inverted=["x"])
    f = make_morphism(A, B, {"x": "s^2"})
    assert A.equal(f.images["x_inv"], "s_inv^2")
    with pytest.raises(WellDefinednessError):
        make_morphism(make_scheme(["s"]), B, {"x": "s"})


def test_morphism_rejects_ideal_violation():
    circle = make_scheme(["x", "y"], ["x^2 + y^2 - 1"])
    line = make_scheme(["t"])
    with pytest.raises(WellDefinednessError) as info:
        make_morphism(line, circle, {"x": "t", "y": "1"})
    assert info.value.generator == circle.poly("x^2 + y^2 - 1")
    with pytest.raises(SchemeError):
        make_morphism(line, circle, {"q": "t"})


def test_isomorphism_and_composition():
    A = make_scheme(["x", "y"])
    f = make_morphism(A, A, {"x": "x + y^2", "y": "y"}, "f")
    g = make_morphism(A, A, {"x": "x - y^2", "y": "y"}, "g")
    assert is_isomorphism(f, g).status == PASS
    h = compose(f, f)
    assert A.equal(h.images["x"], "x + 2*y^2")
    rep = is_isomorphism(f, f)
    assert rep.status == FAIL and rep.witnesses["g.f=id.generator"] == "x"
    assert is_isomorphism(identity(A), identity(A)).ok


def test_fiber_product_of_lines_over_point():
    base = make_scheme(["s"])
    X = make_scheme(["x", "s"])
    f = make_morphism(X, base, {"s": "x^2"})
    P = fiber_product(f, f)
    assert P.renaming["x"] == "x_r"
    assert P.contains("x^2 - x_r^2")
    assert not P.contains("x - x_r")
    assert P.left.check_well_defined() is None and P.right.check_well_defined() is None
