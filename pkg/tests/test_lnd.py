import pytest

from lndkit.lnd import (
    check_action_axioms,
    check_equivariant,
    compare_radical,
    exp_action,
    fixed_locus,
    in_span,
    invariant_division,
    is_invariant,
    is_locally_nilpotent,
    iterate,
    kernel_search,
    make_derivation,
    nilpotency_degree,
)
from lndkit.report import CheckFailed, FAIL, PASS
from lndkit.scheme import SchemeError, WellDefinednessError, make_morphism, make_scheme


@pytest.fixture
def X2():
    return make_scheme(["x", "y", "u", "v"], ["x^2*v - y*u - 1"], name="X2")


@pytest.fixture
def d2(X2):
    return make_derivation(X2, {"x": "y", "u": "2*x*v", "y": 0, "v": 0}, "d2")


def test_nilpotency_degrees(d2):
    assert nilpotency_degree(d2, "x") == 2
    assert nilpotency_degree(d2, "u") == 3
    assert nilpotency_degree(d2, "y") == 1
    assert nilpotency_degree(d2, "0") == 0
    assert len(iterate(d2, "u")) == 3
    rep = is_locally_nilpotent(d2)
    assert rep.status == PASS and rep.witnesses["degrees"]["u"] == 3


def test_non_nilpotent_derivation_exceeds_cap():
    A = make_scheme(["x", "y"])
    euler = make_derivation(A, {"x": "x", "y": "y"})
    assert nilpotency_degree(euler, "x", cap=10) is None
    rep = is_locally_nilpotent(euler, cap=10)
    assert rep.status == FAIL
    assert rep.witnesses["degrees"]["x"] == "exceeded(10)"


def test_ill_defined_derivation_is_rejected(X2):
    with pytest.raises(WellDefinednessError) as info:
        make_derivation(X2, {"x": "y", "u": "x*v", "y": 0, "v": 0})
    assert info.value.generator == X2.poly("x^2*v - y*u - 1")
    with pytest.raises(SchemeError):
        make_derivation(X2, {"x": "y", "u": "2*x*v", "y": 0})


def test_derivation_on_localization_forces_partner_image():
    A = make_scheme(["x", "y"], inverted=["x"])
    d = make_derivation(A, {"x": "x^2", "y": 0})
    assert A.equal(d("x_inv"), -1)
    assert d.check_well_defined() is None


def test_constants_are_killed():
    A = make_scheme(["x", "a"], params=["a"], roots_of_unity=("e", 3))
    d = make_derivation(A, {"x": "a*e"})
    assert d("a").is_zero() and d("e").is_zero()
    with pytest.raises(SchemeError):
        make_derivation(A, {"x": 1, "a": 1})


def test_exp_action_axioms(d2):
    a = exp_action(d2)
    assert a.comorphism().check_well_defined() is None
    rep = check_action_axioms(a)
    assert rep.status == PASS and set(rep.subchecks) >= {"unit", "coassociative"}


def test_corrupted_coaction_fails_with_witness(d2):
    a = exp_action(d2)
    bad = a.with_image("u", a.images["u"] + a.product.poly("T^2"))
    rep = check_action_axioms(bad)
    assert rep.status == FAIL
    assert any(k.endswith("generator") for k in rep.witnesses)


def test_kernel_search_is_k_y_v(d2, X2):
    found = kernel_search(d2, 3)
    assert len(found) == 10
    for p in found:
        assert is_invariant(d2, p)
    for mono in ["1", "y", "v", "y^2", "y*v", "v^2", "y^3", "y^2*v", "y*v^2", "v^3"]:
        assert in_span(X2.poly(mono), found, X2)
    assert not in_span(X2.poly("x"), found, X2)


def test_fixed_locus(d2):
    assert fixed_locus(d2).is_unit()
    Y = make_scheme(["x", "y", "z", "t"], ["x^2*z - y^2 + t^3 - x"])
    d = make_derivation(Y, {"x": 0, "y": "x^2", "z": "2*y", "t": 0})
    assert compare_radical(fixed_locus(d), ["x", "y", "t"]).status == PASS
    assert compare_radical(fixed_locus(d), ["x", "y"]).status == FAIL


def test_invariant_division():
    A = make_scheme(["x", "y"])
    d = make_derivation(A, {"x": 0, "y": "x"})
    assert A.equal(invariant_division(d, "x^3 + x^2", "x^2"), "x + 1")
    with pytest.raises(CheckFailed):
        invariant_division(d, "x + 1", "x^2")
    with pytest.raises(CheckFailed):
        invariant_division(d, "y*x", "x")


def test_equivariance(d2, X2):
    A = make_scheme(["s", "y", "v"])
    dA = make_derivation(A, {"s": 1, "y": 0, "v": 0})
    bad = make_morphism(X2, A, {"s": "x", "y": "y", "v": "v"})
    assert check_equivariant(bad, d2, dA).status == FAIL
    ok = make_morphism(A.localize("y"), X2.localize("y"),
                       {"x": "s*y", "y": "y", "v": "v", "u": "(s^2*y^2*v - 1)*y_inv"}, check=True)
    dAy = make_derivation(ok.source, {"s": 1, "y": 0, "v": 0})
    dXy = make_derivation(ok.target, {"x": "y", "u": "2*x*v", "y": 0, "v": 0})
    assert check_equivariant(ok, dAy, dXy).status == PASS
