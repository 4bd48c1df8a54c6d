import pytest

from lndkit.constructions import FamilyParams
from lndkit.ideal import ideals_equal, Ideal
from lndkit.modification import ModificationData, affine_modification, verify_modification_is_Y
from lndkit.report import CheckFailed, PASS
from lndkit.scheme import make_scheme


@pytest.mark.parametrize("p", [FamilyParams(2, 2, 3), FamilyParams(2, 2, 3, "1+a*t", ("a",)),
                               FamilyParams(3, 2, 2)], ids=lambda p: p.label())
def test_modification_is_Y(p):
    rep = verify_modification_is_Y(p)
    assert rep.status == PASS, rep.summary()
    assert {"equals_Y", "f_saturated", "localization_iso"} <= set(rep.subchecks)


def test_modification_without_linear_term():
    A = make_scheme(["x", "y", "t"])
    M = affine_modification(ModificationData(A, ["x^2", "y^3 - t^2"], "x^2"))
    expected = Ideal(M.vars, [M.poly("x^2*z - y^3 + t^2")])
    assert ideals_equal(M.ideal, expected)


def test_trivial_center_returns_base():
    A = make_scheme(["x", "y"])
    assert affine_modification(ModificationData(A, ["x^2", "3*x^2"], "x^2")) is A


def test_divisor_must_lie_in_center():
    A = make_scheme(["x", "y"])
    with pytest.raises(CheckFailed):
        ModificationData(A, ["x", "y"], "x + 1")


def test_plane_blowup_chart():
    A = make_scheme(["x", "y"])
    M = affine_modification(ModificationData(A, ["x", "y"], "x"))
    assert ideals_equal(M.ideal, Ideal(M.vars, [M.poly("x*z - y")]))
