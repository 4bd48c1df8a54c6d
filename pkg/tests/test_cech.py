from lndkit.cech import CoverDatum, coboundary_report, coboundary_solve, cocycle_check, punctured_plane
from lndkit.report import FAIL, PASS
from lndkit.scheme import make_scheme


def test_trivial_class_has_coboundary():
    c = punctured_plane("x_inv - y_inv")
    h = coboundary_solve(c, 6, 6)
    assert h is not None
    O = c.overlap(0, 1)
    assert O.equal(h[1].rebase(O.vars) - h[0].rebase(O.vars), "x_inv - y_inv")


def test_nontrivial_class_has_none_within_bounds():
    c = punctured_plane("x_inv*y_inv")
    assert coboundary_solve(c, 6, 6) is None
    assert coboundary_report(c, 6, 6, expect=False).status == PASS
    assert coboundary_report(c, 6, 6, expect=True).status == FAIL


def test_cocycle_conditions_on_three_charts():
    A = make_scheme(["x", "y", "z"])
    c = CoverDatum(A, ["x", "y", "z"])
    c.set_transition(0, 1, "y_inv - x_inv")
    c.set_transition(1, 2, "z_inv - y_inv")
    c.set_transition(0, 2, "z_inv - x_inv")
    rep = cocycle_check(c)
    assert rep.status == PASS and rep.witnesses["triples"] == 1
    h = coboundary_solve(c, 1, 1)
    assert h is not None
    c.set_transition(0, 2, "z_inv")
    rep = cocycle_check(c)
    assert rep.status == FAIL and rep.witnesses["triple[0,1,2].triple"] == [0, 1, 2]


def test_antisymmetry_is_checked():
    A = make_scheme(["x", "y"])
    c = CoverDatum(A, ["x", "y"])
    c.set_transition(0, 1, "x_inv")
    c.set_transition(1, 0, "x_inv")
    assert cocycle_check(c).status == FAIL
    assert c.transition(1, 0) is not None
