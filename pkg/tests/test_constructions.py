import pytest
import sympy

from lndkit import constructions as C
from lndkit.lnd import is_locally_nilpotent
from lndkit.report import ERROR, FAIL, PASS
from lndkit.scheme import make_scheme


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_Xm(m):
    rep = C.check_Xm(m)
    assert rep.status == PASS, rep.summary()


def test_build_validation():
    with pytest.raises(C.ParameterError):
        C.build_Xm(0)
    with pytest.raises(C.ParameterError):
        C.build_Xmnr(2, 1, 2)
    with pytest.raises(C.ParameterError):
        C.build_Y(C.FamilyParams(2, 1, 3))
    with pytest.raises(C.ParameterError):
        C.build_Y(C.FamilyParams(2, 2, 3, h="x"))


def test_Xmnr_reduces_to_Xm():
    X, d = C.build_Xmnr(3, 1, 1)
    Xm, dm, _ = C.build_Xm(3)
    assert X.ideal.groebner() == Xm.ideal.groebner()
    assert all(X.equal(d.images[k], dm.images[k]) for k in d.images)


@pytest.mark.parametrize("m, n, r", [(2, 1, 1), (2, 2, 3), (3, 1, 2)])
def test_Xmnr(m, n, r):
    assert C.check_Xmnr(m, n, r).status == PASS


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_P_closed_form_against_sympy(m):
    x, y, t = sympy.symbols("x y t")
    expected = sympy.expand(sympy.cancel(((x + t * y) ** m / x ** m - 1) / y))
    S = C.phi_source()
    P = C.P_closed_form(m, S.vars)
    got = sympy.sympify(str(P).replace("^", "**"), locals={"x_inv": 1 / x, "y": y, "t": t})
    assert sympy.simplify(got - expected) == 0


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_phi_trivialization(m):
    rep = C.phi_trivialization(m)
    assert rep.status == PASS, rep.summary()
    assert {"identity", "P_matches_series", "equivariant", "rank3"} <= set(rep.subchecks)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_fiber_ring_decomposition(m):
    rep = C.fiber_ring_decomposition(m)
    assert rep.status == PASS, rep.summary()


@pytest.mark.parametrize("m, n, r", [(2, 1, 1), (2, 2, 3), (3, 1, 2)])
def test_slice_charts(m, n, r):
    rep = C.slice_charts(m, n, r)
    assert rep.status == PASS, rep.summary()
    assert rep.subchecks["cocycle"] == PASS


def test_slice_transition_perturbation_breaks_cocycle():
    from lndkit.cech import cocycle_check

    c = C.slice_cover(3, 1, 2)
    i, j = sorted(c.transitions)[0]
    c.transitions[(i, j)] = c.transitions[(i, j)] + c.overlap(i, j).var("lam")
    assert cocycle_check(c).status == FAIL


FAMILY = [C.FamilyParams(2, 2, 3), C.FamilyParams(2, 2, 3, "1+a*t", ("a",)), C.FamilyParams(3, 2, 2)]


@pytest.mark.parametrize("p", FAMILY, ids=lambda p: p.label())
def test_Y_family(p):
    rep = C.check_Y(p)
    assert rep.status == PASS, rep.summary()
    Y, d = C.build_Y(p)
    assert is_locally_nilpotent(d).ok


@pytest.mark.parametrize("p", [C.FamilyParams(2, 2, 3), C.FamilyParams(3, 2, 2)], ids=lambda p: p.label())
def test_y_charts(p):
    rep = C.y_charts(p)
    assert rep.status == PASS, rep.summary()


def test_russell_alpha():
    rep = C.russell_alpha_check()
    assert rep.status == PASS, rep.summary()
    X, d, q = C.build_russell_alpha()
    z = rep.witnesses["z_q"]
    assert X.equal(X.poly("x^2") * z, q ** 2 - X.poly("t^3") + X.poly("x*(1+a*t)"))


@pytest.mark.parametrize("args", [(1, 1, 1, None), (2, 2, 3, None), (3, 1, 2, (3, 2, 1))])
def test_cylinder_splitting(args):
    rep = C.cylinder_splitting(*args)
    assert rep.status == PASS, rep.summary()


def test_group_twists():
    X = make_scheme(["lam"], roots_of_unity=("eps", 3))
    tw = C.eps_twist(X, "lam")
    assert tw.check().status == PASS
    assert X.equal(tw.power(3).images["lam"], "lam")
    assert C.mu_equivariance(tw.morphism, tw, tw).status == PASS
    assert C.mu_equivariance(tw.morphism, tw, C.trivial_twist(X, 2)).status == ERROR


def test_cylinder_needs_common_m():
    assert C.cylinder_splitting(3, 1, 2, (2, 1, 1)).status == ERROR
