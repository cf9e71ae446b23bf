from fractions import Fraction
from math import gcd

import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from surgerykit.forms import QuadraticForm, automorphisms, named_lattice
from surgerykit.linking import (
    LinkingForm, biso_orbits, boundary_automorphism_images, boundary_of_isometry, enumerate_isometries,
    identity_iso, linking_forms_isomorphic, min_generators, s_boundary,
)


def cyclic_isometry_count(n: int) -> int:
    """Units u mod 2n preserving the boundary of the rank one form with theta = n.

    Pairing 1/(2n) and refinement 1/(4n): u must satisfy u^2 = 1 mod 4n.
    """
    return sum(1 for u in range(2 * n) if gcd(u, 2 * n) == 1 and (u * u - 1) % (4 * n) == 0)


def upper(max_n=3):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=80, deadline=None)
@given(upper())
def test_boundary_order_is_the_determinant(rows):
    v = QuadraticForm.of(rows)
    det = int(sympy.Matrix(v.lam.tolist()).det())
    assume(det != 0)
    g = s_boundary(v)
    assert g.order == abs(det)
    for i in range(g.ngens):
        for j in range(g.ngens):
            assert g.pairing[i][j] == g.pairing[j][i]
        # refinement doubles to the pairing
        assert (2 * g.refinement[i] - g.pairing[i][i]) % 1 == 0


def test_rank_one_boundary_values():
    g = s_boundary(QuadraticForm.of([[15]]))
    assert g.factors == (30,)
    assert g.pairing == ((Fraction(1, 30),),)
    assert g.refinement == (Fraction(1, 60),)


def test_unimodular_boundary_is_trivial():
    g = s_boundary(named_lattice("E8"))
    assert g.order == 1 and g.factors == ()


def test_degenerate_boundary_rejected():
    with pytest.raises(ValueError):
        s_boundary(QuadraticForm.of([[0, 0], [0, 1]]))


def test_malformed_linking_forms_rejected():
    with pytest.raises(ValueError):
        LinkingForm((4, 2), ((Fraction(1, 4), 0), (0, Fraction(1, 2))), (0, 0))
    with pytest.raises(ValueError):
        LinkingForm((1,), ((0,),), (0,))


@pytest.mark.parametrize("n", [1, 3, 5, 6, 15, 21, 35])
def test_cyclic_isometry_count_matches_brute_force(n):
    g = s_boundary(QuadraticForm.of([[n]]))
    assert len(enumerate_isometries(g, g)) == cyclic_isometry_count(n)


@pytest.mark.parametrize("theta", [[[15]], [[105]], [[1, 1, 0], [0, 1, 1], [0, 0, 2]], "D5", "A4"])
def test_identity_lies_in_its_own_orbit(theta):
    v = named_lattice(theta) if isinstance(theta, str) else QuadraticForm.of(theta)
    res = biso_orbits(v, v)
    assert res.status == "Complete"
    ident = identity_iso(s_boundary(v))
    assert res.orbit_of(ident) == res.identity_orbit
    # each orbit is a coset of the image of the automorphism group
    sizes = {len(o) for o in res.orbits}
    assert len(sizes) == 1


def test_boundary_automorphism_images_are_valid():
    v = QuadraticForm.of([[1, 1, 0], [0, 1, 1], [0, 0, 2]])
    a = s_boundary(v)
    images = boundary_automorphism_images(v, a)
    assert all(g.is_valid() for g in images)
    keys = {g.key for g in images}
    for h in automorphisms(v):
        assert boundary_of_isometry(h, a, a).key in keys


def test_inverse_and_compose():
    g = s_boundary(QuadraticForm.of([[15]]))
    for f in enumerate_isometries(g, g):
        assert f.compose(f.inverse()).key == identity_iso(g).key
        assert f.negate().negate().key == f.key


def test_isomorphism_test_distinguishes_refinements():
    a = s_boundary(QuadraticForm.of([[3]]))
    b = s_boundary(QuadraticForm.of([[-3]]))
    assert not linking_forms_isomorphic(a, b)
    assert linking_forms_isomorphic(a, a)


def test_min_generators():
    assert min_generators((2, 6, 12), 2) == 3
    assert min_generators((2, 6, 12), 3) == 2
    assert min_generators((2, 6, 12), 5) == 0
