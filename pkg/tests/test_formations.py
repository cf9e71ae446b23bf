import random

import pytest
from hypothesis import given, settings, strategies as st

from surgerykit.exact_linear import Matrix, vstack
from surgerykit.forms import QuadraticForm, hyperbolic, transvection
from surgerykit.formations import (
    BoundaryIso, Homotopy, QuasiFormation, VerificationError, b_invariant, boundary_iso_of_isometry,
    boundary_of_asymmetric, boundary_of_form, boundary_of_isometry, compose_iso, direct_sum_qf,
    extend_boundary_iso, homotopy_between, hyperbolic_splitting_iso, identity_boundary_iso, identity_iso,
    invert_iso, is_elementary_representative, is_lagrangian, normal_form_boundary_iso, split_embedding,
    standard_quasi_formation, t_flip, trivial_formation, union, verify_homotopy, verify_iso,
)

from generators import rand_embedding, rand_primitive, rand_transvection_data

seeds = st.integers(0, 10**6)


def test_boundary_formation_convention():
    v = QuadraticForm.of([[1, 2], [0, 3]])
    x = boundary_of_form(v)
    assert x.gamma == Matrix.identity(2) and x.mu == v.lam and x.eps == -1


@pytest.mark.parametrize("eps", [1, -1])
def test_hyperbolic_splitting_iso(eps):
    h = hyperbolic(2, eps)
    assert verify_iso(boundary_of_form(h), trivial_formation(4, -eps), hyperbolic_splitting_iso(h))


def test_split_formation_rejects_inconsistent_blocks():
    from surgerykit.formations import SplitFormation
    with pytest.raises(VerificationError):
        SplitFormation(Matrix([[1]]), Matrix([[1]]), Matrix([[0]]), 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_isometries_give_isomorphisms(seed):
    rng = random.Random(seed)
    m = hyperbolic(2, rng.choice([1, -1]))
    u, w, a = rand_transvection_data(rng, m)
    tau = transvection(m, u, w, a)
    x = boundary_of_form(m)
    f = boundary_iso_of_isometry(tau)
    assert verify_iso(x, x, f)
    assert verify_iso(x, x, compose_iso(f, invert_iso(f)))
    g = compose_iso(f, invert_iso(f))
    assert verify_homotopy(x, x, g, identity_iso(x), Homotopy(Matrix.zeros(4, 4)))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_gluing_is_unimodular_and_r_j_is_an_isometry(seed):
    m, j = rand_embedding(random.Random(seed), kmax=4)
    se = split_embedding(m, j)
    glued = union(se.v, se.vperp, se.f_j)
    assert abs(glued.lam.det()) == 1
    assert glued.is_isometry_to(m, se.r_j)
    assert se.f_j.verify()


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_extension_is_an_isometry_with_homotopy(seed):
    m, j = rand_embedding(random.Random(seed), kmax=3)
    f = split_embedding(m, j).f_j
    ext = extend_boundary_iso(f)
    assert ext.source.is_isometry_to(ext.target, ext.h)
    assert abs(ext.h.det()) == 1
    assert ext.witness is not None and ext.witness.verify()


@pytest.mark.parametrize("eps", [1, -1])
def test_standard_summand_gives_boundary_of_minus_identity(eps):
    # the coordinate summand of H(Z^2) splits with f_j homotopic to the boundary of -1
    m = hyperbolic(2, eps)
    se = split_embedding(m, vstack(Matrix.identity(2), Matrix.zeros(2, 2)))
    minus = BoundaryIso(se.v, se.f_j.target, boundary_iso_of_isometry(Matrix.identity(2).scale(-1)))
    w = homotopy_between(se.f_j, minus)
    assert w is not None and w.verify()


@pytest.mark.parametrize("rho", [[[3]], [[0, 1], [0, 0]], [[2, -1], [1, 1]]])
@pytest.mark.parametrize("eps", [1, -1])
def test_boundary_of_asymmetric_splits_to_minus_identity(rho, eps):
    rho = Matrix(rho)
    x = boundary_of_asymmetric(rho, eps)
    k = rho.nrows
    jperp = vstack(Matrix.identity(k), rho.T.scale(-eps))
    sigma = vstack(Matrix.zeros(k, k), Matrix.identity(k))
    se = split_embedding(x.form, x.V, jperp, sigma)
    minus = BoundaryIso(se.v, se.f_j.target, boundary_iso_of_isometry(Matrix.identity(k).scale(-1)))
    assert homotopy_between(se.f_j, minus) is not None


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_homotopy_is_reflexive_and_padding_invariant(seed):
    m, j = rand_embedding(random.Random(seed), kmax=3)
    f = split_embedding(m, j).f_j
    w = homotopy_between(f, f)
    assert w is not None and w.verify()
    w2 = homotopy_between(f.pad(2), f)
    assert w2 is not None and w2.verify()


def test_normal_form_of_isometry_boundary():
    v = QuadraticForm.of([[1, 1], [0, 2]])
    f = identity_boundary_iso(v)
    nf = normal_form_boundary_iso(f)
    assert nf.a == Matrix.identity(2)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([1, -1]))
def test_transvection_laws(seed, eps):
    rng = random.Random(seed)
    m = hyperbolic(3, eps)
    u, w, a = rand_transvection_data(rng, m)
    t1 = transvection(m, u, w, a)
    # inverse
    assert transvection(m, u, [-x for x in w], m.lam_value(w, w) - a) @ t1 == Matrix.identity(6)
    # composition with the same isotropic vector
    while True:
        w2 = [rng.randint(-2, 2) for _ in range(6)]
        if m.lam_value(u, w2) == 0:
            break
    a2 = m.norm(w2)
    t2 = transvection(m, u, w2, a2)
    ws = [p + q for p, q in zip(w, w2)]
    assert transvection(m, u, ws, a2 + m.lam_value(w2, w) + a) == t2 @ t1
    # homotopy to the identity
    x = boundary_of_form(m)
    U, W = Matrix.column(u), Matrix.column(w)
    delta = (U @ W.T).scale(-eps) + W @ U.T + (U @ U.T).scale(a)
    f = boundary_iso_of_isometry(t1)
    assert verify_homotopy(x, x, f, identity_iso(x), Homotopy(delta))
    assert verify_homotopy(x, x, identity_iso(x), f, Homotopy(-delta))


def test_quasi_formation_validation():
    m = hyperbolic(1, 1)
    with pytest.raises(ValueError):
        QuasiFormation(m, Matrix([[1], [1]]), Matrix([[1], [0]]))  # L not isotropic
    with pytest.raises(ValueError):
        QuasiFormation(m, Matrix([[1], [0]]), Matrix([[2], [0]]))  # V not a summand


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([1, -1]))
def test_quasi_formation_json_round_trip(seed, eps):
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    x = standard_quasi_formation(rand_primitive(rng, 2 * k, k), eps)
    y = QuasiFormation.from_json(x.to_json())
    assert y == x


def test_elementary_representatives():
    # a graph over L is elementary; L itself as V is elementary via the shift relation
    x = standard_quasi_formation(Matrix([[1], [3]]), 1)
    assert is_elementary_representative(x)
    y = standard_quasi_formation(Matrix([[1], [0]]), 1)
    v = is_elementary_representative(y)
    assert v and v.certificate.verify(y)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([1, -1]))
def test_boundaries_of_asymmetric_forms_are_elementary(seed, eps):
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    rho = Matrix([[rng.randint(-3, 3) for _ in range(k)] for _ in range(k)])
    x = boundary_of_asymmetric(rho, eps)
    v = is_elementary_representative(x)
    assert v and v.certificate.verify(x)
    bp = b_invariant(x)
    assert bp.v.rank == k and is_lagrangian(x.form, x.L)


def test_flip_and_sum():
    x = standard_quasi_formation(Matrix([[1], [2]]), 1)
    y = direct_sum_qf(x, t_flip(x))
    assert y.half_rank == 2
    assert b_invariant(t_flip(x)).v.rank == 1


def test_boundary_iso_from_isometry():
    v = QuadraticForm.of([[3]])
    f = boundary_of_isometry(v, v, Matrix([[-1]]))
    assert f.verify() and f.inverse().verify() and f.then(f).verify()
