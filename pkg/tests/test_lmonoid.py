import random

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from surgerykit.exact_linear import GF, Matrix, hstack
from surgerykit.forms import QuadraticForm, _definite_sign, automorphisms, hyperbolic, is_isometric, named_lattice, transvection
from surgerykit.formations import (
    BoundaryIso, FormationIso, QuasiFormation, b_invariant, boundary_of_isometry, is_elementary_representative,
    split_embedding, standard_quasi_formation,
)
from surgerykit.linking import descend_iso
from surgerykit.lmonoid import (
    IDENTITY_ORBIT, NONTRIVIAL_ORBIT, RULE_INDEFINITE, RULE_NAMED, RULE_PRIME, RULE_UNKNOWN, _subspaces,
    boundary_stable_isometry, delta_invariant, e_of, field_elementary_certificate, find_lagrangian, kappa,
    realize_boundary_iso, skew_elementary_certificate, stabilize, stabilize_until_elementary,
    strict_cancellation_check,
)

from generators import definite_boundary_instances, rand_quasi_formation, stabilization_corpus

seeds = st.integers(0, 10**6)

# the rank one quasi-formation whose boundaries are (Z, 15) but whose boundary class is not trivial
NONTRIVIAL = QuasiFormation(QuadraticForm.of([[15, 0], [11, 2]]), Matrix([[1], [-3]]), Matrix([[1], [0]]))


# kappa ---------------------------------------------------------------------------------

def test_kappa_of_the_odd_skew_identity_is_one():
    v = QuadraticForm.of([[1]], -1)
    one = Matrix([[1]])
    f = BoundaryIso(v, v, FormationIso(one, one, one))
    assert f.verify()
    k = kappa(f)
    assert k.eps == -1 and k.value == 1


@pytest.mark.parametrize("theta", [[[3]], [[15]], [[1, 1], [0, 2]], [[1, 1, 0], [0, 1, 1], [0, 0, 2]]])
def test_kappa_vanishes_on_isometry_boundaries(theta):
    v = QuadraticForm.of(theta)
    for h in automorphisms(v)[:8]:
        assert kappa(boundary_of_isometry(v, v, h)).value == 0


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([1, -1]))
def test_kappa_vanishes_on_split_embeddings(seed, eps):
    x = rand_quasi_formation(random.Random(seed), random.Random(seed).randint(1, 3), eps)
    f = split_embedding(x.form, x.V).f_j
    assert kappa(f).value == 0


# delta ---------------------------------------------------------------------------------

def test_delta_detects_a_nontrivial_class():
    d = delta_invariant(NONTRIVIAL)
    assert d.orbit_status == NONTRIVIAL_ORBIT
    assert d.representative.is_valid()


def test_delta_of_elementary_classes_is_trivial():
    for theta in ([[3]], [[15]], [[1, 1], [0, 2]]):
        x = e_of(QuadraticForm.of(theta))
        assert delta_invariant(x).orbit_status == IDENTITY_ORBIT


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(seeds)
def test_delta_and_elementary_agree_on_definite_instances(seed):
    x = definite_boundary_instances(seed, 1)[0]
    d = delta_invariant(x)
    if is_elementary_representative(x):
        assert d.orbit_status == IDENTITY_ORBIT
    if d.orbit_status == NONTRIVIAL_ORBIT:
        assert not is_elementary_representative(x)


def test_padding_does_not_change_the_descended_class():
    # duplicates padded by trivial formations descend to the same linking isometry
    for x in definite_boundary_instances(11, 8):
        f = split_embedding(x.form, x.V).f_j
        base = descend_iso(f.iso.alpha, f.source, f.target).key
        for p in (1, 2):
            g = f.pad(p)
            assert descend_iso(g.iso.alpha, g.source, g.target).key == base


def _fixing_transvection(x: QuasiFormation, rng: random.Random):
    """An isometry of the ambient form fixing ``V`` pointwise, or None."""
    m = x.form
    Vp = b_invariant(x).Vperp
    r = Vp.ncols
    for _ in range(400):
        cu = [rng.randint(-2, 2) for _ in range(r)]
        cw = [rng.randint(-2, 2) for _ in range(r)]
        u, w = Vp.apply(cu), Vp.apply(cw)
        if not any(u) or m.norm(u) != 0 or m.lam_value(u, w) != 0:
            continue
        try:
            return transvection(m, u, w, m.norm(w))
        except ValueError:
            continue
    return None


def test_action_fixing_v_preserves_invariants():
    # moving L by an isometry that fixes V keeps b, delta and the elementarity verdict
    rng = random.Random(5)
    checked = 0
    for x in stabilization_corpus(seed=3, size=12):
        y = stabilize(x, 1)
        tau = _fixing_transvection(y, rng)
        if tau is None:
            continue
        moved = QuasiFormation(y.form, tau @ y.L, y.V)
        b0, b1 = b_invariant(y), b_invariant(moved)
        assert b0.v == b1.v and b0.vperp == b1.vperp
        d0, d1 = delta_invariant(y), delta_invariant(moved)
        assert d0.orbit_status == d1.orbit_status
        r0, r1 = stabilize_until_elementary(y, 2), stabilize_until_elementary(moved, 2)
        assert r0.status == r1.status
        checked += 1
    assert checked >= 5


# e_of ----------------------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([1, -1]))
def test_e_of_is_a_section_of_b(seed, eps):
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    v = QuadraticForm(Matrix([[rng.randint(-3, 3) for _ in range(k)] for _ in range(k)]), eps)
    bp = b_invariant(e_of(v))
    assert bp.v.equals(v)
    if eps == 1 and v.is_nondegenerate and _definite_sign(v):
        assert is_isometric(bp.vperp, v)


# realisation ---------------------------------------------------------------------------

@settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(seeds)
def test_kappa_zero_isomorphisms_are_realised(seed):
    x = definite_boundary_instances(seed, 1)[0]
    f = split_embedding(x.form, x.V).f_j
    assert kappa(f).value == 0
    r = realize_boundary_iso(f)
    assert r is not None and r.matches
    assert r.x.form.restrict(r.x.V).equals(f.source)


@pytest.mark.parametrize("theta", [[[15]], [[3]], [[1, 1], [0, 2]]])
def test_isometry_boundaries_are_realised(theta):
    v = QuadraticForm.of(theta)
    for h in automorphisms(v)[:6]:
        r = realize_boundary_iso(boundary_of_isometry(v, v, h))
        assert r is not None and r.matches


def test_find_lagrangian_on_hyperbolic_sum():
    m = hyperbolic(3, 1)
    L = find_lagrangian(m)
    assert L is not None and L.ncols == 3


# strict cancellation ---------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5, 7, -5])
def test_prime_rank_one(p):
    v = strict_cancellation_check(QuadraticForm.of([[p]]))
    assert v.holds and v.rule == RULE_PRIME


@pytest.mark.parametrize("n", [1, 15])
def test_non_prime_rank_one_is_unknown(n):
    assert strict_cancellation_check(QuadraticForm.of([[n]])).rule == RULE_UNKNOWN


@pytest.mark.parametrize("name", ["E8", "E7", "E6", "D5", "A4"])
def test_named_lattices(name):
    v = strict_cancellation_check(named_lattice(name))
    assert v.holds and v.rule == RULE_NAMED


def test_indefinite_rule():
    v = QuadraticForm.of([[1]]).oplus(hyperbolic(1, 1))
    verdict = strict_cancellation_check(v)
    assert verdict.holds and verdict.rule == RULE_INDEFINITE
    assert strict_cancellation_check(QuadraticForm.of([[0, 2], [0, 0]])).rule == RULE_INDEFINITE
    assert not strict_cancellation_check(QuadraticForm.of([[3, 0], [0, -3]])).holds


def test_cancellation_verdict_json():
    doc = strict_cancellation_check(QuadraticForm.of([[5]])).to_json()
    assert doc["holds"] is True and doc["rule"] == "PrimeRank1_iii"


# skew case -----------------------------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(seeds)
def test_skew_quasi_formations_are_elementary(seed):
    rng = random.Random(seed)
    x = rand_quasi_formation(rng, rng.randint(1, 4), -1, bound=5)
    c = skew_elementary_certificate(x)
    y = QuasiFormation(x.form, c.K, x.V)
    assert hstack(c.K, x.V).is_invertible()
    assert c.certificate.verify(y)


def test_skew_small_examples():
    for V in ([[1], [1]], [[1], [0]], [[0], [1]]):
        x = standard_quasi_formation(Matrix(V), -1)
        c = skew_elementary_certificate(x)
        assert c.certificate.verify(QuasiFormation(x.form, c.K, x.V))


def test_skew_rejects_symmetric_input():
    with pytest.raises(ValueError):
        skew_elementary_certificate(standard_quasi_formation(Matrix([[1], [1]]), 1))


# fields --------------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("eps", [1, -1])
def test_field_rank_one_sweep(p, eps):
    R = GF(p)
    for V in _subspaces(2, 1, R):
        x = standard_quasi_formation(V, eps, R)
        r = field_elementary_certificate(x)
        assert r.status == "Yes"


def test_subspace_enumeration_counts():
    # Gaussian binomials: [4 choose 2]_3 = 130, [2 choose 1]_2 = 3
    assert sum(1 for _ in _subspaces(4, 2, GF(3))) == 130
    assert sum(1 for _ in _subspaces(2, 1, GF(2))) == 3


# stabilisation ---------------------------------------------------------------------------

def test_stabilization_on_a_corpus_sample():
    for x in stabilization_corpus(seed=7, size=10):
        r = stabilize_until_elementary(x, 3)
        assert r.status == "Yes" and r.k <= 3
        assert r.certificate.verify(x)


def test_nontrivial_class_needs_one_stabilization():
    r = stabilize_until_elementary(NONTRIVIAL, 3)
    assert r.status == "Yes" and r.k == 1 and r.certificate.kind == "cancellation"
    assert r.certificate.verify(NONTRIVIAL)


def test_boundary_stable_isometry():
    m, h = boundary_stable_isometry(NONTRIVIAL)
    bp = b_invariant(NONTRIVIAL)
    src = bp.v.oplus(hyperbolic(m, 1))
    tgt = bp.vperp.oplus(hyperbolic(1, 1))
    assert src.is_isometry_to(tgt, h)


def test_skew_stabilization_is_immediate():
    x = standard_quasi_formation(Matrix([[2], [1]]), -1)
    r = stabilize_until_elementary(x, 3)
    assert r.status == "Yes" and r.k == 0 and r.certificate.verify(x)
