"""Decision layer for quasi-formations over Z and small fields.

Over Z the odd L-groups and the Whitehead group vanish, so the action of
L-groups on classes of quasi-formations is trivial and a class with
boundaries ``(v, v')`` is elementary exactly when its boundary-isomorphism
invariant is the identity class.  The procedures below either produce an
explicit verified witness or report ``Unknown``; they never assert
non-existence from a failed search.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_linear import (
    Matrix,
    Ring,
    _is_prime,
    complete_basis,
    direct_sum,
    hstack,
    is_primitive,
    kernel_basis,
    lll_gram,
    lll_reduce,
    reduce_modulo,
    solve,
)
from .formations import (
    BoundaryIso,
    ElementaryCertificate,
    QuasiFormation,
    VerificationError,
    b_invariant,
    boundary_of_asymmetric,
    direct_sum_qf,
    extend_boundary_iso,
    hamiltonian_complement,
    is_elementary_representative,
    is_lagrangian,
    lagrangian_complement_certificate,
    split_embedding,
    union,
)
from .forms import (
    NAMED_LATTICES,
    BudgetExceeded,
    QuadraticForm,
    _definite_sign,
    annihilator,
    arf_invariant,
    hyperbolic,
    hyperbolic_pair,
    is_isometric,
    named_lattice,
    positive_majorant,
    signature,
)
from .linking import (
    DEFAULT_ORDER_CAP,
    LinkingForm,
    LinkingIso,
    boundary_automorphism_images,
    boundary_of_isometry as linking_boundary_of_isometry,
    descend_iso,
    enumerate_isometries,
    linking_forms_isomorphic,
    min_generators,
    s_boundary,
)


def e_of(v: QuadraticForm) -> QuasiFormation:
    """The elementary class with both boundaries ``v``: the boundary of ``(V, theta)``."""
    return boundary_of_asymmetric(v.theta, v.eps)


def stabilize(x: QuasiFormation, k: int) -> QuasiFormation:
    """``x + e(H(R^k))``."""
    if k == 0:
        return x
    return direct_sum_qf(x, e_of(hyperbolic(k, x.eps, x.ring)))


# kappa ----------------------------------------------------------------------------------

@dataclass(frozen=True)
class KappaValue:
    eps: int
    value: int  # signature for eps = +1, Arf invariant for eps = -1
    glued: QuadraticForm

    def to_json(self) -> dict:
        kind = "signature" if self.eps == 1 else "arf"
        return {"epsilon": str(self.eps), "invariant": kind, "value": str(self.value)}


def kappa(f: BoundaryIso) -> KappaValue:
    """Glue ``v`` to ``-v'`` along ``f`` and read off the Witt class over Z."""
    v, w = f.source, f.target
    if not v.ring.is_integers:
        raise ValueError("kappa is implemented over Z")
    glued = union(v, -w, f)
    if v.eps == 1:
        sig = signature(glued.lam)
        if sig % 8:
            raise VerificationError(f"glued form has signature {sig}, not a multiple of 8")
        return KappaValue(1, sig, glued)
    return KappaValue(-1, arf_invariant(glued), glued)


# find a Lagrangian ----------------------------------------------------------------------

def find_lagrangian(m: QuadraticForm, box: int = 2, budget: int = 50_000) -> Matrix | None:
    """A Lagrangian of a simple form, built by splitting off hyperbolic pairs.

    Over Z each step first passes to a basis that is reduced for a positive
    definite majorant of the symmetrisation, so short vectors suffice.
    """
    if m.rank % 2:
        return None
    basis = Matrix.identity(m.rank, m.ring)
    cur = m
    es = []
    while cur.rank:
        if m.ring.is_integers and m.eps == 1:
            U = lll_gram(positive_majorant(cur.lam))
            cur = cur.pullback(U)
            basis = basis @ U
        pair = hyperbolic_pair(cur, box=box, budget=budget)
        if pair is None:
            return None
        e, f = pair
        es.append(basis @ Matrix.column(list(e), m.ring))
        P = Matrix([e, f], m.ring).T
        perp, cur = annihilator(cur, P)
        basis = basis @ perp.basis
    L = hstack(*es) if es else Matrix.zeros(m.rank, 0, m.ring)
    if not is_lagrangian(m, L):
        raise VerificationError("greedy Lagrangian failed verification")
    return L


# the delta invariant ------------------------------------------------------------------

IDENTITY_ORBIT = "IsIdentityOrbit"
NONTRIVIAL_ORBIT = "NontrivialOrbit"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class DeltaClass:
    """The class of the boundary isomorphism of ``x`` on linking forms.

    ``representative`` runs ``s_boundary(v) -> s_boundary(vprime)``.  When an
    isometry ``k: v -> vprime`` is known, ``normalized`` is ``d(k)^{-1}``
    composed with the representative, an automorphism of ``s_boundary(v)``
    whose orbit under boundary automorphisms decides the status.
    """

    v: QuadraticForm
    vprime: QuadraticForm
    representative: LinkingIso
    orbit_status: str
    isometry: Matrix | None = None
    normalized: LinkingIso | None = None
    note: str = ""

    def to_json(self) -> dict:
        out = {
            "status": self.orbit_status,
            "representative": self.representative.to_json(),
            "note": self.note,
        }
        if self.normalized is not None:
            out["normalized"] = self.normalized.to_json()
        return out


def delta_invariant(x: QuasiFormation, order_cap: int = DEFAULT_ORDER_CAP,
                    aut_cap: int = 100_000, jperp: Matrix | None = None) -> DeltaClass:
    """Boundary-isomorphism class of a quasi-formation over Z with eps = +1."""
    if not x.ring.is_integers or x.eps != 1:
        raise ValueError("delta is implemented for eps = +1 over Z")
    bp = b_invariant(x)
    v = bp.v
    if not v.is_nondegenerate:
        raise ValueError("boundary is degenerate; split off the radical first")
    se = split_embedding(x.form, x.V, jperp=jperp if jperp is not None else bp.Vperp)
    w = se.f_j.target
    a, b = s_boundary(v), s_boundary(w)
    rep = descend_iso(se.f_j.iso.alpha, v, w, a, b)
    if not rep.is_valid():
        raise VerificationError("descended boundary isomorphism is not an isometry")
    definite = _definite_sign(v) != 0 or v.rank == 0
    verdict = is_isometric(v, w)
    if verdict.status == "No":
        return DeltaClass(v, w, rep, NONTRIVIAL_ORBIT, note=f"boundaries differ: {verdict.witness}")
    if verdict.status != "Yes":
        return DeltaClass(v, w, rep, UNKNOWN, note="no isometry between the boundaries was found")
    k = verdict.isometry
    g = linking_boundary_of_isometry(k, a, b).inverse().compose(rep)
    if a.order == 1:
        return DeltaClass(v, w, rep, IDENTITY_ORBIT, k, g, note="boundary linking form is trivial")
    if not definite:
        if len(enumerate_isometries(a, b, order_cap)) == 1:
            return DeltaClass(v, w, rep, IDENTITY_ORBIT, k, g, note="a single linking isometry")
        return DeltaClass(v, w, rep, UNKNOWN, k, g, note="indefinite boundary: automorphisms not enumerated")
    try:
        images = boundary_automorphism_images(v, a, aut_cap)
    except BudgetExceeded as exc:
        return DeltaClass(v, w, rep, UNKNOWN, k, g, note=str(exc))
    if any(h.key == g.key for h in images):
        return DeltaClass(v, w, rep, IDENTITY_ORBIT, k, g)
    return DeltaClass(v, w, rep, NONTRIVIAL_ORBIT, k, g, note="outside the image of Aut(v)")


# stable isometry ---------------------------------------------------------------------

@dataclass(frozen=True)
class StableIsometryVerdict:
    status: str  # "Yes", "No" or "Unknown"
    k: int | None = None
    isometry: Matrix | None = None
    witness: str = ""

    def __bool__(self) -> bool:
        return self.status == "Yes"


def stably_isometric(v: QuadraticForm, w: QuadraticForm, stab_cap: int = 2,
                     budget: int = 200_000) -> StableIsometryVerdict:
    """Decide ``v + H(Z^k) = w + H(Z^k)`` for some ``k <= stab_cap``."""
    if v.rank != w.rank or v.eps != w.eps:
        return StableIsometryVerdict("No", witness=f"rank {v.rank} != {w.rank}")
    if v.ring.is_integers:
        if v.eps == 1:
            sv, sw = signature(v.lam), signature(w.lam)
            if sv != sw:
                return StableIsometryVerdict("No", witness=f"signature {sv} != {sw}")
        if v.is_nondegenerate and w.is_nondegenerate:
            if not linking_forms_isomorphic(s_boundary(v), s_boundary(w)):
                return StableIsometryVerdict("No", witness="boundary linking forms differ")
        elif v.is_nondegenerate != w.is_nondegenerate:
            return StableIsometryVerdict("No", witness="degeneracy differs")
    for k in range(stab_cap + 1):
        hk = hyperbolic(k, v.eps, v.ring)
        res = is_isometric(v.oplus(hk), w.oplus(hk), budget=budget)
        if res.status == "Yes":
            return StableIsometryVerdict("Yes", k, res.isometry)
        if res.status == "No" and k == 0 and v.ring.is_integers and v.eps == 1 and _definite_sign(v):
            continue
    return StableIsometryVerdict("Unknown", witness=f"no isometry found up to {stab_cap} hyperbolic planes")


def boundary_stable_isometry(x: QuasiFormation) -> tuple[int, Matrix]:
    """An explicit isometry ``v + H(Z^n) -> v' + H(Z^n)`` between the boundaries.

    Chains the splitting of ``x`` along ``V`` with the extension of the
    resulting boundary isomorphism and a Hamiltonian basis of the ambient form.
    """
    bp = b_invariant(x)
    se = split_embedding(x.form, x.V, jperp=bp.Vperp)
    ext = extend_boundary_iso(se.f_j, budget=0)
    v, w = se.v, se.f_j.target
    m = w.rank
    n = x.half_rank
    # ext.h : v + H(Z^m) -> w + glued, and r_j: glued -> M
    K = hamiltonian_complement(x.form, x.L)
    P = hstack(x.L, K)  # H(Z^n) -> M
    ring = x.ring
    to_h = direct_sum(Matrix.identity(w.rank, ring), P.inverse() @ se.r_j, ring=ring)
    h = to_h @ ext.h
    src = v.oplus(hyperbolic(m, x.eps, ring))
    tgt = w.oplus(hyperbolic(n, x.eps, ring))
    if not src.is_isometry_to(tgt, h):
        raise VerificationError("boundary stable isometry failed verification")
    return m, h


# strict cancellation -----------------------------------------------------------------

RULE_INDEFINITE = "Indefinite_i"
RULE_NAMED = "NamedLattice_ii"
RULE_PRIME = "PrimeRank1_iii"
RULE_UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CancellationVerdict:
    holds: bool
    rule: str
    evidence: tuple[str, ...] = ()
    isometry: Matrix | None = None

    def to_json(self) -> dict:
        return {"holds": self.holds, "rule": self.rule, "evidence": list(self.evidence)}


def _prime_divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def has_even_hyperbolic_summand(g: LinkingForm) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Elements ``x, y`` of order 2 with ``phi(x,x) = phi(y,y) = 0`` and ``phi(x,y) = 1/2``.

    Such a pair spans an orthogonal summand isomorphic to the symmetric
    linking form of ``lambda = [[0,2],[2,0]]``.
    """
    halves = [(0, d // 2) if d % 2 == 0 else (0,) for d in g.factors]
    two_torsion = [t for t in itertools.product(*halves) if any(t)]
    half = Fraction(1, 2)
    iso = [t for t in two_torsion if g.phi(t, t) == 0]
    for x, y in itertools.combinations(iso, 2):
        if g.phi(x, y) == half:
            return x, y
    return None


def strict_cancellation_check(v: QuadraticForm, order_cap: int = DEFAULT_ORDER_CAP) -> CancellationVerdict:
    """Sufficient criteria for strict cancellation of a nondegenerate form over Z, eps = +1.

    Strict cancellation for ``v`` and for ``-v`` are equivalent, so the
    rank-one and named-lattice rules also accept the negatives.
    """
    if not v.ring.is_integers or v.eps != 1:
        raise ValueError("strict cancellation criteria are for eps = +1 over Z")
    if not v.is_nondegenerate:
        raise ValueError("form is degenerate")
    n = v.rank
    ev: list[str] = []
    if n == 1:
        t = v.theta[0, 0]
        if _is_prime(abs(t)):
            sign = "" if t > 0 else " (negative of the form)"
            return CancellationVerdict(True, RULE_PRIME, (f"v = (Z, {t}) with |{t}| prime{sign}",))
        ev.append(f"rank one with theta = {t}, not a prime")
    sign = _definite_sign(v)
    if sign:
        det = v.det_lam()
        for name in NAMED_LATTICES:
            lat = named_lattice(name)
            if lat.rank != n or lat.det_lam() != abs(det):
                continue
            cand = v if sign > 0 else -v
            res = is_isometric(cand, lat)
            if res.status == "Yes":
                note = "" if sign > 0 else " after negation"
                return CancellationVerdict(True, RULE_NAMED, (f"isometric to {name}{note}",), res.isometry)
        ev.append("definite and not one of E8, E7, E6, D5, A4")
        return CancellationVerdict(False, RULE_UNKNOWN, tuple(ev))
    g = s_boundary(v)
    ev.append(f"indefinite, rank {n}, boundary group factors {list(g.factors)}")
    for p in _prime_divisors(g.order):
        if p == 2:
            continue
        lp = min_generators(g.factors, p)
        if n < lp + 2:
            ev.append(f"rank {n} < l_{p}(G) + 2 = {lp + 2}")
            return CancellationVerdict(False, RULE_UNKNOWN, tuple(ev))
        ev.append(f"rank {n} >= l_{p}(G) + 2 = {lp + 2}")
    l2 = min_generators(g.factors, 2)
    if n == l2:
        pair = has_even_hyperbolic_summand(g)
        if pair is None:
            ev.append(f"rank = l_2(G) = {l2} and no hyperbolic 2-torsion summand")
            return CancellationVerdict(False, RULE_UNKNOWN, tuple(ev))
        ev.append(f"rank = l_2(G) = {l2}; summand spanned by {list(pair[0])}, {list(pair[1])}")
    else:
        ev.append(f"rank {n} != l_2(G) = {l2}")
    return CancellationVerdict(True, RULE_INDEFINITE, tuple(ev))


# skew quasi-formations over Z ----------------------------------------------------------

@dataclass(frozen=True)
class SkewCertificate:
    K: Matrix  # a Lagrangian complement of V
    certificate: ElementaryCertificate
    corrected: bool  # whether w_1 was replaced by w_1 + v_1
    strategy: str  # "reduction" or "search"


def _mu(m: QuadraticForm, x: Sequence[int]) -> int:
    return m.norm(x) % 2


def _isotropic_dual_complement(x: QuasiFormation, tries: int = 200, seed: int = 0) -> Matrix | None:
    """``W`` with ``phi(V, W) = 1`` and ``phi|_W = 0``, built one column at a time.

    Column ``i`` is a solution of ``phi(V, w) = e_i`` and ``phi(w_l, w) = 0``
    for ``l < i``; the solution set is a coset of a lattice, and the column is
    chosen short (lattice reduction) and so that the columns so far stay
    primitive modulo ``V``, which keeps the next system solvable.
    """
    m = x.form
    V = x.V
    k = V.ncols
    phi = m.lam
    A = V.T @ phi
    P = solve(A, Matrix.identity(k))
    if P is None:
        return None
    N = lll_reduce(kernel_basis(A))
    C = complete_basis(V)
    Binv = hstack(V, C).inverse()
    rng = random.Random(seed)
    ws: list[Matrix] = []
    for i in range(k):
        p = P[:, i:i + 1]
        if ws:
            Wp = hstack(*ws)
            R = Wp.T @ phi @ N
            z0 = solve(R, -(Wp.T @ phi @ p))
            if z0 is None:
                return None
            free = N @ kernel_basis(R)
            w0 = p + N @ z0
        else:
            free = N
            w0 = p
        free = lll_reduce(free) if free.ncols else free
        w0 = reduce_modulo(w0, free)
        found = None
        for t in range(tries):
            if t == 0 or not free.ncols:
                w = w0
            else:
                span = 1 + t // 20
                w = w0 + free @ Matrix.column([rng.randint(-span, span) for _ in range(free.ncols)])
            quot = (Binv @ hstack(*ws, w))[k:, :]
            if is_primitive(quot):
                found = w
                break
            if not free.ncols:
                break
        if found is None:
            return None
        ws.append(found)
    W = hstack(*ws)
    if V.T @ phi @ W != Matrix.identity(k) or not (W.T @ phi @ W).is_zero():
        raise VerificationError("dual complement bookkeeping failed")
    return W


def _normalize_refinement(m: QuadraticForm, V: Matrix, W: Matrix) -> tuple[Matrix, Matrix]:
    """Change bases so that ``mu(w_i) = 1`` at most for ``i = 1``, keeping ``phi(V, W) = 1``."""
    k = W.ncols
    mus = [_mu(m, W.col(i)) for i in range(k)]
    if not any(mus):
        return V, W
    t = mus.index(1)
    E = [[0] * k for _ in range(k)]
    order = [t] + [i for i in range(k) if i != t]
    for new, old in enumerate(order):
        E[old][new] = 1
    for new, old in enumerate(order):
        if new and mus[old]:
            E[t][new] = -1
    Em = Matrix(E)
    W2 = W @ Em
    V2 = V @ Em.inverse().T
    return V2, W2


def _search_complement(x: QuasiFormation, box: int = 1, budget: int = 200_000) -> Matrix | None:
    """Brute-force search for a Lagrangian complement of ``V`` with small entries."""
    m = x.form
    n, k = m.rank, x.half_rank
    vecs = [t for t in itertools.product(range(-box, box + 1), repeat=n) if any(t)]
    vecs = [t for t in vecs if m.norm(t) % 2 == 0 or m.eps == 1]
    count = 0

    def rec(chosen: list[tuple[int, ...]], start: int):
        nonlocal count
        if len(chosen) == k:
            K = Matrix(chosen).T
            if is_lagrangian(m, K) and hstack(K, x.V).is_invertible():
                return K
            return None
        for idx in range(start, len(vecs)):
            count += 1
            if count > budget:
                raise BudgetExceeded("complement search budget exhausted")
            u = vecs[idx]
            if any(m.lam_value(u, c) for c in chosen):
                continue
            r = rec(chosen + [u], idx + 1)
            if r is not None:
                return r
        return None

    return rec([], 0)


def skew_elementary_certificate(x: QuasiFormation, box: int = 1, budget: int = 200_000) -> SkewCertificate:
    """A Lagrangian complement of ``V`` for a skew quasi-formation over Z.

    An isotropic complement ``W`` dual to ``V`` is built column by column;
    its refinement is normalised to vanish except on ``w_1``, and then
    ``w_1 + v_1`` replaces ``w_1``.  The refinement of ``v_1`` vanishes
    because the Arf invariant of ``span(v_1, w_1)`` equals that of the
    ambient form (zero, it has a Lagrangian) minus that of its complement
    (zero, it contains the Lagrangian spanned by the other ``w_i``).
    """
    if not x.ring.is_integers or x.eps != -1:
        raise ValueError("skew certificates are for eps = -1 over Z")
    m = x.form
    W = _isotropic_dual_complement(x)
    if W is not None:
        V2, W2 = _normalize_refinement(m, x.V, W)
        corrected = False
        if W2.ncols and _mu(m, W2.col(0)):
            v1, w1 = V2[:, 0:1], W2[:, 0:1]
            pair = m.restrict(hstack(v1, w1))
            if arf_invariant(pair) != 0 or _mu(m, v1.col(0)):
                raise VerificationError("refinement of v_1 does not vanish; basis bookkeeping is wrong")
            W2 = hstack(w1 + v1, W2[:, 1:])
            corrected = True
        cert = lagrangian_complement_certificate(x, W2)
        return SkewCertificate(W2, cert, corrected, "reduction")
    K = _search_complement(x, box=box, budget=budget)
    if K is None:
        raise VerificationError("no Lagrangian complement found by reduction or search")
    return SkewCertificate(K, lagrangian_complement_certificate(x, K), False, "search")


# finite fields --------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldVerdict:
    status: str  # "Yes" or "Unknown"
    certificate: ElementaryCertificate | None = None
    lagrangian: Matrix | None = None
    searched: int = 0


def _subspaces(n: int, k: int, ring: Ring):
    """All ``k``-dimensional subspaces of ``F^n`` as column bases (reduced echelon rows)."""
    p = ring.modulus
    for pivots in itertools.combinations(range(n), k):
        free = [(r, c) for r in range(k) for c in range(pivots[r] + 1, n) if c not in pivots]
        for vals in itertools.product(range(p), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for r, c in enumerate(pivots):
                rows[r][c] = 1
            for (r, c), a in zip(free, vals):
                rows[r][c] = a
            yield Matrix(rows, ring).T


def field_elementary_certificate(x: QuasiFormation, budget: int = 100_000) -> FieldVerdict:
    """Certify elementarity over a prime field by finding a Lagrangian complement of ``V``."""
    if not x.ring.is_field:
        raise ValueError("field certificates need a prime field")
    direct = is_elementary_representative(x)
    if direct:
        return FieldVerdict("Yes", direct.certificate, x.L, 0)
    n, k = x.form.rank, x.half_rank
    count = 0
    for K in _subspaces(n, k, x.ring):
        count += 1
        if count > budget:
            break
        if not hstack(K, x.V).is_invertible() or not is_lagrangian(x.form, K):
            continue
        return FieldVerdict("Yes", lagrangian_complement_certificate(x, K), K, count)
    return FieldVerdict("Unknown", searched=count)


# stabilisation -------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilizationCertificate:
    """Why ``x + e(H(Z^k))`` is elementary.

    ``kind`` is one of ``"representative"`` (the stabilised representative
    is already a boundary), ``"skew"`` (a Lagrangian complement),
    ``"delta"`` (definite boundaries with identity boundary class) or
    ``"cancellation"`` (strict cancellation for the stabilised boundary,
    with an explicit stable isometry between the two boundaries).
    """

    kind: str
    k: int
    elementary: ElementaryCertificate | None = None
    skew: SkewCertificate | None = None
    delta: DeltaClass | None = None
    cancellation: CancellationVerdict | None = None
    stable_isometry: tuple[int, Matrix] | None = None

    def verify(self, x: QuasiFormation) -> bool:
        y = stabilize(x, self.k)
        if self.kind == "representative":
            return self.elementary is not None and self.elementary.verify(y)
        if self.kind == "skew":
            s = self.skew
            return (s is not None and is_lagrangian(y.form, s.K) and hstack(s.K, y.V).is_invertible()
                    and s.certificate.verify(QuasiFormation(y.form, s.K, y.V)))
        if self.kind == "delta":
            d = delta_invariant(y)
            return d.orbit_status == IDENTITY_ORBIT
        if self.kind == "cancellation":
            bp = b_invariant(y)
            verdict = strict_cancellation_check(bp.v)
            if not verdict.holds or self.stable_isometry is None:
                return False
            m, h = self.stable_isometry
            v0 = b_invariant(x)
            src = v0.v.oplus(hyperbolic(m, x.eps, x.ring))
            tgt = v0.vperp.oplus(hyperbolic(x.half_rank, x.eps, x.ring))
            return src.is_isometry_to(tgt, h)
        return False

    def to_json(self) -> dict:
        out = {"kind": self.kind, "k": str(self.k)}
        if self.elementary is not None:
            out["rho"] = [[str(a) for a in r] for r in self.elementary.rho.rows]
        if self.skew is not None:
            out["lagrangian"] = [[str(a) for a in r] for r in self.skew.K.rows]
        if self.delta is not None:
            out["delta"] = self.delta.to_json()
        if self.cancellation is not None:
            out["cancellation"] = self.cancellation.to_json()
        return out


@dataclass(frozen=True)
class StabilizationResult:
    status: str  # "Yes" or "Unknown"
    k: int | None = None
    certificate: StabilizationCertificate | None = None
    note: str = ""


def stabilize_until_elementary(x: QuasiFormation, k_max: int = 3) -> StabilizationResult:
    """Least ``k <= k_max`` for which ``x + e(H(Z^k))`` is certified elementary."""
    if not x.ring.is_integers:
        raise ValueError("stabilisation is implemented over Z")
    stable_iso = None
    for k in range(k_max + 1):
        y = stabilize(x, k)
        direct = is_elementary_representative(y)
        if direct:
            cert = StabilizationCertificate("representative", k, elementary=direct.certificate)
            return StabilizationResult("Yes", k, cert)
        if x.eps == -1:
            sk = skew_elementary_certificate(y)
            return StabilizationResult("Yes", k, StabilizationCertificate("skew", k, skew=sk))
        bp = b_invariant(y)
        if not bp.v.is_nondegenerate:
            return StabilizationResult("Unknown", note="degenerate boundary")
        if k == 0 and _definite_sign(bp.v):
            d = delta_invariant(y)
            if d.orbit_status == IDENTITY_ORBIT:
                return StabilizationResult("Yes", 0, StabilizationCertificate("delta", 0, delta=d))
        verdict = strict_cancellation_check(bp.v)
        if verdict.holds:
            if stable_iso is None:
                stable_iso = boundary_stable_isometry(x)
            cert = StabilizationCertificate("cancellation", k, cancellation=verdict,
                                            stable_isometry=stable_iso)
            return StabilizationResult("Yes", k, cert)
    return StabilizationResult("Unknown", note=f"no certificate up to k = {k_max}")


# realising boundary isomorphisms ---------------------------------------------------------

@dataclass(frozen=True)
class Realization:
    """``x`` realises ``f``: its boundary class is ``-[f]``, in the orbit of ``[f]``.

    The sign is the boundary of ``-id``, the same one met by boundaries of
    asymmetric forms, whose splitting isomorphism is homotopic to ``d(-id)``.
    """

    x: QuasiFormation
    jperp: Matrix
    delta: DeltaClass
    target: LinkingIso

    @property
    def matches(self) -> bool:
        return self.delta.representative.key == self.target.negate().key


def realize_boundary_iso(f: BoundaryIso, box: int = 2, budget: int = 50_000) -> Realization | None:
    """A quasi-formation whose boundary isomorphism descends to that of ``f``.

    Glues ``v`` to ``-v'`` along ``f``; when the result has a Lagrangian the
    summand ``v`` of the union gives the quasi-formation.
    """
    v, w = f.source, f.target
    glued = union(v, -w, f)
    L = find_lagrangian(glued, box=box, budget=budget)
    if L is None:
        return None
    j, jp = _union_inclusions(v, -w, f)
    x = QuasiFormation(glued, L, j)
    d = delta_invariant(x, jperp=jp)
    target = descend_iso(f.iso.alpha, v, w)
    return Realization(x, jp, d, target)


def _union_inclusions(v: QuadraticForm, vprime: QuadraticForm, f: BoundaryIso) -> tuple[Matrix, Matrix]:
    from .formations import union_inclusions

    return union_inclusions(v, vprime, f)
