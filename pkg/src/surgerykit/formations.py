"""Split formations, their isomorphisms and homotopies, gluing and splitting.

Conventions.  The boundary of an ``eps``-quadratic form ``(K, psi)`` is a
split formation whose own epsilon is ``-eps``; the object records the
formation epsilon.  Every ``Q``-equality for a formation of epsilon ``e``
is taken in ``Q_{-e}``, which for boundaries is the form's ``Q_eps``.
Matrices act on column vectors and the dual of a map is its transpose.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .exact_linear import (
    ZZ,
    Matrix,
    Ring,
    block,
    complete_basis,
    direct_sum,
    hstack,
    is_primitive,
    kernel_basis,
    solve,
    vstack,
)
from .forms import QuadraticForm, annihilator, hyperbolic, q_epsilon_equal


class VerificationError(ValueError):
    """A constructed object failed its defining identities."""


def _I(n: int, ring: Ring = ZZ) -> Matrix:
    return Matrix.identity(n, ring)


def _Z(r: int, c: int, ring: Ring = ZZ) -> Matrix:
    return Matrix.zeros(r, c, ring)


# split formations ------------------------------------------------------------

@dataclass(frozen=True)
class SplitFormation:
    """``(F, ((gamma, mu), theta) G)`` with formation epsilon ``eps``."""

    gamma: Matrix  # G -> F
    mu: Matrix  # G -> F*
    theta: Matrix  # representative in Q_{-eps}(G)
    eps: int

    def __post_init__(self):
        f, g = self.gamma.shape
        if self.mu.shape != (f, g) or self.theta.shape != (g, g):
            raise ValueError("split formation blocks have inconsistent shapes")
        lhs = self.gamma.T @ self.mu
        rhs = self.theta - self.theta.T.scale(self.eps)
        if lhs != rhs:
            raise VerificationError("gamma^T mu != theta - eps theta^T")
        if g and not is_primitive(vstack(self.gamma, self.mu)):
            raise VerificationError("(gamma, mu) is not a split embedding")

    @property
    def ring(self) -> Ring:
        return self.gamma.ring

    @property
    def f_rank(self) -> int:
        return self.gamma.nrows

    @property
    def g_rank(self) -> int:
        return self.gamma.ncols

    def oplus(self, other: "SplitFormation") -> "SplitFormation":
        if other.eps != self.eps:
            raise ValueError("direct sum needs equal epsilon")
        return SplitFormation(
            direct_sum(self.gamma, other.gamma, ring=self.ring),
            direct_sum(self.mu, other.mu, ring=self.ring),
            direct_sum(self.theta, other.theta, ring=self.ring),
            self.eps,
        )


def boundary_of_form(v: QuadraticForm) -> SplitFormation:
    """The boundary formation of ``v``: ``gamma = 1``, ``mu = lambda``, ``theta = psi``."""
    n = v.rank
    return SplitFormation(_I(n, v.ring), v.lam, v.theta, -v.eps)


def trivial_formation(rank: int, eps: int, ring: Ring = ZZ) -> SplitFormation:
    """``(P, P*)`` with ``gamma = 0``, ``mu = 1``, ``theta = 0``."""
    return SplitFormation(_Z(rank, rank, ring), _I(rank, ring), _Z(rank, rank, ring), eps)


def stabilized_boundary(v: QuadraticForm, p: int) -> SplitFormation:
    return boundary_of_form(v).oplus(trivial_formation(p, -v.eps, v.ring))


# isomorphisms and homotopies ----------------------------------------------------

@dataclass(frozen=True)
class FormationIso:
    alpha: Matrix  # F -> F'
    beta: Matrix  # G -> G'
    nu: Matrix  # representative in Q_{-eps}(F*)

    def oplus(self, other: "FormationIso") -> "FormationIso":
        r = self.alpha.ring
        return FormationIso(direct_sum(self.alpha, other.alpha, ring=r),
                            direct_sum(self.beta, other.beta, ring=r),
                            direct_sum(self.nu, other.nu, ring=r))

    def to_json(self) -> dict:
        return {k: [[str(x) for x in row] for row in getattr(self, k).rows] for k in ("alpha", "beta", "nu")}


@dataclass(frozen=True)
class Homotopy:
    delta: Matrix  # G* -> F'


def iso_defects(x: SplitFormation, y: SplitFormation, f: FormationIso) -> list[str]:
    """The failing conditions among the isomorphism axioms (empty if valid)."""
    a, b, nu = f.alpha, f.beta, f.nu
    if a.shape != (y.f_rank, x.f_rank) or b.shape != (y.g_rank, x.g_rank) or nu.shape != (x.f_rank, x.f_rank):
        return ["shape mismatch"]
    if x.eps != y.eps:
        return ["epsilon mismatch"]
    out = []
    if not (a.is_invertible() and b.is_invertible()):
        return ["alpha or beta is not invertible"]
    e = x.eps
    ait = a.inverse().T
    if a @ x.gamma + a @ (nu - nu.T.scale(e)).T @ x.mu != y.gamma @ b:
        out.append("(a) alpha gamma + alpha (nu - eps nu^T)^T mu != gamma' beta")
    if ait @ x.mu != y.mu @ b:
        out.append("(b) alpha^{-T} mu != mu' beta")
    if not q_epsilon_equal(x.theta + x.mu.T @ nu @ x.mu, b.T @ y.theta @ b, -e):
        out.append("(c) theta + mu^T nu mu != beta^T theta' beta")
    return out


def verify_iso(x: SplitFormation, y: SplitFormation, f: FormationIso) -> bool:
    return not iso_defects(x, y, f)


def homotopy_defects(x: SplitFormation, y: SplitFormation, f: FormationIso, g: FormationIso,
                     h: Homotopy) -> list[str]:
    d = h.delta
    if d.shape != (y.f_rank, x.g_rank):
        return ["shape mismatch"]
    e = x.eps
    out = []
    if g.beta.inverse().T - f.beta.inverse().T != y.mu.T @ d:
        out.append("(a) beta'^{-T} - beta^{-T} != mu'^T Delta")
    if g.alpha - f.alpha != d @ x.mu.T:
        out.append("(b) alpha' - alpha != Delta mu^T")
    lhs = g.alpha @ g.nu @ g.alpha.T - f.alpha @ f.nu @ f.alpha.T
    rhs = (g.alpha @ x.gamma).scale(e) @ d.T + d @ x.theta @ d.T
    if not q_epsilon_equal(lhs, rhs, -e):
        out.append("(c) alpha' nu' alpha'^T - alpha nu alpha^T != (eps alpha' gamma + Delta theta) Delta^T")
    return out


def verify_homotopy(x: SplitFormation, y: SplitFormation, f: FormationIso, g: FormationIso,
                    h: Homotopy) -> bool:
    """Whether ``h`` is a homotopy ``f ~ g`` of isomorphisms ``x -> y``."""
    return not homotopy_defects(x, y, f, g, h)


def identity_iso(x: SplitFormation) -> FormationIso:
    r = x.ring
    return FormationIso(_I(x.f_rank, r), _I(x.g_rank, r), _Z(x.f_rank, x.f_rank, r))


def compose_iso(g: FormationIso, f: FormationIso) -> FormationIso:
    """``g o f`` (``f`` first)."""
    ai = f.alpha.inverse()
    return FormationIso(g.alpha @ f.alpha, g.beta @ f.beta, f.nu + ai @ g.nu @ ai.T)


def invert_iso(f: FormationIso) -> FormationIso:
    return FormationIso(f.alpha.inverse(), f.beta.inverse(), -(f.alpha @ f.nu @ f.alpha.T))


def boundary_iso_of_isometry(h: Matrix) -> FormationIso:
    n = h.nrows
    return FormationIso(h, h, _Z(n, n, h.ring))


def hyperbolic_splitting_iso(m: QuadraticForm) -> FormationIso:
    """``(1, phi, -phi^{-T} psi phi^{-1})`` from the boundary of a simple form to ``(M, M*)``."""
    phi = m.lam
    pi = phi.inverse()
    return FormationIso(_I(m.rank, m.ring), phi, -(pi.T @ m.theta @ pi))


# boundary isomorphisms in block form -------------------------------------------------

@dataclass(frozen=True)
class BoundaryIso:
    """An isomorphism ``d(source) + (P, P*) -> d(target) + (P', P'*)``."""

    source: QuadraticForm
    target: QuadraticForm
    iso: FormationIso

    @property
    def eps(self) -> int:
        return self.source.eps

    @property
    def p(self) -> int:
        return self.iso.alpha.ncols - self.source.rank

    @property
    def p_target(self) -> int:
        return self.iso.alpha.nrows - self.target.rank

    def source_formation(self) -> SplitFormation:
        return stabilized_boundary(self.source, self.p)

    def target_formation(self) -> SplitFormation:
        return stabilized_boundary(self.target, self.p_target)

    def defects(self) -> list[str]:
        if self.source.eps != self.target.eps:
            return ["epsilon mismatch"]
        if self.p < 0 or self.p_target < 0:
            return ["stabilisation ranks are negative"]
        return iso_defects(self.source_formation(), self.target_formation(), self.iso)

    def verify(self) -> bool:
        return not self.defects()

    def checked(self) -> "BoundaryIso":
        d = self.defects()
        if d:
            raise VerificationError("; ".join(d))
        return self

    def pad(self, extra: int) -> "BoundaryIso":
        """Add the identity of a trivial formation of rank ``extra``."""
        if extra == 0:
            return self
        r = self.source.ring
        triv = FormationIso(_I(extra, r), _I(extra, r), _Z(extra, extra, r))
        return BoundaryIso(self.source, self.target, self.iso.oplus(triv))

    def then(self, g: "BoundaryIso") -> "BoundaryIso":
        """``g o self``; stabilisations must match."""
        return BoundaryIso(self.source, g.target, compose_iso(g.iso, self.iso))

    def inverse(self) -> "BoundaryIso":
        return BoundaryIso(self.target, self.source, invert_iso(self.iso))


def boundary_of_isometry(v: QuadraticForm, w: QuadraticForm, h: Matrix) -> BoundaryIso:
    if not v.is_isometry_to(w, h):
        raise VerificationError("h is not an isometry")
    return BoundaryIso(v, w, boundary_iso_of_isometry(h))


def identity_boundary_iso(v: QuadraticForm) -> BoundaryIso:
    return BoundaryIso(v, v, boundary_iso_of_isometry(_I(v.rank, v.ring)))


@dataclass(frozen=True)
class NormalForm:
    a: Matrix  # V -> V'
    a1: Matrix  # P -> V'
    a3: Matrix  # P -> P'
    b: Matrix  # V' -> V
    b1: Matrix  # P'* -> V
    s: Matrix  # representative in Q_eps(V'*)


def normal_form_boundary_iso(f: BoundaryIso) -> NormalForm:
    """Block components of a boundary isomorphism, with all six identities checked."""
    f.checked()
    v, w = f.source, f.target
    n, m = v.rank, w.rank
    eps = v.eps
    al, be = f.iso.alpha, f.iso.beta
    bi = be.inverse()
    ana = al @ f.iso.nu @ al.T
    a, a1, a3 = al[:m, :n], al[:m, n:], al[m:, n:]
    b, b1 = bi[:n, :m], bi[:n, m:]
    s = ana[:m, :m]
    lam, lam2 = v.lam, w.lam
    th, th2 = v.theta, w.theta
    ring = v.ring
    errs = []
    if al != block([[a, a1], [(b1.T @ lam).scale(eps), a3]]):
        errs.append("alpha block form")
    if bi != block([[b, b1], [a1.T @ lam2, a3.T]]):
        errs.append("beta^{-1} block form")
    want = block([[s, -(a @ b1).scale(eps)], [_Z(al.nrows - m, m, ring), -(b1.T @ th @ b1)]])
    if not q_epsilon_equal(ana, want, eps):
        errs.append("alpha nu alpha^T block form")
    if a @ b + (s.T + s.scale(eps)) @ lam2 != _I(m, ring):
        errs.append("1 = ab + (s^T + eps s) lambda'")
    if a.T @ lam2 != lam @ b:
        errs.append("a^T lambda' = lambda b")
    if not q_epsilon_equal(th2, b.T @ th @ b + lam2.T @ s @ lam2, eps):
        errs.append("theta' = b^T theta b + lambda'^T s lambda'")
    if errs:
        raise VerificationError("normal form extraction failed: " + ", ".join(errs))
    return NormalForm(a, a1, a3, b, b1, s)


# homotopies between boundary isomorphisms ------------------------------------------------

def _solve_delta1(f: BoundaryIso, nf: NormalForm, nf2: NormalForm) -> tuple[Matrix, Matrix] | None:
    """Particular solution and kernel of the linear part of the homotopy criterion."""
    v, w = f.source, f.target
    n, m = v.rank, w.rank
    ring = v.ring
    lamT, lam2T = v.lam.T, w.lam.T
    A = nf2.a - nf.a  # m x n
    B = nf2.b - nf.b  # n x m
    nvar = m * n

    def var(i, j):
        return i * n + j

    rows, rhs = [], []
    for i in range(m):
        for k in range(n):
            r = [0] * nvar
            for j in range(n):
                r[var(i, j)] += lamT[j, k]
            rows.append(r)
            rhs.append([A[i, k]])
    for i in range(n):
        for k in range(m):
            r = [0] * nvar
            for j in range(m):
                # (D^T lam'^T)_{ik} = sum_j D_{ji} lam'^T_{jk}
                r[var(j, i)] += lam2T[j, k]
            rows.append(r)
            rhs.append([B[i, k]])
    if nvar == 0:
        return Matrix.zeros(0, 1, ring), Matrix.zeros(0, 0, ring)
    S = Matrix(rows, ring, ncols=nvar)
    x = solve(S, Matrix(rhs, ring, ncols=1))
    if x is None:
        return None
    return x, kernel_basis(S)


def find_delta1(f: BoundaryIso, g: BoundaryIso, box: int = 2, budget: int = 20_000) -> Matrix | None:
    """A ``Delta_1`` satisfying the block homotopy criterion between ``f`` and ``g``."""
    nf, nf2 = normal_form_boundary_iso(f), normal_form_boundary_iso(g)
    v, w = f.source, f.target
    n, m = v.rank, w.rank
    eps = v.eps
    sol = _solve_delta1(f, nf, nf2)
    if sol is None:
        return None
    x0, K = sol
    target = nf2.s - nf.s

    def ok(D: Matrix) -> bool:
        lhs = (nf2.a.scale(-eps) + D @ v.theta) @ D.T
        return q_epsilon_equal(lhs, target, eps)

    def as_matrix(x: Sequence[int]) -> Matrix:
        return Matrix([[x[i * n + j] for j in range(n)] for i in range(m)], v.ring, ncols=n)

    base = list(x0.col(0))
    k = K.ncols
    count = 0
    for coeffs in _small_vectors(k, box):
        count += 1
        if count > budget:
            break
        x = [base[t] + sum(c * K[t, c_i] for c_i, c in enumerate(coeffs)) for t in range(len(base))]
        D = as_matrix(x)
        if ok(D):
            return D
    return None


def _small_vectors(k: int, box: int):
    yield (0,) * k
    if k == 0:
        return
    for r in range(1, box + 1):
        for t in itertools.product(range(-r, r + 1), repeat=k):
            if max(abs(c) for c in t) == r:
                yield t


@dataclass(frozen=True)
class HomotopyWitness:
    """``delta`` is a homotopy between the padded versions of two isomorphisms."""

    first: BoundaryIso
    second: BoundaryIso
    delta: Homotopy

    def verify(self) -> bool:
        x = self.first.source_formation()
        y = self.first.target_formation()
        if self.second.source_formation() != x or self.second.target_formation() != y:
            return False
        return verify_homotopy(x, y, self.first.iso, self.second.iso, self.delta)


def equalize(f: BoundaryIso, g: BoundaryIso) -> tuple[BoundaryIso, BoundaryIso]:
    """Pad both with trivial formations so that the stabilisations agree."""
    q = max(f.p, g.p)
    return f.pad(q - f.p), g.pad(q - g.p)


def homotopy_between(f: BoundaryIso, g: BoundaryIso, box: int = 2, budget: int = 20_000) -> HomotopyWitness | None:
    """A verified stable homotopy ``f ~ g`` built from the block criterion, or ``None``."""
    if not (f.source.equals(g.source) and f.target.equals(g.target)):
        raise ValueError("isomorphisms do not share source and target")
    f2, g2 = equalize(f, g)
    D1 = find_delta1(f2, g2, box=box, budget=budget)
    if D1 is None:
        return None
    nf, nf2 = normal_form_boundary_iso(f2), normal_form_boundary_iso(g2)
    delta = block([[D1, nf2.a1 - nf.a1], [nf2.b1.T - nf.b1.T, nf2.a3 - nf.a3]])
    w = HomotopyWitness(f2, g2, Homotopy(delta))
    if not w.verify():
        raise VerificationError("block homotopy failed verification")
    return w


# gluing -------------------------------------------------------------------------------

def union(v: QuadraticForm, vprime: QuadraticForm, f: BoundaryIso) -> QuadraticForm:
    """Glue ``v`` and ``vprime`` along ``f: d(v) -> d(-vprime)`` (stably)."""
    if not f.source.equals(v) or not f.target.equals(-vprime):
        raise ValueError("f does not run from d(v) to d(-v')")
    nf = normal_form_boundary_iso(f)
    n, m = v.rank, vprime.rank
    ring = v.ring
    psi = block([[v.theta, _Z(n, m, ring)], [nf.a.scale(v.eps), -nf.s]])
    out = QuadraticForm(psi, v.eps)
    if not out.is_simple:
        raise VerificationError("union is not simple")
    return out


def union_inclusions(v: QuadraticForm, vprime: QuadraticForm, f: BoundaryIso) -> tuple[Matrix, Matrix]:
    """The split injections of ``v`` and ``vprime`` into the union."""
    nf = normal_form_boundary_iso(f)
    n, m = v.rank, vprime.rank
    j = vstack(_I(n, v.ring), _Z(m, n, v.ring))
    jp = vstack(nf.b, vprime.lam)
    return j, jp


def union_homotopy_isometry(delta1: Matrix) -> Matrix:
    """The isometry ``[[1, -Delta_1^T], [0, 1]]`` between unions along homotopic maps."""
    m, n = delta1.shape
    return block([[_I(n, delta1.ring), -delta1.T], [_Z(m, n, delta1.ring), _I(m, delta1.ring)]])


def transport_boundary_iso(f: BoundaryIso, k: Matrix, kp: Matrix, w: QuadraticForm, wp: QuadraticForm) -> BoundaryIso:
    """``(dk' + id) o f o (dk^{-1} + id)`` for isometries ``k: source -> w``, ``k': target -> wp``."""
    r = k.ring
    right = boundary_iso_of_isometry(k.inverse()).oplus(
        FormationIso(_I(f.p, r), _I(f.p, r), _Z(f.p, f.p, r)))
    left = boundary_iso_of_isometry(kp).oplus(
        FormationIso(_I(f.p_target, r), _I(f.p_target, r), _Z(f.p_target, f.p_target, r)))
    return BoundaryIso(w, wp, compose_iso(left, compose_iso(f.iso, right)))


# extending boundary isomorphisms -------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryExtension:
    h: Matrix
    source: QuadraticForm  # v + H(V')
    target: QuadraticForm  # v' + union
    glued: QuadraticForm
    composite: BoundaryIso
    witness: HomotopyWitness | None


def extend_boundary_iso(f: BoundaryIso, box: int = 2, budget: int = 20_000) -> BoundaryExtension:
    """An isometry ``h: v + H(V') -> v' + (v glued to -v' along f)`` with ``dh ~ f`` stably."""
    f.checked()
    v, w = f.source, f.target
    n, m = v.rank, w.rank
    eps = v.eps
    ring = v.ring
    nf = normal_form_boundary_iso(f)
    glued = union(v, -w, f)
    lam2 = w.lam
    P1 = block([
        [_Z(m, n, ring), _I(m, ring), _Z(m, m, ring)],
        [_I(n, ring), nf.b, _Z(n, m, ring)],
        [_Z(m, n, ring), -lam2, _I(m, ring)],
    ])
    P2 = block([
        [_I(n, ring), _Z(n, m, ring), _Z(n, m, ring)],
        [-nf.a, _I(m, ring), nf.s.T],
        [_Z(m, n, ring), _Z(m, m, ring), _I(m, ring)],
    ])
    h = -(P1 @ P2)
    hyp = hyperbolic(m, eps, ring)
    src = v.oplus(hyp)
    tgt = w.oplus(glued)
    if not src.is_isometry_to(tgt, h):
        raise VerificationError("extension h is not an isometry")
    g = hyperbolic_splitting_iso(glued)
    gp_inv = invert_iso(hyperbolic_splitting_iso(hyp))
    left = boundary_iso_of_isometry(_I(m, ring)).oplus(g)
    right = boundary_iso_of_isometry(_I(n, ring)).oplus(gp_inv)
    comp = BoundaryIso(v, w, compose_iso(left, compose_iso(boundary_iso_of_isometry(h), right))).checked()
    wit = homotopy_between(comp, f, box=box, budget=budget)
    return BoundaryExtension(h, src, tgt, glued, comp, wit)


# splitting along an embedding --------------------------------------------------------------

@dataclass(frozen=True)
class SplitEmbedding:
    v: QuadraticForm
    vperp: QuadraticForm  # the induced form on V^perp
    j: Matrix
    jperp: Matrix
    sigma: Matrix
    h: Matrix
    f_j: BoundaryIso  # d(v) + ... -> d(-vperp) + ...
    r_j: Matrix  # union(v, vperp, f_j) -> M


def split_embedding(m: QuadraticForm, j: Matrix, jperp: Matrix | None = None,
                    sigma: Matrix | None = None) -> SplitEmbedding:
    """Split a simple form along the summand spanned by the columns of ``j``.

    A basis ``jperp`` of the annihilator and a section ``sigma`` may be
    supplied; otherwise they are computed.
    """
    if not m.is_simple:
        raise ValueError("ambient form is not simple")
    if not is_primitive(j):
        raise ValueError("j is not a split injection")
    ring, eps = m.ring, m.eps
    v = m.restrict(j)
    jp, _ = annihilator(m, j)
    if jperp is None:
        jperp = jp.basis
    elif not _same_span(jperp, jp.basis):
        raise ValueError("jperp is not a basis of the annihilator")
    vperp = m.restrict(jperp)
    phi, psi = m.lam, m.theta
    r, k = jperp.ncols, j.ncols
    if sigma is None:
        sigma = solve(jperp.T @ phi, _I(r, ring))
        if sigma is None:
            raise ValueError("no section exists; the sequence is not split")
    elif jperp.T @ phi @ sigma != _I(r, ring):
        raise ValueError("sigma is not a section")
    H1 = block([
        [_I(r, ring), _Z(r, r, ring), _Z(r, k, ring)],
        [jperp, sigma, j],
    ])
    H2 = block([
        [-(sigma.T @ phi.T @ j), _I(r, ring), -(sigma.T @ psi.T @ sigma)],
        [_Z(r, k, ring), _Z(r, r, ring), _I(r, ring)],
        [_I(k, ring), _Z(k, r, ring), _Z(k, r, ring)],
    ])
    h = H1 @ H2
    hyp = hyperbolic(r, eps, ring)
    src = v.oplus(hyp)
    tgt = (-vperp).oplus(m)
    if not src.is_isometry_to(tgt, h):
        raise VerificationError("splitting isometry h failed verification")
    left = boundary_iso_of_isometry(_I(r, ring)).oplus(hyperbolic_splitting_iso(m))
    right = boundary_iso_of_isometry(_I(k, ring)).oplus(invert_iso(hyperbolic_splitting_iso(hyp)))
    fj = BoundaryIso(v, -vperp, compose_iso(left, compose_iso(boundary_iso_of_isometry(h), right))).checked()
    glued = union(v, vperp, fj)
    rj = hstack(j, -sigma)
    if not glued.is_isometry_to(m, rj):
        raise VerificationError("r_j is not an isometry")
    return SplitEmbedding(v, vperp, j, jperp, sigma, h, fj, rj)


# quasi-formations ----------------------------------------------------------------------------

def hamiltonian_complement(m: QuadraticForm, L: Matrix) -> Matrix:
    """A Lagrangian ``K`` with ``L^T lambda K = 1``, so ``[L | K]`` is a Hamiltonian basis."""
    ring = m.ring
    C = complete_basis(L)
    lam = m.lam
    B = L.T @ lam @ C
    K0 = C @ B.inverse()
    X = -(K0.T @ m.theta @ K0).T
    K = K0 + L @ X
    assert L.T @ lam @ K == _I(L.ncols, ring)
    assert q_epsilon_equal(K.T @ m.theta @ K, _Z(K.ncols, K.ncols, ring), m.eps)
    return K


def is_lagrangian(m: QuadraticForm, L: Matrix) -> bool:
    if 2 * L.ncols != m.rank or not is_primitive(L):
        return False
    if not (L.T @ m.lam @ L).is_zero():
        return False
    return q_epsilon_equal(L.T @ m.theta @ L, _Z(L.ncols, L.ncols, m.ring), m.eps)


@dataclass(frozen=True)
class QuasiFormation:
    """A simple form with a Lagrangian ``L`` and a half-rank summand ``V`` (columns)."""

    form: QuadraticForm
    L: Matrix
    V: Matrix

    def __post_init__(self):
        m = self.form
        if not m.is_simple:
            raise ValueError("quasi-formation form is not simple")
        if not is_lagrangian(m, self.L):
            raise ValueError("L is not a Lagrangian")
        if 2 * self.V.ncols != m.rank or not is_primitive(self.V):
            raise ValueError("V is not a half-rank direct summand")
        if self.L.nrows != m.rank or self.V.nrows != m.rank:
            raise ValueError("submodule bases do not match the form")

    @property
    def eps(self) -> int:
        return self.form.eps

    @property
    def ring(self) -> Ring:
        return self.form.ring

    @property
    def half_rank(self) -> int:
        return self.V.ncols

    def oplus(self, other: "QuasiFormation") -> "QuasiFormation":
        return direct_sum_qf(self, other)

    def to_json(self) -> dict:
        return {
            "form": self.form.to_json(),
            "L": [[str(x) for x in r] for r in self.L.rows],
            "V": [[str(x) for x in r] for r in self.V.rows],
        }

    @staticmethod
    def from_json(doc: dict) -> "QuasiFormation":
        form = QuadraticForm.from_json(doc["form"])
        n = form.rank
        L = Matrix([[int(x) for x in r] for r in doc["L"]], form.ring, ncols=n // 2)
        V = Matrix([[int(x) for x in r] for r in doc["V"]], form.ring, ncols=n // 2)
        return QuasiFormation(form, L, V)


def standard_quasi_formation(V: Matrix, eps: int, ring: Ring = ZZ) -> QuasiFormation:
    """``(H_eps(R^k); R^k x 0, V)``."""
    k = V.nrows // 2
    return QuasiFormation(hyperbolic(k, eps, ring), vstack(_I(k, ring), _Z(k, k, ring)), V)


def boundary_of_asymmetric(rho: Matrix, eps: int) -> QuasiFormation:
    """``delta(K, rho) = (H_eps(K); K, graph of rho)``."""
    if not rho.is_square():
        raise ValueError("rho must be square")
    k = rho.nrows
    return standard_quasi_formation(vstack(_I(k, rho.ring), rho), eps, rho.ring)


def trivial_quasi_formation(k: int, eps: int, ring: Ring = ZZ) -> QuasiFormation:
    """The trivial formation ``(H(P); P, P*)``."""
    return standard_quasi_formation(vstack(_Z(k, k, ring), _I(k, ring)), eps, ring)


def direct_sum_qf(x: QuasiFormation, y: QuasiFormation) -> QuasiFormation:
    if x.eps != y.eps or x.ring != y.ring:
        raise ValueError("direct sum needs matching ring and epsilon")
    return QuasiFormation(x.form.oplus(y.form), direct_sum(x.L, y.L, ring=x.ring), direct_sum(x.V, y.V, ring=x.ring))


def t_flip(x: QuasiFormation) -> QuasiFormation:
    return QuasiFormation(-x.form, x.L, x.V)


@dataclass(frozen=True)
class BoundaryPair:
    v: QuadraticForm  # theta restricted to V
    vperp: QuadraticForm  # -theta restricted to V^perp
    V: Matrix
    Vperp: Matrix


def b_invariant(x: QuasiFormation) -> BoundaryPair:
    v = x.form.restrict(x.V)
    sub, vp = annihilator(x.form, x.V)
    return BoundaryPair(v, -vp, x.V, sub.basis)


@dataclass(frozen=True)
class ElementaryCertificate:
    """``rho`` with ``[x] = [delta(K, rho)]``.

    ``kind`` is ``"isomorphism"`` when ``isometry`` maps ``x`` itself onto
    the boundary, or ``"relation"`` when ``x`` is first replaced by
    ``(M; K, V)`` for a Lagrangian complement ``K`` of ``L`` and the shift
    relation, after which ``isometry`` maps that onto the boundary.
    """

    kind: str
    rho: Matrix
    isometry: Matrix
    lagrangian: Matrix

    def verify(self, x: QuasiFormation) -> bool:
        target = boundary_of_asymmetric(self.rho, x.eps)
        h = self.isometry
        if not x.form.is_isometry_to(target.form, h):
            return False
        return _same_span(h @ self.lagrangian, target.L) and _same_span(h @ x.V, target.V)


def _same_span(A: Matrix, B: Matrix) -> bool:
    if A.shape != B.shape:
        return False
    X = solve(B, A)
    return X is not None and X.is_invertible()


def _certificate_from_hamiltonian(x: QuasiFormation, L: Matrix, K: Matrix, kind: str) -> ElementaryCertificate | None:
    """If the ``L``-coordinates of ``V`` in the basis ``[L | K]`` are invertible."""
    P = hstack(L, K)
    coords = P.inverse() @ x.V
    k = L.ncols
    y, xx = coords[:k, :], coords[k:, :]
    if not y.is_invertible():
        return None
    rho = y.T @ xx
    ring = x.ring
    D = direct_sum(y.inverse(), y.T, ring=ring)
    h = D @ P.inverse()
    cert = ElementaryCertificate(kind, rho, h, L)
    if not cert.verify(x):
        raise VerificationError("elementary certificate failed verification")
    return cert


@dataclass(frozen=True)
class ElementaryVerdict:
    status: str  # "Yes" or "No"
    certificate: ElementaryCertificate | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status == "Yes"


def is_elementary_representative(x: QuasiFormation) -> ElementaryVerdict:
    """Decide whether this representative certifies elementarity directly.

    Yes when ``V`` is a graph over ``L`` in a Hamiltonian basis (``x`` is then
    isomorphic to a boundary), or when ``M = L + V`` (the class is then a
    boundary via the shift relation with a complement of ``L``).
    """
    K = hamiltonian_complement(x.form, x.L)
    cert = _certificate_from_hamiltonian(x, x.L, K, "isomorphism")
    if cert is not None:
        return ElementaryVerdict("Yes", cert)
    if hstack(x.L, x.V).is_invertible():
        # K is a Lagrangian whose Hamiltonian partner is eps * L
        cert = _certificate_from_hamiltonian(x, K, x.L.scale(x.eps), "relation")
        if cert is not None:
            return ElementaryVerdict("Yes", cert)
    return ElementaryVerdict("No", reason="V is neither a graph over L nor complementary to L")


def lagrangian_complement_certificate(x: QuasiFormation, K: Matrix) -> ElementaryCertificate:
    """Turn a Lagrangian complement ``K`` of ``V`` into an elementary certificate.

    By the shift relation ``[M; L, V] = [M; L, K] + [M; K, V]``; the first
    summand is a formation, which is zero over the rings where odd L-groups
    vanish, and the second has ``M = K + V``.
    """
    if not is_lagrangian(x.form, K):
        raise VerificationError("K is not a Lagrangian")
    if not hstack(K, x.V).is_invertible():
        raise VerificationError("K is not a complement of V")
    y = QuasiFormation(x.form, K, x.V)
    Kc = hamiltonian_complement(x.form, K)
    cert = _certificate_from_hamiltonian(y, Kc, K.scale(x.eps), "relation")
    if cert is None:
        raise VerificationError("complement did not yield a boundary")
    return cert
