"""epsilon-quadratic forms on based free modules.

A form is stored as a representative matrix ``theta`` of its class modulo
``chi - eps * chi^T``; equality of forms always goes through
:func:`q_epsilon_equal`.  Bilinear values are ``theta(x, y) = x^T theta y``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exact_linear import (
    ZZ,
    Matrix,
    Ring,
    complete_basis,
    direct_sum,
    is_primitive,
    kernel_basis,
    rational_inverse,
    saturate,
    solve,
    vec_gcd,
)


def _check_eps(eps: int) -> int:
    if eps not in (1, -1):
        raise ValueError(f"epsilon must be +1 or -1, got {eps}")
    return eps


# the quotient Q_eps ---------------------------------------------------------

def q_class_is_zero(d: Matrix, eps: int) -> bool:
    """Whether ``d = chi - eps * chi^T`` for some ``chi``."""
    ring = d.ring
    n = d.nrows
    red = ring.reduce
    for i in range(n):
        for j in range(i + 1, n):
            if red(d[i, j] + eps * d[j, i]) != 0:
                return False
        x = red(d[i, i])
        if eps == 1:
            if x != 0:
                return False
        elif (ring.is_integers or ring.modulus % 2 == 0) and x % 2:
            # the diagonal must lie in 2R
            return False
    return True


def q_epsilon_equal(theta1: Matrix, theta2: Matrix, eps: int) -> bool:
    """Equality of two representatives in ``Q_eps``."""
    _check_eps(eps)
    if theta1.shape != theta2.shape:
        raise ValueError(f"shape mismatch {theta1.shape} vs {theta2.shape}")
    return q_class_is_zero(theta1 - theta2, eps)


def q_scalar_equal(a: int, b: int, eps: int, ring: Ring = ZZ) -> bool:
    """Equality in ``Q_eps`` of the ring itself (rank one)."""
    return q_class_is_zero(Matrix([[a - b]], ring), eps)


def q_normalize(theta: Matrix, eps: int) -> Matrix:
    """A canonical-ish representative: upper triangular, reduced diagonal."""
    ring = theta.ring
    n = theta.nrows
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out[i][j] = theta[i, j] + eps * theta[j, i]
        x = theta[i, i]
        if eps == -1:
            if ring.is_integers:
                x %= 2
            elif ring.modulus % 2 == 0:
                x %= 2
            else:
                x = 0
        out[i][i] = x
    return Matrix(out, ring, ncols=n)


# forms -----------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticForm:
    """An epsilon-quadratic form ``(V, theta)``."""

    theta: Matrix
    eps: int

    def __post_init__(self):
        _check_eps(self.eps)
        if not self.theta.is_square():
            raise ValueError("theta must be square")

    @classmethod
    def of(cls, rows, eps: int = 1, ring: Ring = ZZ) -> "QuadraticForm":
        n = len(rows)
        return cls(Matrix(rows, ring, ncols=n), eps)

    @property
    def ring(self) -> Ring:
        return self.theta.ring

    @property
    def rank(self) -> int:
        return self.theta.nrows

    @property
    def lam(self) -> Matrix:
        """The symmetrisation ``theta + eps * theta^T``."""
        return self.theta + self.theta.T.scale(self.eps)

    def value(self, x: Sequence[int], y: Sequence[int]) -> int:
        return self.ring.reduce(sum(a * t * b for a, row in zip(x, self.theta.rows) for t, b in zip(row, y)))

    def norm(self, x: Sequence[int]) -> int:
        return self.value(x, x)

    def lam_value(self, x: Sequence[int], y: Sequence[int]) -> int:
        return self.ring.reduce(self.value(x, y) + self.eps * self.value(y, x))

    def restrict(self, basis: Matrix) -> "QuadraticForm":
        return QuadraticForm(basis.T @ self.theta @ basis, self.eps)

    def pullback(self, h: Matrix) -> "QuadraticForm":
        return self.restrict(h)

    def __neg__(self) -> "QuadraticForm":
        return QuadraticForm(-self.theta, self.eps)

    def oplus(self, *others: "QuadraticForm") -> "QuadraticForm":
        for o in others:
            if o.eps != self.eps or o.ring != self.ring:
                raise ValueError("direct sum needs matching ring and epsilon")
        return QuadraticForm(direct_sum(self.theta, *(o.theta for o in others), ring=self.ring), self.eps)

    def equals(self, other: "QuadraticForm") -> bool:
        return self.eps == other.eps and self.rank == other.rank and q_epsilon_equal(self.theta, other.theta, self.eps)

    def det_lam(self) -> int:
        return self.lam.det()

    @property
    def is_nondegenerate(self) -> bool:
        return self.det_lam() != 0

    @property
    def is_simple(self) -> bool:
        return self.ring.is_unit(self.det_lam())

    def is_isometry_to(self, other: "QuadraticForm", h: Matrix) -> bool:
        """Whether ``h`` is an invertible map with ``h^T theta' h = theta``."""
        if h.shape != (other.rank, self.rank) or not h.is_invertible():
            return False
        return q_epsilon_equal(h.T @ other.theta @ h, self.theta, self.eps)

    def to_json(self) -> dict:
        return {
            "ring": self.ring.to_json(),
            "epsilon": self.eps,
            "theta": [[str(x) for x in r] for r in self.theta.rows],
        }

    @staticmethod
    def from_json(doc: dict) -> "QuadraticForm":
        ring = Ring.from_json(doc.get("ring", {"kind": "Z"}))
        rows = [[int(x) for x in r] for r in doc["theta"]]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("theta must be square")
        return QuadraticForm(Matrix(rows, ring, ncols=n), int(doc["epsilon"]))


def zero_form(rank: int, eps: int, ring: Ring = ZZ) -> QuadraticForm:
    return QuadraticForm(Matrix.zeros(rank, rank, ring), eps)


def symmetrize(v: QuadraticForm) -> Matrix:
    return v.lam


def hyperbolic(rank_L: int, eps: int, ring: Ring = ZZ) -> QuadraticForm:
    """``H_eps(L)`` on ``L + L*`` with ``theta = [[0, I], [0, 0]]``."""
    if rank_L < 0:
        raise ValueError("rank must be nonnegative")
    k = rank_L
    rows = [[int(j == i + k) for j in range(2 * k)] for i in range(2 * k)]
    return QuadraticForm(Matrix(rows, ring, ncols=2 * k), _check_eps(eps))


@dataclass(frozen=True)
class Submodule:
    """A direct summand given by the columns of ``basis``."""

    basis: Matrix

    def __post_init__(self):
        if not is_primitive(self.basis):
            raise ValueError("submodule basis is not primitive")

    @property
    def ambient_rank(self) -> int:
        return self.basis.nrows

    @property
    def rank(self) -> int:
        return self.basis.ncols


def annihilator(v: QuadraticForm, W: Submodule | Matrix) -> tuple[Submodule, QuadraticForm]:
    """``W^perp = ker(W^T lam)`` with the induced form on it."""
    B = W.basis if isinstance(W, Submodule) else W
    if not is_primitive(B):
        raise ValueError("W is not a direct summand")
    if B.ncols == 0:
        K = Matrix.identity(v.rank, v.ring)
    else:
        K = kernel_basis(B.T @ v.lam)
    return Submodule(K), v.restrict(K)


def radical(v: QuadraticForm) -> Submodule:
    if v.rank == 0:
        return Submodule(Matrix.zeros(0, 0, v.ring))
    K = kernel_basis(v.lam)
    if v.ring.is_integers:
        K = saturate(K) if K.ncols else K
    return Submodule(K)


def split_radical(v: QuadraticForm) -> tuple[QuadraticForm, int, Matrix]:
    """Write ``v`` as (nondegenerate part) + (zero form of some rank).

    Returns the nondegenerate part, the radical rank and a basis change
    ``P`` (columns: complement basis then radical basis).  Over Z with
    ``eps = -1`` the radical may carry a nonzero refinement; the caller sees
    it in ``v.restrict(P)``.
    """
    rad = radical(v).basis
    if rad.ncols == 0:
        return v, 0, Matrix.identity(v.rank, v.ring)
    C = complete_basis(rad)
    from .exact_linear import hstack

    P = hstack(C, rad)
    return v.restrict(C), rad.ncols, P


# signature -------------------------------------------------------------------

def signature(sym: Matrix) -> int:
    """Positive minus negative inertia by rational congruence diagonalisation."""
    if not sym.is_square():
        raise ValueError("signature needs a square matrix")
    if sym != sym.T:
        raise ValueError("signature needs a symmetric matrix")
    pos, neg, _ = inertia(sym)
    return pos - neg


def inertia(sym: Matrix) -> tuple[int, int, int]:
    """``(n_plus, n_minus, n_zero)`` of a symmetric integer matrix."""
    a = [[Fraction(x) for x in r] for r in sym.rows]
    pos = neg = 0
    while a:
        n = len(a)
        i = next((k for k in range(n) if a[k][k] != 0), None)
        if i is None:
            pair = next(((k, l) for k in range(n) for l in range(k + 1, n) if a[k][l] != 0), None)
            if pair is None:
                break
            k, l = pair
            # row/col k += row/col l makes the diagonal entry 2*a[k][l]
            for c in range(n):
                a[k][c] += a[l][c]
            for r in range(n):
                a[r][k] += a[r][l]
            i = k
        d = a[i][i]
        if d > 0:
            pos += 1
        else:
            neg += 1
        rest = [k for k in range(n) if k != i]
        a = [[a[r][c] - a[r][i] * a[i][c] / d for c in rest] for r in rest]
    zero = sym.nrows - pos - neg
    return pos, neg, zero


def is_definite(v: QuadraticForm) -> bool:
    """Definite symmetrisation (only meaningful for eps = +1 over Z)."""
    if v.eps != 1 or not v.ring.is_integers or v.rank == 0:
        return False
    pos, neg, zero = inertia(v.lam)
    return zero == 0 and (pos == 0 or neg == 0)


# Arf invariant -----------------------------------------------------------------

def _mod2_form(v: QuadraticForm) -> tuple[list[list[int]], list[list[int]]]:
    th = [[x % 2 for x in r] for r in v.theta.rows]
    lam = [[(th[i][j] + th[j][i]) % 2 for j in range(v.rank)] for i in range(v.rank)]
    return th, lam


def arf_invariant(v: QuadraticForm) -> int:
    """Arf invariant of a nonsingular skew-quadratic form over Z or F_2.

    Builds a symplectic basis of the mod 2 reduction and sums
    ``mu(e_i) * mu(f_i)`` with ``mu(x) = theta(x, x) mod 2``.
    """
    ring = v.ring
    if ring.is_integers:
        if v.eps != -1:
            raise ValueError("Arf invariant needs eps = -1 over Z")
        if not v.is_simple:
            raise ValueError("Arf invariant needs a nonsingular form")
    elif not (ring.is_field and ring.modulus == 2):
        raise ValueError(f"Arf invariant is defined over Z or F_2, not {ring}")
    th, lam = _mod2_form(v)
    n = v.rank

    def bil(x, y):
        return sum(x[i] * lam[i][j] * y[j] for i in range(n) for j in range(n)) % 2

    def mu(x):
        return sum(x[i] * th[i][j] * x[j] for i in range(n) for j in range(n)) % 2

    vecs = [[int(i == j) for j in range(n)] for i in range(n)]
    total = 0
    while vecs:
        e = vecs.pop(0)
        k = next((k for k, f in enumerate(vecs) if bil(e, f)), None)
        if k is None:
            raise ValueError("form is singular mod 2")
        f = vecs.pop(k)
        total += mu(e) * mu(f)
        new = []
        for x in vecs:
            a, b = bil(x, f), bil(x, e)
            new.append([(xi + a * ei + b * fi) % 2 for xi, ei, fi in zip(x, e, f)])
        vecs = new
    return total % 2


# short vectors and isometry search ------------------------------------------------

def _cholesky_float(g: list[list[int]]) -> list[list[float]] | None:
    n = len(g)
    L = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = g[i][j] - sum(L[i][k] * L[j][k] for k in range(j))
            if i == j:
                if s <= 0:
                    return None
                L[i][i] = math.sqrt(s)
            else:
                L[i][j] = s / L[j][j]
    return L


def short_vectors(gram: Matrix, bound: int) -> list[tuple[int, ...]]:
    """All nonzero ``x`` with ``x^T G x <= bound`` for positive definite ``G``.

    Fincke-Pohst enumeration with floating point bounds padded by a margin
    and an exact filter on the way out.
    """
    g = gram.tolist()
    n = len(g)
    if n == 0:
        return []
    # q-form: x^T G x = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    q = [[Fraction(x) for x in r] for r in g]
    Q = [[0.0] * n for _ in range(n)]
    a = [r[:] for r in q]
    for i in range(n):
        if a[i][i] <= 0:
            raise ValueError("gram matrix is not positive definite")
        Q[i][i] = float(a[i][i])
        for j in range(i + 1, n):
            Q[i][j] = float(a[i][j] / a[i][i])
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                a[j][k] -= a[j][i] * a[i][k] / a[i][i]
    out: list[tuple[int, ...]] = []
    x = [0] * n
    eps = 1e-9 * max(1, bound)

    def rec(i: int, remaining: float):
        c = -sum(Q[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(remaining, 0.0) / Q[i][i]) + 1e-9
        lo, hi = math.ceil(c - r - 1e-9), math.floor(c + r + 1e-9)
        for xi in range(lo, hi + 1):
            t = Q[i][i] * (xi - c) ** 2
            if t > remaining + eps:
                continue
            x[i] = xi
            if i == 0:
                out.append(tuple(x))
            else:
                rec(i - 1, remaining - t)
        x[i] = 0

    rec(n - 1, float(bound))
    res = []
    for v in out:
        if any(v):
            val = sum(v[i] * g[i][j] * v[j] for i in range(n) for j in range(n))
            if val <= bound:
                res.append(v)
    return res


def _definite_sign(v: QuadraticForm) -> int:
    pos, neg, zero = inertia(v.lam)
    if zero:
        return 0
    if neg == 0:
        return 1
    if pos == 0:
        return -1
    return 0


def iter_isometries(v: QuadraticForm, w: QuadraticForm, limit: int | None = None,
                    node_budget: int = 2_000_000) -> Iterator[Matrix]:
    """All isometries ``v -> w`` of definite ``eps = +1`` forms over Z.

    Backtracking on images of basis vectors among vectors of matching norm;
    the column ``i`` of the result is the image of ``e_i``.
    """
    if v.rank != w.rank:
        return
    sv, sw = _definite_sign(v), _definite_sign(w)
    if sv == 0 or sv != sw:
        raise ValueError("iter_isometries needs two definite forms of the same sign")
    gv = v.lam.scale(sv)
    gw = w.lam.scale(sw)
    n = v.rank
    if n == 0:
        yield Matrix.zeros(0, 0)
        return
    norms = {gv[i, i] for i in range(n)}
    vecs = short_vectors(gw, max(norms))
    g = gw.tolist()

    def ip(x, y):
        return sum(x[a] * g[a][b] * y[b] for a in range(n) for b in range(n))

    by_norm: dict[int, list[tuple[int, ...]]] = {}
    for x in vecs:
        by_norm.setdefault(ip(x, x), []).append(x)
    cands = [by_norm.get(gv[i, i], []) for i in range(n)]
    # lambda_w(x, .) as a row, to speed up inner products
    rows = {x: [sum(x[a] * g[a][b] for a in range(n)) for b in range(n)] for x in vecs}
    chosen: list[tuple[int, ...]] = []
    count = 0
    nodes = 0

    def rec(i: int):
        nonlocal count, nodes
        if i == n:
            h = Matrix(chosen, ZZ).T
            if h.det() in (1, -1):
                count += 1
                yield h
            return
        for x in cands[i]:
            nodes += 1
            if nodes > node_budget:
                raise _BudgetExceeded
            rx = rows[x]
            ok = True
            for j, y in enumerate(chosen):
                if sum(a * b for a, b in zip(rx, y)) != gv[i, j]:
                    ok = False
                    break
            if not ok:
                continue
            chosen.append(x)
            yield from rec(i + 1)
            chosen.pop()
            if limit is not None and count >= limit:
                return

    try:
        yield from rec(0)
    except _BudgetExceeded:
        raise BudgetExceeded(f"isometry search exceeded {node_budget} nodes")


class _BudgetExceeded(Exception):
    pass


class BudgetExceeded(RuntimeError):
    """A bounded search ran out of budget."""


def automorphisms(v: QuadraticForm, cap: int = 100_000) -> list[Matrix]:
    """The full isometry group of a definite form (list of matrices)."""
    out = []
    for h in iter_isometries(v, v):
        out.append(h)
        if len(out) > cap:
            raise BudgetExceeded(f"automorphism group larger than {cap}")
    return out


def _box_vectors(n: int, B: int) -> list[tuple[int, ...]]:
    vs = [t for t in itertools.product(range(-B, B + 1), repeat=n) if any(t)]
    vs.sort(key=lambda t: (sum(abs(x) for x in t), t))
    return vs


def bounded_isometry_search(v: QuadraticForm, w: QuadraticForm, box: int = 2,
                            node_budget: int = 200_000) -> Matrix | None:
    """Search isometries ``v -> w`` with matrix entries in ``[-box, box]``.

    Raises :class:`BudgetExceeded` when the node budget runs out first.
    """
    n = v.rank
    if n != w.rank:
        return None
    if n == 0:
        return Matrix.zeros(0, 0, v.ring)
    ring = v.ring
    if ring.is_integers:
        vecs = _box_vectors(n, box)
    else:
        vecs = [t for t in itertools.product(ring.elements(), repeat=n) if any(t)]
    eps = v.eps
    tw = w.theta.tolist()
    lw = w.lam.tolist()

    def tval(x, y):
        return ring.reduce(sum(x[a] * tw[a][b] * y[b] for a in range(n) for b in range(n)))

    lrow = {x: [ring.reduce(sum(x[a] * lw[a][b] for a in range(n))) for b in range(n)] for x in vecs}
    lv = v.lam
    by_class: dict = {}
    for x in vecs:
        key = q_key(tval(x, x), eps, ring)
        by_class.setdefault(key, []).append(x)
    cands = [by_class.get(q_key(v.theta[i, i], eps, ring), []) for i in range(n)]
    chosen: list[tuple[int, ...]] = []
    nodes = 0

    def rec(i: int):
        nonlocal nodes
        if i == n:
            h = Matrix(chosen, ring).T
            if h.is_invertible() and v.is_isometry_to(w, h):
                return h
            return None
        for x in cands[i]:
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceeded("bounded isometry search exhausted its budget")
            rx = lrow[x]
            if all(ring.reduce(sum(a * b for a, b in zip(rx, y))) == lv[i, j] for j, y in enumerate(chosen)):
                chosen.append(x)
                h = rec(i + 1)
                if h is not None:
                    return h
                chosen.pop()
        return None

    return rec(0)


def q_key(x: int, eps: int, ring: Ring = ZZ):
    """Canonical representative of a scalar in ``Q_eps`` of the ring."""
    x = ring.reduce(x)
    if eps == 1:
        return x
    if ring.is_integers:
        return x % 2
    if ring.modulus % 2 == 0:
        return x % 2
    return 0


@dataclass(frozen=True)
class IsometryVerdict:
    status: str  # "Yes", "No" or "Unknown"
    isometry: Matrix | None = None
    witness: str = ""

    def __bool__(self) -> bool:
        return self.status == "Yes"


def is_isometric(v: QuadraticForm, w: QuadraticForm, budget: int = 200_000, box: int = 2) -> IsometryVerdict:
    """Decide isometry by invariants, then by a certified search."""
    if v.ring != w.ring or v.eps != w.eps:
        return IsometryVerdict("No", witness="ring or epsilon differ")
    if v.rank != w.rank:
        return IsometryVerdict("No", witness=f"rank {v.rank} != {w.rank}")
    if v.rank == 0:
        return IsometryVerdict("Yes", Matrix.zeros(0, 0, v.ring))
    if v.is_isometry_to(w, Matrix.identity(v.rank, v.ring)):
        return IsometryVerdict("Yes", Matrix.identity(v.rank, v.ring))
    dv, dw = v.det_lam(), w.det_lam()
    ring = v.ring
    if ring.is_integers and dv != dw:
        return IsometryVerdict("No", witness=f"det(lambda) {dv} != {dw}")
    if ring.is_field and (dv == 0) != (dw == 0):
        return IsometryVerdict("No", witness="degeneracy differs")
    if ring.is_integers and v.eps == 1:
        sv, sw = signature(v.lam), signature(w.lam)
        if sv != sw:
            return IsometryVerdict("No", witness=f"signature {sv} != {sw}")
    if v.eps == -1 and (ring.is_integers or ring.modulus == 2) and v.is_simple and w.is_simple:
        av, aw = arf_invariant(v), arf_invariant(w)
        if av != aw:
            return IsometryVerdict("No", witness=f"Arf {av} != {aw}")
    if ring.is_integers and v.is_nondegenerate:
        from .linking import linking_forms_isomorphic, s_boundary

        try:
            same = linking_forms_isomorphic(s_boundary(v), s_boundary(w))
        except (BudgetExceeded, ValueError):
            same = None
        if same is False:
            return IsometryVerdict("No", witness="boundary linking forms differ")
    try:
        if ring.is_integers and v.eps == 1 and _definite_sign(v) != 0:
            for h in iter_isometries(v, w, limit=1, node_budget=budget * 10):
                return IsometryVerdict("Yes", h)
            return IsometryVerdict("No", witness="exhaustive search over vectors of matching norm")
        if v.rank <= 6:
            h = bounded_isometry_search(v, w, box=box, node_budget=budget)
            if h is not None:
                return IsometryVerdict("Yes", h)
            if not ring.is_integers:
                return IsometryVerdict("No", witness="exhaustive search over the finite ring")
    except BudgetExceeded:
        pass
    return IsometryVerdict("Unknown", witness="search budget exhausted without separating invariant")


# transvections ----------------------------------------------------------------------

class PreconditionError(ValueError):
    pass


def _is_unimodular_vector(v: QuadraticForm, u: Sequence[int]) -> bool:
    row = v.lam.T.apply(u)  # lambda(u, .)
    if v.ring.is_integers:
        return vec_gcd(row) == 1
    return any(v.ring.is_unit(x) for x in row) or (
        not v.ring.is_field and math.gcd(vec_gcd(row), v.ring.modulus) == 1
    )


def transvection(v: QuadraticForm, u: Sequence[int], w: Sequence[int], a: int) -> Matrix:
    """The transvection ``x -> x + u lam(w,x) - eps w lam(u,x) - eps u a lam(u,x)``.

    ``w`` plays the role of the second vector.  All four preconditions are
    checked and the result is verified to be an isometry.
    """
    ring, eps = v.ring, v.eps
    n = v.rank
    u, w = tuple(ring.reduce(x) for x in u), tuple(ring.reduce(x) for x in w)
    if len(u) != n or len(w) != n:
        raise ValueError("vector length does not match the form")
    if not _is_unimodular_vector(v, u):
        raise PreconditionError("u is not unimodular")
    if v.lam_value(u, w) != 0:
        raise PreconditionError("lambda(u, v) != 0")
    if not q_scalar_equal(v.norm(u), 0, eps, ring):
        raise PreconditionError("theta(u, u) is not zero in Q_eps")
    if not q_scalar_equal(v.norm(w), a, eps, ring):
        raise PreconditionError("theta(v, v) is not [a] in Q_eps")
    lam = v.lam
    U = Matrix.column(u, ring)
    Wc = Matrix.column(w, ring)
    tau = (Matrix.identity(n, ring) + U @ Wc.T @ lam - (Wc @ U.T @ lam).scale(eps)
           - (U @ U.T @ lam).scale(eps * a))
    if not v.is_isometry_to(v, tau):
        raise AssertionError("transvection failed to be an isometry")
    return tau


# Witt index ---------------------------------------------------------------------------

def hyperbolic_pair(v: QuadraticForm, box: int = 2, budget: int = 50_000):
    """Find ``(e, f)`` with ``theta|span(e,f)`` equal to the hyperbolic plane."""
    ring, eps = v.ring, v.eps
    n = v.rank
    if n < 2:
        return None
    if ring.is_integers:
        vecs = _box_vectors(n, box)
    else:
        vecs = (t for t in itertools.product(ring.elements(), repeat=n) if any(t))
    lam = v.lam
    for count, e in enumerate(vecs):
        if count > budget:
            break
        if not q_scalar_equal(v.norm(e), 0, eps, ring):
            continue
        if not _is_unimodular_vector(v, e):
            continue
        row = Matrix([lam.T.apply(e)], ring)  # lambda(e, .)
        f0 = solve(row, Matrix([[1]], ring))
        if f0 is None:
            continue
        f = list(f0.col(0))
        c = v.norm(f)
        # theta(f - c e, f - c e) = theta(f,f) - c lam(e,f) + c^2 theta(e,e) = 0 in Q
        f = [ring.reduce(fi - c * ei) for fi, ei in zip(f, e)]
        if q_scalar_equal(v.norm(f), 0, eps, ring) and v.lam_value(e, f) == ring.reduce(1):
            return tuple(e), tuple(f)
    return None


def witt_index_lower_bound(v: QuadraticForm, budget: int = 50_000, box: int = 2) -> int:
    """Certified lower bound for the Witt index by splitting off hyperbolic pairs."""
    cap = v.rank // 2
    if v.ring.is_integers and v.eps == 1:
        pos, neg, _ = inertia(v.lam)
        cap = min(cap, pos, neg)
    k = 0
    cur = v
    while k < cap:
        pair = hyperbolic_pair(cur, box=box, budget=budget)
        if pair is None:
            break
        e, f = pair
        P = Matrix([e, f], cur.ring).T
        perp, induced = annihilator(cur, P)
        cur = induced
        k += 1
    return k


# named lattices -----------------------------------------------------------------------

_DYNKIN_EDGES = {
    "A4": (4, [(0, 1), (1, 2), (2, 3)]),
    "D5": (5, [(0, 1), (1, 2), (2, 3), (2, 4)]),
    "E6": (6, [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]),
    "E7": (7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 6)]),
    "E8": (8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)]),
}


def named_lattice(name: str) -> QuadraticForm:
    """Positive definite root lattice with its upper-triangular refinement."""
    if name not in _DYNKIN_EDGES:
        raise ValueError(f"unknown lattice {name!r}; choose from {sorted(_DYNKIN_EDGES)}")
    n, edges = _DYNKIN_EDGES[name]
    th = [[int(i == j) for j in range(n)] for i in range(n)]
    for i, j in edges:
        th[min(i, j)][max(i, j)] = -1
    return QuadraticForm(Matrix(th, ZZ), 1)


NAMED_LATTICES = tuple(_DYNKIN_EDGES)


def congruence_diagonalize(sym: Matrix) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Rational ``T`` and diagonal ``D`` with ``T^T sym T = diag(D)``."""
    n = sym.nrows
    a = [[Fraction(x) for x in r] for r in sym.rows]
    T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add(dst, src, c):  # column and row dst += c * (column and row src)
        for r in range(n):
            a[r][dst] += c * a[r][src]
        for col in range(n):
            a[dst][col] += c * a[src][col]
        for r in range(n):
            T[r][dst] += c * T[r][src]

    def swap(i, k):
        for r in range(n):
            a[r][i], a[r][k] = a[r][k], a[r][i]
        a[i], a[k] = a[k], a[i]
        for r in range(n):
            T[r][i], T[r][k] = T[r][k], T[r][i]

    for i in range(n):
        k = next((k for k in range(i, n) if a[k][k] != 0), None)
        if k is None:
            pair = next(((k, l) for k in range(i, n) for l in range(k + 1, n) if a[k][l] != 0), None)
            if pair is None:
                break
            add(pair[0], pair[1], Fraction(1))
            k = pair[0]
        if k != i:
            swap(i, k)
        for r in range(i + 1, n):
            if a[r][i]:
                add(r, i, -a[r][i] / a[i][i])
    return T, [a[i][i] for i in range(n)]


def positive_majorant(sym: Matrix) -> list[list[Fraction]]:
    """A positive definite rational Gram matrix dominating a nondegenerate symmetric ``sym``."""
    T, D = congruence_diagonalize(sym)
    n = len(D)
    if any(d == 0 for d in D):
        raise ValueError("form is degenerate")
    Tinv = rational_inverse(T)
    return [[sum(Tinv[k][i] * abs(D[k]) * Tinv[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
