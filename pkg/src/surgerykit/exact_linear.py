"""Exact dense linear algebra over Z, F_p and Z/m.

Matrices are immutable and hold canonical integer representatives. Everything
here is exact; rational helpers use :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Ring:
    """Coefficient ring with trivial involution.

    ``kind`` is ``"Z"``, ``"Fp"`` (prime field of order ``modulus``) or
    ``"Zmod"`` (residue ring of order ``modulus``).
    """

    kind: str = "Z"
    modulus: int = 0

    def __post_init__(self):
        if self.kind == "Z":
            if self.modulus != 0:
                raise ValueError("Z carries no modulus")
        elif self.kind == "Fp":
            if not _is_prime(self.modulus):
                raise ValueError(f"Fp needs a prime, got {self.modulus}")
        elif self.kind == "Zmod":
            if self.modulus < 2:
                raise ValueError(f"Zmod needs m >= 2, got {self.modulus}")
        else:
            raise ValueError(f"unknown ring kind {self.kind!r}")

    @property
    def is_integers(self) -> bool:
        return self.kind == "Z"

    @property
    def is_field(self) -> bool:
        return self.kind == "Fp"

    def reduce(self, x: int) -> int:
        return int(x) if self.kind == "Z" else int(x) % self.modulus

    def is_unit(self, x: int) -> bool:
        if self.kind == "Z":
            return x in (1, -1)
        return gcd(int(x) % self.modulus, self.modulus) == 1

    def inverse(self, x: int) -> int:
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not a unit of {self}")
        if self.kind == "Z":
            return int(x)
        return pow(int(x), -1, self.modulus)

    def elements(self):
        """All elements of a finite ring."""
        if self.kind == "Z":
            raise ValueError("Z is infinite")
        return range(self.modulus)

    def to_json(self) -> dict:
        if self.kind == "Z":
            return {"kind": "Z"}
        if self.kind == "Fp":
            return {"kind": "Fp", "p": self.modulus}
        return {"kind": "Zmod", "m": self.modulus}

    @staticmethod
    def from_json(doc: dict) -> "Ring":
        kind = doc.get("kind")
        if kind == "Z":
            return ZZ
        if kind == "Fp":
            return Ring("Fp", int(doc["p"]))
        if kind == "Zmod":
            return Ring("Zmod", int(doc["m"]))
        raise ValueError(f"unknown ring kind {kind!r}")

    def __str__(self) -> str:
        if self.kind == "Z":
            return "Z"
        return f"{'F' if self.kind == 'Fp' else 'Z/'}{self.modulus}"


ZZ = Ring("Z")


def GF(p: int) -> Ring:
    return Ring("Fp", p)


class Matrix:
    """Immutable dense matrix over a :class:`Ring`."""

    __slots__ = ("ring", "nrows", "ncols", "_rows", "_hash")

    def __init__(self, rows: Iterable[Iterable[int]], ring: Ring = ZZ, ncols: int | None = None):
        rows = tuple(tuple(ring.reduce(e) for e in r) for r in rows)
        if rows:
            nc = len(rows[0])
            if any(len(r) != nc for r in rows):
                raise ValueError("ragged matrix")
        else:
            nc = 0 if ncols is None else ncols
        self.ring = ring
        self.nrows = len(rows)
        self.ncols = nc
        self._rows = rows
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def _raw(cls, rows, ring, nrows, ncols) -> "Matrix":
        m = object.__new__(cls)
        m.ring, m.nrows, m.ncols, m._rows, m._hash = ring, nrows, ncols, rows, None
        return m

    @classmethod
    def zeros(cls, nrows: int, ncols: int, ring: Ring = ZZ) -> "Matrix":
        return cls._raw(tuple((0,) * ncols for _ in range(nrows)), ring, nrows, ncols)

    @classmethod
    def identity(cls, n: int, ring: Ring = ZZ) -> "Matrix":
        return cls._raw(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), ring, n, n)

    @classmethod
    def diag(cls, entries: Sequence[int], ring: Ring = ZZ) -> "Matrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], ring)

    @classmethod
    def column(cls, vec: Sequence[int], ring: Ring = ZZ) -> "Matrix":
        return cls([[x] for x in vec], ring, ncols=1)

    # basic access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    def __getitem__(self, ij):
        i, j = ij
        if isinstance(i, slice) or isinstance(j, slice):
            ri = range(self.nrows)[i] if isinstance(i, slice) else [i]
            cj = range(self.ncols)[j] if isinstance(j, slice) else [j]
            rows = tuple(tuple(self._rows[a][b] for b in cj) for a in ri)
            return Matrix._raw(rows, self.ring, len(ri), len(cj))
        return self._rows[i][j]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._rows)

    def cols(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self.ncols)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, self._rows))
        return self._hash

    def __repr__(self) -> str:
        return f"Matrix({self.tolist()!r}, ring={self.ring})"

    # arithmetic ---------------------------------------------------------
    def _check_same(self, other: "Matrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        red = self.ring.reduce
        rows = tuple(tuple(red(a + b) for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows))
        return Matrix._raw(rows, self.ring, self.nrows, self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        red = self.ring.reduce
        rows = tuple(tuple(red(a - b) for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows))
        return Matrix._raw(rows, self.ring, self.nrows, self.ncols)

    def __neg__(self) -> "Matrix":
        red = self.ring.reduce
        return Matrix._raw(tuple(tuple(red(-a) for a in r) for r in self._rows), self.ring, self.nrows, self.ncols)

    def scale(self, c: int) -> "Matrix":
        red = self.ring.reduce
        return Matrix._raw(tuple(tuple(red(c * a) for a in r) for r in self._rows), self.ring, self.nrows, self.ncols)

    def __rmul__(self, c: int) -> "Matrix":
        return self.scale(c)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        red = self.ring.reduce
        ocols = list(zip(*other._rows)) if other.nrows else [()] * other.ncols
        rows = tuple(tuple(red(sum(a * b for a, b in zip(r, c))) for c in ocols) for r in self._rows)
        return Matrix._raw(rows, self.ring, self.nrows, other.ncols)

    @property
    def T(self) -> "Matrix":
        rows = tuple(zip(*self._rows)) if self.nrows else tuple(() for _ in range(self.ncols))
        return Matrix._raw(tuple(tuple(r) for r in rows), self.ring, self.ncols, self.nrows)

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._rows for a in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def change_ring(self, ring: Ring) -> "Matrix":
        return Matrix(self._rows, ring, ncols=self.ncols)

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        red = self.ring.reduce
        return tuple(red(sum(a * b for a, b in zip(r, vec))) for r in self._rows)

    # invariants ---------------------------------------------------------
    def det(self) -> int:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        if self.ring.is_field:
            return _det_field(self.tolist(), self.ring.modulus)
        return self.ring.reduce(_det_bareiss(self.tolist()))

    def is_invertible(self) -> bool:
        return self.is_square() and self.ring.is_unit(self.det())

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        if self.ring.is_field:
            inv = _inverse_field(self.tolist(), self.ring.modulus)
            if inv is None:
                raise ZeroDivisionError("singular matrix")
            return Matrix(inv, self.ring, ncols=n)
        d = _det_bareiss(self.tolist())
        if not self.ring.is_unit(d):
            raise ZeroDivisionError(f"matrix with determinant {d} is not invertible over {self.ring}")
        q = rational_inverse(self)
        adj = [[int(x * d) for x in r] for r in q]
        dinv = self.ring.inverse(d)
        return Matrix([[a * dinv for a in r] for r in adj], self.ring, ncols=n)

    def rank(self) -> int:
        if self.ring.is_field:
            return len(_rref_field(self.tolist(), self.ring.modulus)[1])
        if not self.ring.is_integers:
            raise ValueError("rank over a non-domain is not offered")
        return rational_rank(self)


# block helpers -------------------------------------------------------------

def hstack(*ms: Matrix) -> Matrix:
    ms = [m for m in ms]
    ring = ms[0].ring
    n = ms[0].nrows
    for m in ms:
        if m.nrows != n:
            raise ValueError("hstack row mismatch")
    rows = tuple(tuple(x for m in ms for x in m.rows[i]) for i in range(n))
    return Matrix._raw(rows, ring, n, sum(m.ncols for m in ms))


def vstack(*ms: Matrix) -> Matrix:
    ring = ms[0].ring
    nc = ms[0].ncols
    for m in ms:
        if m.ncols != nc:
            raise ValueError("vstack column mismatch")
    rows = tuple(r for m in ms for r in m.rows)
    return Matrix._raw(rows, ring, len(rows), nc)


def block(grid: Sequence[Sequence[Matrix]]) -> Matrix:
    return vstack(*[hstack(*row) for row in grid])


def direct_sum(*ms: Matrix, ring: Ring | None = None) -> Matrix:
    if not ms:
        return Matrix.zeros(0, 0, ring or ZZ)
    ring = ring or ms[0].ring
    nr = sum(m.nrows for m in ms)
    nc = sum(m.ncols for m in ms)
    out = [[0] * nc for _ in range(nr)]
    r0 = c0 = 0
    for m in ms:
        for i in range(m.nrows):
            out[r0 + i][c0:c0 + m.ncols] = m.rows[i]
        r0 += m.nrows
        c0 += m.ncols
    return Matrix(out, ring, ncols=nc)


# determinants and rational elimination --------------------------------------

def _det_bareiss(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    a = [r[:] for r in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _det_field(a: list[list[int]], p: int) -> int:
    n = len(a)
    a = [[x % p for x in r] for r in a]
    det = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det = det * a[k][k] % p
        inv = pow(a[k][k], -1, p)
        for i in range(k + 1, n):
            f = a[i][k] * inv % p
            if f:
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[k])]
    return det % p


def _rref_field(a: list[list[int]], p: int) -> tuple[list[list[int]], list[int]]:
    a = [[x % p for x in r] for r in a]
    m = len(a)
    n = len(a[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def _inverse_field(a: list[list[int]], p: int):
    n = len(a)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(a)]
    red, piv = _rref_field(aug, p)
    if piv[:n] != list(range(n)):
        return None
    return [r[n:] for r in red]


def rational_rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    a = [[Fraction(x) for x in r] for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def rational_rank(A: Matrix) -> int:
    if A.nrows == 0 or A.ncols == 0:
        return 0
    return len(rational_rref(A.rows)[1])


def rational_inverse(A: Matrix | Sequence[Sequence]) -> list[list[Fraction]]:
    """Inverse over Q of an integer (or rational) square matrix."""
    rows = A.rows if isinstance(A, Matrix) else A
    n = len(rows)
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    red, piv = rational_rref(aug) if n else ([], [])
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in red]


# Smith normal form ----------------------------------------------------------

@dataclass(frozen=True)
class SNFResult:
    """``A = U @ D @ W`` with ``U``, ``W`` unimodular and ``D`` diagonal.

    ``Uinv`` and ``Winv`` are carried along because callers need them for
    kernels and cokernels.
    """

    U: Matrix
    D: Matrix
    W: Matrix
    Uinv: Matrix
    Winv: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.shape))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A: Matrix) -> SNFResult:
    """Smith normal form over Z with smallest-magnitude pivoting.

    Examples
    --------
    >>> smith_normal_form(Matrix([[2, 4], [0, 6]])).diagonal
    [2, 6]
    """
    if not A.ring.is_integers:
        raise ValueError(f"Smith normal form needs integer entries, got ring {A.ring}")
    m, n = A.shape
    a = A.tolist()
    L = [[int(i == j) for j in range(m)] for i in range(m)]
    Li = [[int(i == j) for j in range(m)] for i in range(m)]
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    Ri = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        L[i], L[j] = L[j], L[i]
        for r in Li:
            r[i], r[j] = r[j], r[i]

    def add_row(i, j, c):  # row_i += c * row_j
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        L[i] = [x + c * y for x, y in zip(L[i], L[j])]
        for r in Li:
            r[j] -= c * r[i]

    def neg_row(i):
        a[i] = [-x for x in a[i]]
        L[i] = [-x for x in L[i]]
        for r in Li:
            r[i] = -r[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in R:
            r[i], r[j] = r[j], r[i]
        Ri[i], Ri[j] = Ri[j], Ri[i]

    def add_col(i, j, c):  # col_i += c * col_j
        for r in a:
            r[i] += c * r[j]
        for r in R:
            r[i] += c * r[j]
        Ri[j] = [x - c * y for x, y in zip(Ri[j], Ri[i])]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = a[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, bi, bj = best
            if bi != t:
                swap_rows(t, bi)
            if bj != t:
                swap_cols(t, bj)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    add_row(i, t, -q)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    add_col(j, t, -q)
                    if a[t][j]:
                        dirty = True
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if t < m and t < n and a[t][t] < 0:
            neg_row(t)
        if best is None:
            break
    D = Matrix(a, ZZ, ncols=n)
    return SNFResult(
        U=Matrix(Li, ZZ, ncols=m),
        D=D,
        W=Matrix(Ri, ZZ, ncols=n),
        Uinv=Matrix(L, ZZ, ncols=m),
        Winv=Matrix(R, ZZ, ncols=n),
    )


# kernels, solving, primitivity ----------------------------------------------

def kernel_basis(A: Matrix) -> Matrix:
    """Columns form a basis of ``ker A`` (a direct summand over Z)."""
    ring = A.ring
    n = A.ncols
    if ring.is_integers:
        snf = smith_normal_form(A)
        r = snf.rank
        return snf.Winv[:, r:] if r < n else Matrix.zeros(n, 0)
    if ring.is_field:
        p = ring.modulus
        if A.nrows == 0:
            return Matrix.identity(n, ring)
        red, piv = _rref_field(A.tolist(), p)
        free = [c for c in range(n) if c not in piv]
        basis = []
        for f in free:
            v = [0] * n
            v[f] = 1
            for r, c in enumerate(piv):
                v[c] = (-red[r][f]) % p
            basis.append(v)
        if not basis:
            return Matrix.zeros(n, 0, ring)
        return Matrix(basis, ring).T
    raise ValueError(f"kernels over {ring} are not offered")


def det_and_unit_test(A: Matrix) -> tuple[int, bool]:
    if not A.is_square():
        raise ValueError("determinant of a non-square matrix")
    d = A.det()
    return d, A.ring.is_unit(d)


def solve(A: Matrix, B: Matrix) -> Matrix | None:
    """One solution ``X`` of ``A X = B`` over the ring of ``A``, or ``None``."""
    ring = A.ring
    if A.nrows != B.nrows:
        raise ValueError("solve: row mismatch")
    n, k = A.ncols, B.ncols
    if ring.is_integers:
        snf = smith_normal_form(A)
        c = (snf.Uinv @ B).tolist()
        d = snf.diagonal
        y = [[0] * k for _ in range(n)]
        for i in range(A.nrows):
            di = d[i] if i < len(d) else 0
            for j in range(k):
                if di == 0:
                    if c[i][j] != 0:
                        return None
                elif c[i][j] % di:
                    return None
                else:
                    y[i][j] = c[i][j] // di
        return snf.Winv @ Matrix(y, ZZ, ncols=k)
    if ring.is_field:
        p = ring.modulus
        aug = [list(a) + list(b) for a, b in zip(A.rows, B.rows)]
        if not aug:
            return Matrix.zeros(n, k, ring)
        red, piv = _rref_field(aug, p)
        if any(c >= n for c in piv):
            return None
        x = [[0] * k for _ in range(n)]
        for r, c in enumerate(piv):
            x[c] = red[r][n:]
        return Matrix(x, ring, ncols=k)
    raise ValueError(f"solving over {ring} is not offered")


def is_primitive(B: Matrix) -> bool:
    """Whether the columns of ``B`` extend to a basis of the ambient module."""
    if B.ncols == 0:
        return True
    if B.ring.is_integers:
        d = smith_normal_form(B).diagonal
        return len(d) == B.ncols and all(x == 1 for x in d)
    if B.ring.is_field:
        return B.rank() == B.ncols
    raise ValueError(f"primitivity over {B.ring} is not offered")


def complete_basis(B: Matrix) -> Matrix:
    """Columns ``C`` with ``[B | C]`` invertible; ``B`` must be primitive."""
    n, k = B.shape
    ring = B.ring
    if ring.is_integers:
        snf = smith_normal_form(B)
        if not all(x == 1 for x in snf.diagonal) or len(snf.diagonal) != k:
            raise ValueError("columns are not primitive")
        return snf.U[:, k:] if k < n else Matrix.zeros(n, 0)
    if ring.is_field:
        chosen = B
        extra = []
        for i in range(n):
            e = Matrix.column([int(i == j) for j in range(n)], ring)
            trial = hstack(chosen, e)
            if trial.rank() == trial.ncols:
                chosen = trial
                extra.append(e)
            if chosen.ncols == n:
                break
        if chosen.ncols != n:
            raise ValueError("columns are not independent")
        return hstack(*extra) if extra else Matrix.zeros(n, 0, ring)
    raise ValueError(f"basis completion over {ring} is not offered")


def saturate(B: Matrix) -> Matrix:
    """Basis of the saturation of the column span of an integer matrix."""
    if B.ncols == 0:
        return B
    snf = smith_normal_form(B)
    return snf.U[:, : snf.rank]


def vec_gcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


# lattice reduction ------------------------------------------------------------

def _inner(gram):
    if gram is None:
        return lambda x, y: sum(Fraction(a) * b for a, b in zip(x, y))
    n = len(gram)
    return lambda x, y: sum(x[i] * gram[i][j] * y[j] for i in range(n) if x[i] for j in range(n) if y[j])


def _gram_schmidt(vs, ip) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Squared norms of the Gram-Schmidt vectors and the coefficients ``mu``."""
    n = len(vs)
    G = [[Fraction(ip(vs[i], vs[j])) for j in range(n)] for i in range(n)]
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms: list[Fraction] = []
    for i in range(n):
        for j in range(i):
            if norms[j] == 0:
                continue
            mu[i][j] = (G[i][j] - sum(mu[j][t] * mu[i][t] * norms[t] for t in range(j))) / norms[j]
        norms.append(G[i][i] - sum(mu[i][t] ** 2 * norms[t] for t in range(i)))
    return norms, mu


def _lll(vs: list[list[int]], ip, delta: Fraction) -> list[list[int]]:
    n = len(vs)
    if n <= 1:
        return vs
    norms, mu = _gram_schmidt(vs, ip)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                vs[k] = [a - q * b for a, b in zip(vs[k], vs[j])]
                for i in range(j + 1):
                    mu[k][i] -= q * (mu[j][i] if i < j else 1)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            vs[k], vs[k - 1] = vs[k - 1], vs[k]
            norms, mu = _gram_schmidt(vs, ip)
            k = max(k - 1, 1)
    return vs


def lll_reduce(B: Matrix, delta: Fraction = Fraction(3, 4)) -> Matrix:
    """LLL-reduced basis of the lattice spanned by the (independent) columns of ``B``."""
    if not B.ring.is_integers:
        raise ValueError("lattice reduction is over Z")
    vs = [list(B.col(j)) for j in range(B.ncols)]
    if len(vs) <= 1:
        return B
    return Matrix(_lll(vs, _inner(None), delta), ZZ).T


def lll_gram(gram: Sequence[Sequence[Fraction]], delta: Fraction = Fraction(3, 4)) -> Matrix:
    """Unimodular ``U`` whose columns are an LLL-reduced basis for the positive definite ``gram``."""
    n = len(gram)
    vs = [[int(i == j) for j in range(n)] for i in range(n)]
    return Matrix(_lll(vs, _inner([[Fraction(x) for x in r] for r in gram]), delta), ZZ).T


def reduce_modulo(v: Matrix, B: Matrix) -> Matrix:
    """Shorten the column ``v`` by subtracting lattice vectors from the columns of ``B``.

    Babai's nearest-plane rounding; best with an LLL-reduced ``B``.
    """
    if B.ncols == 0:
        return v
    vs = [list(B.col(j)) for j in range(B.ncols)]
    ip = _inner(None)
    bstar: list[list[Fraction]] = []
    for b in vs:
        w = [Fraction(a) for a in b]
        for u in bstar:
            nu = ip(u, u)
            if nu:
                c = ip(b, u) / nu
                w = [a - c * x for a, x in zip(w, u)]
        bstar.append(w)
    w = list(v.col(0))
    for j in range(len(vs) - 1, -1, -1):
        nb = ip(bstar[j], bstar[j])
        if nb == 0:
            continue
        c = round(ip(w, bstar[j]) / nb)
        if c:
            w = [a - c * b for a, b in zip(w, vs[j])]
    return Matrix.column(w, ZZ)
