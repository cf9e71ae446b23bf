"""Linking forms on finite abelian groups and S-boundaries of forms over Z."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exact_linear import Matrix, rational_inverse, smith_normal_form
from .forms import BudgetExceeded, QuadraticForm, automorphisms, _definite_sign

DEFAULT_ORDER_CAP = 10_000


def _mod1(x: Fraction) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class LinkingForm:
    """``G = sum Z/d_i`` with pairing ``phi`` and refinement ``nu`` in Q/Z.

    ``lifts`` and ``coords`` record how the group was presented as a cokernel
    ``Z^n / lambda Z^n``: column ``i`` of ``lifts`` is a lift of generator
    ``g_i`` and ``coords`` maps a lift back to generator coordinates.  They
    are bookkeeping only and do not take part in equality.
    """

    factors: tuple[int, ...]
    pairing: tuple[tuple[Fraction, ...], ...]
    refinement: tuple[Fraction, ...]
    eps: int = 1
    lifts: Matrix | None = field(default=None, compare=False, repr=False)
    coords: Matrix | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        k = len(self.factors)
        if any(d < 2 for d in self.factors):
            raise ValueError("invariant factors must be at least 2")
        if any(self.factors[i + 1] % self.factors[i] for i in range(k - 1)):
            raise ValueError("invariant factors must form a divisibility chain")
        if len(self.pairing) != k or any(len(r) != k for r in self.pairing):
            raise ValueError("pairing has the wrong shape")
        object.__setattr__(self, "pairing", tuple(tuple(_mod1(x) for x in r) for r in self.pairing))
        object.__setattr__(self, "refinement", tuple(_mod1(x) for x in self.refinement))
        self.validate()

    def validate(self) -> None:
        k = len(self.factors)
        P = self.pairing
        for i in range(k):
            for j in range(k):
                if _mod1(P[i][j] - self.eps * P[j][i]) != 0:
                    raise ValueError("pairing is not eps-symmetric")
                if _mod1(self.factors[i] * P[i][j]) != 0:
                    raise ValueError("pairing is not well defined on the presented group")
        if self.eps == 1:
            if len(self.refinement) != k:
                raise ValueError("refinement has the wrong length")
            for i in range(k):
                if _mod1(2 * self.refinement[i] - P[i][i]) != 0:
                    raise ValueError("refinement does not refine the pairing")
                if _mod1(self.factors[i] ** 2 * self.refinement[i]) != 0:
                    raise ValueError("refinement is not well defined on the presented group")
        elif self.refinement:
            raise ValueError("skew linking forms over Z carry no refinement")

    @property
    def order(self) -> int:
        n = 1
        for d in self.factors:
            n *= d
        return n

    @property
    def ngens(self) -> int:
        return len(self.factors)

    def elements(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.factors))

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(a) % d for a, d in zip(x, self.factors))

    def phi(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        P = self.pairing
        return _mod1(sum(a * P[i][j] * b for i, a in enumerate(x) if a for j, b in enumerate(y) if b))

    def nu(self, x: Sequence[int]) -> Fraction:
        if self.eps != 1:
            return Fraction(0)
        P, r = self.pairing, self.refinement
        k = len(x)
        s = sum(x[i] * x[i] * r[i] for i in range(k))
        s += sum(x[i] * x[j] * P[i][j] for i in range(k) for j in range(i + 1, k))
        return _mod1(s)

    def element_order(self, x: Sequence[int]) -> int:
        from math import gcd

        o = 1
        for a, d in zip(x, self.factors):
            oi = d // gcd(a % d, d)
            o = o * oi // gcd(o, oi)
        return o

    def __neg__(self) -> "LinkingForm":
        return LinkingForm(self.factors, tuple(tuple(-x for x in r) for r in self.pairing),
                           tuple(-x for x in self.refinement), self.eps, self.lifts, self.coords)

    def to_json(self) -> dict:
        return {
            "epsilon": self.eps,
            "factors": [str(d) for d in self.factors],
            "pairing": [[frac_str(x) for x in r] for r in self.pairing],
            "refinement": [frac_str(x) for x in self.refinement],
        }


def s_boundary(v: QuadraticForm) -> LinkingForm:
    """The linking form on ``coker(lambda)`` of a nondegenerate form over Z."""
    if not v.ring.is_integers:
        raise ValueError("S-boundaries are computed over Z only")
    lam = v.lam
    n = v.rank
    if n and lam.det() == 0:
        raise ValueError("form is degenerate")
    if n == 0:
        return LinkingForm((), (), (), v.eps, Matrix.zeros(0, 0), Matrix.zeros(0, 0))
    snf = smith_normal_form(lam)
    d = snf.diagonal
    sel = [i for i, x in enumerate(d) if abs(x) > 1]
    factors = tuple(abs(d[i]) for i in sel)
    lifts = snf.U[:, sel[0]:sel[-1] + 1] if sel else Matrix.zeros(n, 0)
    coords = snf.Uinv[sel[0]:sel[-1] + 1, :] if sel else Matrix.zeros(0, n)
    linv = rational_inverse(lam)
    # z = lambda^{-1} g for each generator g
    zs = []
    for i in range(lifts.ncols):
        g = lifts.col(i)
        zs.append([sum(linv[r][c] * g[c] for c in range(n)) for r in range(n)])
    th = v.theta.rows
    k = len(sel)
    pairing = [[_mod1(sum(lifts[r, i] * zs[j][r] for r in range(n))) for j in range(k)] for i in range(k)]
    if v.eps == 1:
        refinement = [_mod1(sum(z[a] * th[a][b] * z[b] for a in range(n) for b in range(n))) for z in zs]
    else:
        refinement = []
    return LinkingForm(factors, tuple(map(tuple, pairing)), tuple(refinement), v.eps, lifts, coords)


@dataclass(frozen=True)
class LinkingIso:
    """Column ``i`` holds the coordinates of the image of generator ``g_i``."""

    source: LinkingForm
    target: LinkingForm
    images: tuple[tuple[int, ...], ...]

    @property
    def key(self) -> tuple[tuple[int, ...], ...]:
        return self.images

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        k2 = self.target.ngens
        out = [0] * k2
        for a, img in zip(x, self.images):
            if a:
                for j in range(k2):
                    out[j] += a * img[j]
        return self.target.reduce(out)

    def compose(self, first: "LinkingIso") -> "LinkingIso":
        """``self o first``."""
        return LinkingIso(first.source, self.target, tuple(self(img) for img in first.images))

    def negate(self) -> "LinkingIso":
        """``-f``, the composite with the boundary of ``-1``."""
        return LinkingIso(self.source, self.target, tuple(self.target.reduce(-x for x in img) for img in self.images))

    def inverse(self) -> "LinkingIso":
        src, tgt = self.source, self.target
        table = {self(x): x for x in src.elements()}
        gens = [tuple(int(i == j) for j in range(tgt.ngens)) for i in range(tgt.ngens)]
        return LinkingIso(tgt, src, tuple(table[g] for g in gens))

    def is_valid(self) -> bool:
        return check_linking_iso(self.source, self.target, self.images)

    def to_json(self) -> dict:
        return {"images": [[str(x) for x in img] for img in self.images]}


def identity_iso(a: LinkingForm) -> LinkingIso:
    k = a.ngens
    return LinkingIso(a, a, tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))


def check_linking_iso(a: LinkingForm, b: LinkingForm, images) -> bool:
    if a.order != b.order or len(images) != a.ngens:
        return False
    for d, img in zip(a.factors, images):
        if b.reduce(d * x for x in img) != (0,) * b.ngens:
            return False
    for i in range(a.ngens):
        if a.eps == 1 and b.nu(images[i]) != a.refinement[i]:
            return False
        for j in range(a.ngens):
            if b.phi(images[i], images[j]) != a.pairing[i][j]:
                return False
    f = LinkingIso(a, b, tuple(images))
    seen = {f(x) for x in a.elements()}
    return len(seen) == b.order


def induced_iso(A: Matrix, a: LinkingForm, b: LinkingForm) -> LinkingIso:
    """The map on cokernels induced by ``A: V* -> V'*`` (presentations needed)."""
    if a.lifts is None or b.coords is None:
        raise ValueError("linking forms carry no cokernel presentation")
    M = b.coords @ A @ a.lifts
    images = tuple(b.reduce(M.col(i)) for i in range(a.ngens))
    iso = LinkingIso(a, b, images)
    if not iso.is_valid():
        raise ValueError("matrix does not induce an isometry of linking forms")
    return iso


def boundary_of_isometry(h: Matrix, a: LinkingForm, b: LinkingForm) -> LinkingIso:
    """``[h^{-T}]`` for an isometry ``h`` of the underlying forms."""
    return induced_iso(h.inverse().T, a, b)


def enumerate_isometries(a: LinkingForm, b: LinkingForm, order_cap: int = DEFAULT_ORDER_CAP,
                         limit: int | None = None) -> list[LinkingIso]:
    """Every isometry ``a -> b`` by backtracking over generator images."""
    if a.order > order_cap or b.order > order_cap:
        raise BudgetExceeded(f"group order {max(a.order, b.order)} exceeds cap {order_cap}")
    if a.eps != b.eps or a.order != b.order:
        return []
    if a.factors != b.factors:
        return []
    k = a.ngens
    elems = list(b.elements())
    cands = []
    for i in range(k):
        d = a.factors[i]
        c = [x for x in elems
             if b.element_order(x) == d
             and b.phi(x, x) == a.pairing[i][i]
             and (a.eps != 1 or b.nu(x) == a.refinement[i])]
        cands.append(c)
    out: list[LinkingIso] = []
    chosen: list[tuple[int, ...]] = []

    def rec(i: int) -> bool:
        if i == k:
            if check_linking_iso(a, b, chosen):
                out.append(LinkingIso(a, b, tuple(chosen)))
                return limit is not None and len(out) >= limit
            return False
        for x in cands[i]:
            if all(b.phi(y, x) == a.pairing[j][i] for j, y in enumerate(chosen)):
                chosen.append(x)
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    rec(0)
    return out


def linking_forms_isomorphic(a: LinkingForm, b: LinkingForm, order_cap: int = DEFAULT_ORDER_CAP) -> bool:
    if a.factors != b.factors or a.eps != b.eps:
        return False
    return bool(enumerate_isometries(a, b, order_cap, limit=1))


def min_generators(factors: Sequence[int], p: int) -> int:
    """Minimal number of generators of the ``p``-primary part."""
    from .exact_linear import _is_prime

    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    return sum(1 for d in factors if d % p == 0)


def descend_iso(alpha: Matrix, v: QuadraticForm, w: QuadraticForm,
                a: LinkingForm | None = None, b: LinkingForm | None = None) -> LinkingIso:
    """Descend a boundary isomorphism with first component ``alpha``.

    ``alpha`` acts on ``V + P`` and maps into ``W + P'``; the block of
    ``alpha^{-T}`` from ``V*`` to ``W*`` induces the map on cokernels, the
    stabilisation blocks dropping out.
    """
    a = a or s_boundary(v)
    b = b or s_boundary(w)
    ait = alpha.inverse().T
    block = ait[: w.rank, : v.rank]
    return induced_iso(block, a, b)


@dataclass
class OrbitResult:
    status: str  # "Complete" or "Unknown"
    orbits: list[list[LinkingIso]]
    identity_orbit: int | None = None
    note: str = ""

    @property
    def count(self) -> int:
        return len(self.orbits)

    def orbit_of(self, f: LinkingIso) -> int | None:
        for i, orb in enumerate(self.orbits):
            if any(g.key == f.key for g in orb):
                return i
        return None


def boundary_automorphism_images(v: QuadraticForm, a: LinkingForm, cap: int = 100_000) -> list[LinkingIso]:
    """Distinct images of ``Aut(v)`` in ``Aut(s_boundary(v))``."""
    if v.rank == 0:
        return [identity_iso(a)]
    if _definite_sign(v) == 0:
        raise BudgetExceeded("automorphism group of an indefinite form is not enumerated")
    seen = {}
    for h in automorphisms(v, cap=cap):
        g = boundary_of_isometry(h, a, a)
        seen.setdefault(g.key, g)
    return list(seen.values())


def biso_orbits(v: QuadraticForm, w: QuadraticForm, order_cap: int = DEFAULT_ORDER_CAP,
                aut_cap: int = 100_000) -> OrbitResult:
    """Orbits of ``Iso(dv, dw)`` under ``Aut(v) x Aut(w)`` acting through boundaries."""
    a, b = s_boundary(v), s_boundary(w)
    isos = enumerate_isometries(a, b, order_cap)
    try:
        left = boundary_automorphism_images(w, b, aut_cap)
        right = [g.inverse() for g in boundary_automorphism_images(v, a, aut_cap)]
    except BudgetExceeded as exc:
        return OrbitResult("Unknown", [[f] for f in isos], None, str(exc))
    index = {f.key: i for i, f in enumerate(isos)}
    parent = list(range(len(isos)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, f in enumerate(isos):
        for g in left:
            j = index[g.compose(f).key]
            parent[find(i)] = find(j)
        for g in right:
            j = index[f.compose(g).key]
            parent[find(i)] = find(j)
    groups: dict[int, list[LinkingIso]] = {}
    for i, f in enumerate(isos):
        groups.setdefault(find(i), []).append(f)
    orbits = sorted(groups.values(), key=lambda o: min(f.key for f in o))
    ident = None
    if v == w:
        idk = identity_iso(a).key
        ident = next(i for i, o in enumerate(orbits) if any(f.key == idk for f in o))
    return OrbitResult("Complete", orbits, ident)
