"""Clifford algebras of quadratic lattices over Q, with exact structure constants.

Generators e_0..e_{n-1} satisfy e_i e_j + e_j e_i = 2 eps G_ij, so v^2 = eps Q(v)
where Q(x) = x^T G x.  Monomials are indexed by bitmasks; mask m stands for the
ordered product of the e_i with bit i set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from .numth import is_rational_square
from .quatalg import SearchBoundExceeded


class DegenerateForm(ValueError):
    pass


class ConventionMismatch(RuntimeError):
    pass


def _frac_matrix(g) -> tuple:
    g = [[Fraction(x) for x in row] for row in np.asarray(g, dtype=object).tolist()]
    n = len(g)
    for i in range(n):
        for j in range(n):
            if g[i][j] != g[j][i]:
                raise ValueError("Gram matrix must be symmetric")
    return tuple(tuple(r) for r in g)


@dataclass(frozen=True)
class QuadLattice:
    """Lattice Z^n with bilinear form <x, y> = x^T G y and Q(x) = <x, x>."""
    gram: tuple
    signature: tuple = None

    def __post_init__(self):
        g = _frac_matrix(self.gram)
        object.__setattr__(self, "gram", g)
        ev = np.linalg.eigvalsh(np.array(g, dtype=float))
        sig = (int((ev > 0).sum()), int((ev < 0).sum()))
        if self.signature is not None and tuple(self.signature) != sig:
            raise ValueError(f"signature {self.signature} does not match {sig}")
        object.__setattr__(self, "signature", sig)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def det(self) -> Fraction:
        return _det(self.gram)

    def Q(self, x) -> Fraction:
        return sum(Fraction(x[i]) * self.gram[i][j] * x[j]
                   for i in range(self.rank) for j in range(self.rank))

    @property
    def is_diagonal(self) -> bool:
        n = self.rank
        return all(self.gram[i][j] == 0 for i in range(n) for j in range(n) if i != j)


def _det(m) -> Fraction:
    # Fraction Gaussian elimination
    a = [list(map(Fraction, r)) for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] * inv
            if f:
                row_c = a[c]
                a[r] = [x - f * y for x, y in zip(a[r], row_c)]
    return det


def _rank(rows) -> int:
    a = [list(map(Fraction, r)) for r in rows]
    if not a:
        return 0
    rank, ncol = 0, len(a[0])
    for c in range(ncol):
        piv = next((r for r in range(rank, len(a)) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(len(a)):
            if r != rank and a[r][c]:
                f = a[r][c] / a[rank][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def _popcount(m: int) -> int:
    return bin(m).count("1")


class CliffordAlgebra:
    """C(L) with sign convention eps; the multiplication table is built eagerly."""

    def __init__(self, lattice: QuadLattice, eps: int = 1):
        if eps not in (1, -1):
            raise ValueError("eps must be +1 or -1")
        self.lattice = lattice
        self.eps = eps
        self.n = lattice.rank
        self.dim = 1 << self.n
        self._G = [[eps * 2 * lattice.gram[i][j] for j in range(self.n)] for i in range(self.n)]
        self.mul_table = self._build_table()

    # monomial times generator, via e_j e_i = -e_i e_j + 2 eps G_ij
    def _mono_gen(self, word: tuple, j: int) -> dict:
        if not word or word[-1] < j:
            return {word + (j,): Fraction(1)}
        last = word[-1]
        head = word[:-1]
        out: dict = {}
        if last == j:
            c = self._G[j][j] / 2
            if c:
                out[head] = c
            return out
        # head e_last e_j = -(head e_j) e_last + 2 eps G_{last j} head
        for w, c in self._mono_gen(head, j).items():
            for w2, c2 in self._mono_gen(w, last).items():
                out[w2] = out.get(w2, 0) - c * c2
        if self._G[last][j]:
            out[head] = out.get(head, 0) + self._G[last][j]
        return {w: c for w, c in out.items() if c}

    def _build_table(self):
        words = [tuple(i for i in range(self.n) if m >> i & 1) for m in range(self.dim)]
        table = []
        for a in range(self.dim):
            row = []
            for b in range(self.dim):
                cur = {words[a]: Fraction(1)}
                for j in words[b]:
                    nxt: dict = {}
                    for w, c in cur.items():
                        for w2, c2 in self._mono_gen(w, j).items():
                            nxt[w2] = nxt.get(w2, 0) + c * c2
                    cur = {w: c for w, c in nxt.items() if c}
                row.append(tuple((sum(1 << i for i in w), c) for w, c in cur.items()))
            table.append(row)
        return table

    # --- elements ---------------------------------------------------------
    def elt(self, coeffs) -> "CliffordElt":
        return CliffordElt(self, tuple(Fraction(c) for c in coeffs))

    def zero(self):
        return self.elt([0] * self.dim)

    def scalar(self, c):
        v = [0] * self.dim
        v[0] = c
        return self.elt(v)

    def mono(self, mask: int, c=1):
        v = [0] * self.dim
        v[mask] = c
        return self.elt(v)

    def gen(self, i: int):
        return self.mono(1 << i)

    def vector(self, x):
        v = [0] * self.dim
        for i, c in enumerate(x):
            v[1 << i] = c
        return self.elt(v)

    def basis(self):
        return [self.mono(m) for m in range(self.dim)]

    def even_masks(self):
        return [m for m in range(self.dim) if _popcount(m) % 2 == 0]

    def odd_masks(self):
        return [m for m in range(self.dim) if _popcount(m) % 2 == 1]

    def mul(self, x, y):
        out = [Fraction(0)] * self.dim
        tab = self.mul_table
        for a, ca in enumerate(x.coeffs):
            if not ca:
                continue
            row = tab[a]
            for b, cb in enumerate(y.coeffs):
                if not cb:
                    continue
                cab = ca * cb
                for m, c in row[b]:
                    out[m] += cab * c
        return CliffordElt(self, tuple(out))

    def is_associative(self) -> bool:
        B = self.basis()
        return all(self.mul(self.mul(x, y), z) == self.mul(x, self.mul(y, z))
                   for x in B for y in B for z in B)

    def inverse(self, x):
        """Inverse through the left-regular representation (exact)."""
        M = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for b in range(self.dim):
            col = self.mul(x, self.mono(b)).coeffs
            for r in range(self.dim):
                M[r][b] = col[r]
        rhs = [Fraction(0)] * self.dim
        rhs[0] = Fraction(1)
        return self.elt(_solve(M, rhs))

    # --- involutions (only sign flips in an orthogonal basis) --------------
    def _rev_sign(self, m):
        k = _popcount(m)
        return -1 if (k * (k - 1) // 2) % 2 else 1

    def reversal(self, x):
        self._require_orthogonal()
        return self.elt([self._rev_sign(m) * c for m, c in enumerate(x.coeffs)])

    def grade_involution(self, x):
        return self.elt([(-1) ** _popcount(m) * c for m, c in enumerate(x.coeffs)])

    def conjugation(self, x):
        self._require_orthogonal()
        return self.elt([self._rev_sign(m) * (-1) ** _popcount(m) * c
                         for m, c in enumerate(x.coeffs)])

    def involution(self, name: str):
        return {"reversal": self.reversal, "conjugation": self.conjugation}[name]

    def _require_orthogonal(self):
        if not self.lattice.is_diagonal:
            raise NotImplementedError("involutions are implemented for diagonal Gram matrices")

    def degree(self) -> int:
        # reduced degree of the central simple algebra used for Trd: sqrt of dim over the centre
        return isqrt(self.dim >> (self.n % 2))

    def trd(self, x) -> Fraction:
        return self.degree() * x.coeffs[0]


@dataclass(frozen=True, eq=True)
class CliffordElt:
    parent: CliffordAlgebra = field(compare=False, repr=False)
    coeffs: tuple

    def __add__(self, o):
        return CliffordElt(self.parent, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o):
        return CliffordElt(self.parent, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __neg__(self):
        return CliffordElt(self.parent, tuple(-a for a in self.coeffs))

    def __mul__(self, o):
        if isinstance(o, CliffordElt):
            return self.parent.mul(self, o)
        o = Fraction(o)
        return CliffordElt(self.parent, tuple(a * o for a in self.coeffs))

    __rmul__ = __mul__

    def is_scalar(self, c=None) -> bool:
        if any(self.coeffs[1:]):
            return False
        return c is None or self.coeffs[0] == c

    def support(self):
        return {m: c for m, c in enumerate(self.coeffs) if c}


def _solve(M, rhs):
    n = len(M)
    a = [list(M[i]) + [rhs[i]] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("element is not invertible")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [v - f * w for v, w in zip(a[r], a[c])]
    return [a[i][n] for i in range(n)]


def clifford_algebra(lattice, eps: int = 1) -> CliffordAlgebra:
    if not isinstance(lattice, QuadLattice):
        lattice = QuadLattice(lattice)
    return CliffordAlgebra(lattice, eps)


# --- theta, delta, symplectic forms ----------------------------------------

def _mask(*idx):
    return sum(1 << i for i in idx)


def find_theta(C: CliffordAlgebra, D_B: int, max_height: int = 256, max_den: int = 64):
    """theta with iota(theta) = -theta and theta^2 = -D_B.

    theta is sought in the pure part of B0 = C^+ of span(e_1, ..., e_{n-1}), spanned
    by the pairwise anticommuting bivectors e_i e_j (1 <= i < j).  For rank 4 these
    are three monomials and theta^2 is the scalar -sum_S c_S^2 (e_S)^2 / t^2.
    Solutions are ordered by denominator t, then by max |c|, then lexicographically,
    so the output is deterministic.  Integer coefficients (t = 1 on the monomials)
    cannot work on the V0 lattice because every (e_S)^2 is divisible by dF, so the
    denominator is measured against the monomials scaled by dF.
    """
    lat = C.lattice
    if not lat.is_diagonal or lat.rank != 4:
        raise NotImplementedError("find_theta expects the diagonal rank-4 lattice V0")
    q = [lat.gram[i][i] for i in range(4)]
    monos = [_mask(1, 2), _mask(1, 3), _mask(2, 3)]
    # (e_i e_j)^2 = -eps^2 Q_i Q_j
    w = [-q[1] * q[2], -q[1] * q[3], -q[2] * q[3]]
    # common scale: pick s with w_S / s^2 integral and small
    s = _common_scale(w)
    wi = [int(x / (s * s)) for x in w]
    target_base = -D_B
    for t in range(1, max_den + 1):
        # sum wi c_i^2 = -D_B t^2
        sol = _ternary_search(wi, target_base * t * t, max_height)
        if sol is not None:
            c = [Fraction(ci, 1) / (s * t) for ci in sol]
            if gcd(gcd(gcd(sol[0], sol[1]), sol[2]), t) != 1:
                continue
            theta = C.zero()
            for m, ci in zip(monos, c):
                theta = theta + C.mono(m, ci)
            assert C.mul(theta, theta).is_scalar(-D_B)
            return theta
    raise SearchBoundExceeded("no theta within the search bounds")


def _common_scale(w) -> Fraction:
    # largest integer s with s^2 dividing every w_i (w_i integers here)
    ints = [int(x) for x in w]
    g = 0
    for x in ints:
        g = gcd(g, x)
    s = 1
    p = 2
    g = abs(g)
    while p * p <= g:
        while g % (p * p) == 0:
            s *= p
            g //= p * p
        while g % p == 0:
            g //= p
        p += 1
    return Fraction(s)


def _ternary_search(w, target, H):
    """Least (max|c|, lex) integer c with w0 c0^2 + w1 c1^2 + w2 c2^2 = target, |c| <= H."""
    r = np.arange(-H, H + 1, dtype=np.int64)
    c0, c1 = np.meshgrid(r, r, indexing="ij")
    rest = target - w[0] * c0 * c0 - w[1] * c1 * c1
    ok = (rest % w[2] == 0)
    sq = np.where(ok, rest // w[2], -1)
    ok &= sq >= 0
    c2 = np.where(ok, np.rint(np.sqrt(np.maximum(sq, 0))).astype(np.int64), 0)
    ok &= (c2 * c2 == sq) & (c2 <= H)
    sols = []
    for i, j in zip(*np.nonzero(ok)):
        a0, a1, a2 = int(c0[i, j]), int(c1[i, j]), int(c2[i, j])
        for z in ((a2,) if a2 == 0 else (-a2, a2)):
            sols.append((max(abs(a0), abs(a1), abs(z)), (a0, a1, z)))
    return min(sols)[1] if sols else None


def find_delta(C: CliffordAlgebra, dF: int):
    """delta in the centre of C^+ with delta^2 = dF.

    For even rank the centre of C^+ is spanned by 1 and I = e_0 ... e_{n-1}; I^2 is
    a rational scalar and delta = r I with r^2 I^2 = dF, r > 0 rational.
    """
    if C.n % 2:
        raise ValueError("needs even rank")
    I = C.mono(C.dim - 1)
    I2 = C.mul(I, I)
    assert I2.is_scalar()
    ratio = Fraction(dF) / I2.coeffs[0]
    if not is_rational_square(ratio):
        raise SearchBoundExceeded("dF / I^2 is not a rational square")
    r = Fraction(isqrt(ratio.numerator), isqrt(ratio.denominator))
    return I * r


def symplectic_matrix(C: CliffordAlgebra, theta, masks=None, involution="conjugation"):
    """M[x][y] = Trd(iota(y) theta x) over the monomial basis (or a sub-basis)."""
    masks = list(range(C.dim)) if masks is None else list(masks)
    iota = C.involution(involution)
    tx = [C.mul(theta, C.mono(m)) for m in masks]
    iy = [iota(C.mono(m)) for m in masks]
    return [[C.trd(C.mul(iy[j], tx[i])) for j in range(len(masks))] for i in range(len(masks))]


@dataclass(frozen=True)
class SymplecticForm:
    matrix: tuple
    masks: tuple

    @property
    def is_antisymmetric(self) -> bool:
        n = len(self.matrix)
        return all(self.matrix[i][j] == -self.matrix[j][i] for i in range(n) for j in range(n))

    def det(self) -> Fraction:
        return _det(self.matrix)


def symplectic_form(C, theta, masks=None, involution="conjugation") -> SymplecticForm:
    M = symplectic_matrix(C, theta, masks, involution)
    form = SymplecticForm(tuple(tuple(r) for r in M), tuple(masks or range(C.dim)))
    if form.det() == 0:
        raise DegenerateForm("symplectic form is degenerate; theta is invalid")
    return form


def star_involution(C, theta, c, involution="conjugation"):
    """c* = theta iota(c) theta^(-1)."""
    inv = C.inverse(theta)
    return C.mul(C.mul(theta, C.involution(involution)(c)), inv)


def positivity_check(C, theta, involution="conjugation", tol=1e-9) -> bool:
    """Is (c, d) -> Trd(c d*) positive definite on C tensor R?"""
    B = C.basis()
    stars = [star_involution(C, theta, b, involution) for b in B]
    M = np.array([[float(C.trd(C.mul(x, sd))) for sd in stars] for x in B])
    sym = (M + M.T) / 2
    if np.abs(M - M.T).max() > tol * max(1.0, np.abs(M).max()):
        return False
    return bool(np.linalg.eigvalsh(sym).min() > tol)


# --- Lambda and beta --------------------------------------------------------

def build_lambda(L: QuadLattice, qe=1) -> QuadLattice:
    """Lambda = L + Z e with Q(e) = 1, orthogonal direct sum."""
    if tuple(L.signature) != (2, 2):
        raise ValueError("L must have signature (2, 2)")
    n = L.rank
    g = [list(r) + [Fraction(0)] for r in L.gram] + [[Fraction(0)] * n + [Fraction(qe)]]
    return QuadLattice(tuple(tuple(r) for r in g))


@dataclass
class BetaMap:
    """beta(c) = c on even monomials and c e on odd monomials, from C(L) to C^+(Lambda)."""
    C_L: CliffordAlgebra
    C_Lam: CliffordAlgebra
    matrix: list  # column b = beta(e_b) in the C(Lambda) monomial basis

    def __call__(self, x):
        out = [Fraction(0)] * self.C_Lam.dim
        for b, c in enumerate(x.coeffs):
            if c:
                for r, v in self.matrix[b]:
                    out[r] += c * v
        return self.C_Lam.elt(out)

    def rank(self) -> int:
        rows = [[0] * self.C_Lam.dim for _ in range(self.C_L.dim)]
        for b, col in enumerate(self.matrix):
            for r, v in col:
                rows[b][r] = v
        return _rank(rows)

    def embed(self, x):
        """Plain inclusion C(L) -> C(Lambda) on monomials (no e)."""
        return self.C_Lam.elt(list(x.coeffs) + [0] * (self.C_Lam.dim - self.C_L.dim))

    def is_multiplicative(self) -> bool:
        B = self.C_L.basis()
        img = [self(b) for b in B]
        for i, x in enumerate(B):
            for j, y in enumerate(B):
                if self(self.C_L.mul(x, y)) != self.C_Lam.mul(img[i], img[j]):
                    return False
        return True


def beta_map(C_L: CliffordAlgebra, C_Lam: CliffordAlgebra) -> BetaMap:
    n = C_L.n
    if C_Lam.n != n + 1 or C_Lam.eps != C_L.eps:
        raise ValueError("C_Lam must be built on Lambda = L + Z e with the same eps")
    e = C_Lam.gen(n)
    cols = []
    for m in range(C_L.dim):
        x = C_Lam.mono(m)
        if _popcount(m) % 2:
            x = C_Lam.mul(x, e)
        cols.append(tuple((r, v) for r, v in enumerate(x.coeffs) if v))
    return BetaMap(C_L, C_Lam, cols)


def select_beta_convention(L: QuadLattice):
    """Try eps = +1 and -1; return (eps, C_L, C_Lam, beta) for the multiplicative choice."""
    Lam = build_lambda(L)
    for eps in (1, -1):
        C_L, C_Lam = clifford_algebra(L, eps), clifford_algebra(Lam, eps)
        beta = beta_map(C_L, C_Lam)
        if beta.is_multiplicative():
            return eps, C_L, C_Lam, beta
    raise ConventionMismatch("beta is multiplicative for neither sign convention")


def beta_preserves_forms(beta: BetaMap, theta, involution_L="conjugation") -> bool:
    """Entrywise equality Trd_L(iota_L(y) theta x) = Trd_Lam(iota(beta y) theta beta x)."""
    C_L, C_Lam = beta.C_L, beta.C_Lam
    th = beta.embed(theta)
    ML = symplectic_matrix(C_L, theta, involution=involution_L)
    rev = C_Lam.reversal
    imgs = [beta(C_L.mono(m)) for m in range(C_L.dim)]
    tx = [C_Lam.mul(th, b) for b in imgs]
    for i in range(C_L.dim):
        for j in range(C_L.dim):
            if C_Lam.trd(C_Lam.mul(rev(imgs[j]), tx[i])) != ML[i][j]:
                return False
    return True


def beta_intertwines(beta: BetaMap, involution_L="conjugation") -> bool:
    """beta(iota_L c) = iota_Lam(beta c) on every monomial; iota_Lam is the reversal."""
    C_L, C_Lam = beta.C_L, beta.C_Lam
    iota = C_L.involution(involution_L)
    return all(beta(iota(C_L.mono(m))) == C_Lam.reversal(beta(C_L.mono(m)))
               for m in range(C_L.dim))


def verify_L_embedding(C: CliffordAlgebra, dF: int, involution="reversal"):
    """Fixed space of iota on odd elements anticommuting with delta.

    Returns (rank, scale) where the induced squares satisfy x^2 = scale * Q(x) on a
    basis of the fixed space transported back to L: scale = eps for the reversal
    (the fixed space is L itself) and -dF eps for the conjugation (it is delta L).
    """
    delta = find_delta(C, dF)
    iota = C.involution(involution)
    odd = C.odd_masks()
    fixed = [m for m in odd if iota(C.mono(m)) == C.mono(m)]
    anti = [m for m in fixed
            if C.mul(C.mono(m), delta) == -C.mul(delta, C.mono(m))]
    n = C.n
    scale = None
    for i in range(n):
        v = C.gen(i)
        x = v if (1 << i) in anti else C.mul(delta, v)
        if not all(mm in anti for mm in x.support()):
            return len(anti), None
        sq = C.mul(x, x)
        if not sq.is_scalar():
            return len(anti), None
        s = sq.coeffs[0] / C.lattice.gram[i][i]
        if scale is None:
            scale = s
        elif s != scale:
            return len(anti), None
    return _rank([C.mono(m).coeffs for m in anti]), scale
