"""Eisenstein series coefficients of weight kappa = b+/2 + 1 for lattices of signature (b+, 2).

Local ingredients are representation densities obtained by counting solutions
modulo l^k; the archimedean ingredient is Shimura's confluent hypergeometric
integral.  The global normalization (the product of the local splitting
indices and the sign conventions hidden in it) is not fixed analytically: it
is calibrated once by imposing the S-transformation law numerically, and the
resulting unit is frozen in ``NORMALIZATION``.

Gram conventions: ``local_density`` takes a Q-gram (Q(x) = x^T G x); all other
functions take an even Gram S with Q(x) = x^T S x / 2, as in ``weilrep``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import mpmath
import numpy as np
from mpmath import mpf

from .numth import factorint, fundamental_part, kronecker, valuation
from .specialvals import BigFloat, kronecker_L_afe
from .weilrep import DiscriminantForm, discriminant_form, weil_matrices


class NotStabilized(RuntimeError):
    pass


class StateBudgetExceeded(RuntimeError):
    pass


# --- local densities -----------------------------------------------------------

@dataclass(frozen=True)
class LocalDensity:
    prime: int
    target: Fraction
    value: Fraction
    stabilized_at: int


def _blocks(G):
    n = len(G)
    seen, out = set(), []
    for i in range(n):
        if i in seen:
            continue
        comp, stack = [], [i]
        seen.add(i)
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in range(n):
                if b not in seen and G[a][b] != 0:
                    seen.add(b)
                    stack.append(b)
        out.append(sorted(comp))
    return out


def _block_histogram(quad, lin, M, max_states):
    """Counts of sum_{a<=b} quad[a][b] x_a x_b + sum lin_a x_a mod M over x in (Z/M)^d."""
    d = len(lin)
    if M ** d > max_states:
        raise StateBudgetExceeded(f"{M}^{d} residue classes exceed the budget {max_states}")
    grids = np.indices((M,) * d, dtype=np.int64).reshape(d, -1)
    val = np.zeros(grids.shape[1], dtype=np.int64)
    for a in range(d):
        val = (val + (lin[a] % M) * grids[a]) % M
        for b in range(a, d):
            c = quad[a][b] % M
            if c:
                val = (val + (c * grids[a] % M) * grids[b]) % M
    return np.bincount(val, minlength=M)


def _unit_mod(x: Fraction, M: int) -> int:
    return x.numerator * pow(x.denominator, -1, M) % M


def _jordan_odd(G, ell):
    """U over Z_(l) (denominators prime to l) with U^T G U diagonal, l odd."""
    n = len(G)
    G = [row[:] for row in G]
    U = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def v(x):
        return 10 ** 9 if x == 0 else valuation(x.numerator, ell) - valuation(x.denominator, ell)

    def add_col(i, j, c):
        # e_i <- e_i + c e_j
        for r in range(n):
            U[r][i] += c * U[r][j]
        for r in range(n):
            G[r][i] += c * G[r][j]
        for r in range(n):
            G[i][r] += c * G[j][r]

    for t in range(n):
        rest = range(t, n)
        best = min((v(G[i][j]), i != j, i, j) for i in rest for j in rest)
        if best[0] >= 10 ** 9:
            break
        _, off, i, j = best
        if off:
            # every diagonal entry has larger valuation, so e_i + e_j is a pivot
            add_col(i, j, Fraction(1))
        if i != t:
            for M_ in (U, ):
                for r in range(n):
                    M_[r][i], M_[r][t] = M_[r][t], M_[r][i]
            G[i], G[t] = G[t], G[i]
            for r in range(n):
                G[r][i], G[r][t] = G[r][t], G[r][i]
        for j in range(t + 1, n):
            if G[t][j] != 0:
                add_col(j, t, -G[t][j] / G[t][t])
    return U, G


def _count(G, mu, m, ell, k, max_states):
    """#{x mod l^k : Q(x + mu) = m mod l^k}; the polynomial in x has l-integral coefficients."""
    M = ell ** k
    n = len(G)
    lin = [sum(2 * G[i][j] * mu[j] for j in range(n)) for i in range(n)]
    const = sum(G[i][j] * mu[i] * mu[j] for i in range(n) for j in range(n)) - m
    if const.denominator % ell == 0 or any(c.denominator % ell == 0 for c in lin):
        raise ValueError("Q(x + mu) - m is not l-integral on Z^n")
    if ell != 2:
        U, G = _jordan_odd(G, ell)
        lin = [sum(U[r][i] * lin[r] for r in range(n)) for i in range(n)]
    target = -_unit_mod(const, M) % M
    hists = []
    for blk in _blocks(G):
        quad = [[0] * len(blk) for _ in blk]
        for a, i in enumerate(blk):
            for b, j in enumerate(blk):
                if a == b:
                    quad[a][a] = _unit_mod(G[i][i], M)
                elif a < b:
                    quad[a][b] = _unit_mod(2 * G[i][j], M)
        hists.append(_block_histogram(quad, [_unit_mod(lin[i], M) for i in blk], M, max_states))
    hist = hists[0].astype(object)
    for h in hists[1:-1]:
        hist = _cyclic_convolve(hist, h, M)
    if len(hists) == 1:
        return int(hist[target])
    last = hists[-1].astype(object)
    idx = (target - np.arange(M)) % M
    return int(np.dot(hist, last[idx]))


def _cyclic_convolve(a, b, M):
    """Exact cyclic convolution of a nonnegative integer vector with a block histogram.

    ``a`` is cut into 16-bit digits so that every floating-point FFT product
    has an a priori rounding error below 0.1 and can be rounded exactly.
    """
    bf = np.asarray(b, dtype=float)
    Fb = np.fft.rfft(bf)
    nb = np.linalg.norm(bf)
    base = 1 << 16
    rem = np.asarray(a, dtype=object)
    out = np.zeros(M, dtype=object)
    shift = 1
    while any(rem):
        d = np.array([int(x) for x in rem % base], dtype=float)
        if 4e-16 * max(1.0, np.log2(M)) * np.linalg.norm(d) * nb >= 0.1:
            full = np.convolve(np.asarray(a, dtype=object), np.asarray(b, dtype=object))
            res = full[:M].copy()
            res[: len(full) - M] += full[M:]
            return res
        c = np.fft.irfft(np.fft.rfft(d) * Fb, M)
        out += np.rint(c).astype(np.int64).astype(object) * shift
        rem = rem // base
        shift *= base
    return out


def local_density(gram, ell: int, m, k_max: int = 12, shift=None,
                  max_states: int = 10 ** 7) -> LocalDensity:
    """lim_k #{x in (Z/l^k)^n : Q(x + shift) = m mod l^k} / l^{k(n-1)}.

    Returned once two consecutive exponents agree, and not before the exponent
    where Hensel lifting is guaranteed to be uniform: k > v(m) + v(2^n det G).
    """
    G = [[Fraction(x) for x in row] for row in np.asarray(gram, dtype=object).tolist()]
    n = len(G)
    m = Fraction(m)
    mu = [Fraction(0)] * n if shift is None else [Fraction(x) for x in shift]
    detS = int(abs(Fraction(_det_frac([[2 * x for x in row] for row in G]))))
    if detS == 0:
        raise ValueError("degenerate form")
    k_min = 1 + valuation(detS, ell)
    if m != 0 and m.numerator % ell == 0:
        k_min += valuation(m.numerator, ell)
    prev = None
    for k in range(1, k_max + 1):
        val = Fraction(_count(G, mu, m, ell, k, max_states), ell ** (k * (n - 1)))
        if prev is not None and val == prev and k - 1 >= k_min:
            return LocalDensity(ell, m, val, k - 1)
        prev = val
    raise NotStabilized(f"density at {ell} not stable up to k = {k_max}")


def _det_frac(A):
    A = [row[:] for row in A]
    n, det = len(A), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            for j in range(c, n):
                A[r][j] -= f * A[c][j]
    return det


# --- rational reconstruction -----------------------------------------------------

def rational_snap(x, max_denominator: int = 10 ** 6, tol: float = 1e-9):
    """Best rational approximation with bounded denominator, if it is within tol."""
    v = x.value if isinstance(x, BigFloat) else x
    if isinstance(v, (complex, mpmath.mpc)):
        if abs(v.imag) > tol:
            return None
        v = v.real
    if not isinstance(v, (int, float, Fraction, mpmath.mpf)):
        with mpmath.workprec(512):
            v = mpmath.mpf(v)
    if isinstance(v, mpmath.mpf):
        if not mpmath.isfinite(v):
            return None
        sign, man, exp, _ = v._mpf_     # man_exp drops the sign
        exact = (-1) ** sign * Fraction(int(man)) * Fraction(2) ** int(exp)
    else:
        exact = Fraction(v)
    r = exact.limit_denominator(max_denominator)
    return r if abs(exact - r) < Fraction(tol) else None


# --- archimedean profile -------------------------------------------------------------

def shimura_xi(y, h, alpha, beta):
    """xi(y, h; alpha, beta) = int_R e(-h x) (x + iy)^(-alpha) (x - iy)^(-beta) dx, y > 0."""
    y, h, a, b = mpf(y), mpf(h), mpmath.mpmathify(alpha), mpmath.mpmathify(beta)
    ph = mpmath.mpc(0, 1) ** (b - a)
    if h > 0:
        return ph * (2 * mpmath.pi) ** (a + b) * mpmath.rgamma(a) * h ** (a + b - 1) \
            * mpmath.exp(-2 * mpmath.pi * y * h) * mpmath.hyperu(b, a + b, 4 * mpmath.pi * y * h)
    if h < 0:
        h = -h
        return ph * (2 * mpmath.pi) ** (a + b) * mpmath.rgamma(b) * h ** (a + b - 1) \
            * mpmath.exp(-2 * mpmath.pi * y * h) * mpmath.hyperu(a, a + b, 4 * mpmath.pi * y * h)
    return ph * mpf(2) ** (2 - a - b) * mpmath.pi * mpmath.gamma(a + b - 1) \
        * mpmath.rgamma(a) * mpmath.rgamma(b) * y ** (1 - a - b)


def arch_whittaker(n, v, s, kappa):
    """n-th archimedean coefficient of the weight-kappa series at Im tau = v, with q^n removed.

    The section is v^beta (c tau + d)^(-alpha) (c tau-bar + d)^(-beta) with
    alpha = (s + 1 + kappa)/2 and beta = (s + 1 - kappa)/2, so s0 = kappa - 1 is
    the holomorphic point.
    """
    s, k = mpmath.mpmathify(s), mpmath.mpmathify(kappa)
    a, b = (s + 1 + k) / 2, (s + 1 - k) / 2
    return mpf(v) ** b * shimura_xi(v, n, a, b) * mpmath.exp(2 * mpmath.pi * mpf(n) * mpf(v))


def arch_value_at_center(kappa) -> complex:
    """(-2 pi i)^kappa / Gamma(kappa): the value of arch_whittaker at s0 divided by n^(kappa-1)."""
    k = mpmath.mpmathify(kappa)
    return complex((2 * mpmath.pi) ** k * mpmath.expjpi(-k / 2) * mpmath.rgamma(k))


def arch_derivative(n, v, kappa, h=None):
    """d/ds arch_whittaker(n, v, s, kappa) at s = kappa - 1."""
    s0 = mpmath.mpmathify(kappa) - 1
    return mpmath.diff(lambda s: arch_whittaker(n, v, s, kappa), s0)


def constant_term_derivative(v, kappa, phi0=1, scatter=1):
    """d/ds at s0 of v^beta phi(0) + scatter * arch_whittaker(0, v, s, kappa).

    ``scatter`` stands for the finite product multiplying the n = 0 Whittaker
    integral; the v-dependence is what matters.
    """
    s0 = mpmath.mpmathify(kappa) - 1
    f = lambda s: mpf(v) ** ((s + 1 - kappa) / 2) * phi0 + scatter * arch_whittaker(0, v, s, kappa)
    return mpmath.diff(f, s0)


# --- global coefficients ---------------------------------------------------------------

# Unit multiplying (-2 pi i)^kappa / Gamma(kappa) / sqrt|L'/L|, fixed by the
# S-transformation probe (see ``calibrate_normalization``), keyed by b+ parity.
# Fitted values: 1.0000000000000009 on the (2,2) lattice A+H and
# 0.70710678119 (1 + i) to 1e-11 on A+H+(2); in both cases the total phase is -1.
NORMALIZATION = {0: 1, 1: complex(np.exp(0.25j * np.pi))}


@dataclass(frozen=True)
class EisensteinLattice:
    gram: tuple
    signature: tuple
    D: DiscriminantForm = field(compare=False, repr=False)

    @classmethod
    def of(cls, gram, signature=None) -> "EisensteinLattice":
        S = np.asarray(gram, dtype=object)
        if signature is None:
            ev = np.linalg.eigvalsh(np.array(S, dtype=float))
            signature = (int((ev > 0).sum()), int((ev < 0).sum()))
        if signature[1] != 2 or signature[0] < 1:
            raise ValueError("signature (b+, 2) required")
        return cls(tuple(tuple(int(x) for x in r) for r in S.tolist()), tuple(signature),
                   discriminant_form(S))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def kappa(self) -> Fraction:
        return Fraction(self.signature[0], 2) + 1

    @property
    def det(self) -> int:
        return int(round(np.linalg.det(np.array(self.gram, dtype=float))))

    @property
    def qgram(self):
        return [[Fraction(x, 2) for x in r] for r in self.gram]


def _sigma(L: EisensteinLattice, n: Fraction) -> list[int]:
    N = 2 * abs(L.det) * n.numerator * n.denominator
    return sorted(factorint(N))


def _global_factor(L: EisensteinLattice, n: Fraction, Sigma, prec) -> mpf:
    """The product over primes outside Sigma of the local densities."""
    r, k = L.rank, L.kappa
    dps = max(20, int(prec * 0.30103) + 5)
    with mpmath.workdps(dps):
        if r % 2 == 0:
            D = (-1) ** (r // 2) * L.det
            f = fundamental_part(D)
            s = mpf(k.numerator) / k.denominator
            Lv = kronecker_L_afe(k, D, dps)
            for ell in Sigma:
                Lv *= 1 - kronecker(f, ell) * mpf(ell) ** (-s)
            return 1 / Lv
        D = (-1) ** ((r - 1) // 2) * 2 * L.det * n.numerator * n.denominator
        f = fundamental_part(D)
        s = k - Fraction(1, 2)
        sm = mpf(s.numerator) / s.denominator
        num = kronecker_L_afe(s, D, dps)
        den = mpmath.zeta(2 * sm)
        for ell in Sigma:
            num *= 1 - kronecker(f, ell) * mpf(ell) ** (-sm)
            den *= 1 - mpf(ell) ** (-2 * sm)
        return num / den


def coefficient_components(L: EisensteinLattice, n, prec=None, k_max: int = 14) -> np.ndarray:
    """c(n, mu) for every mu in L'/L (zero unless q(mu) = n mod 1)."""
    n = Fraction(n)
    prec = prec or 64
    out = np.zeros(L.D.order, dtype=complex)
    if n < 0:
        return out
    if n == 0:
        out[0] = 1
        return out
    Sigma = _sigma(L, n)
    k = L.kappa
    glob = _global_factor(L, n, Sigma, prec)
    unit = NORMALIZATION[L.signature[0] % 2]
    pref = unit * arch_value_at_center(k) * float(n) ** float(k - 1) / np.sqrt(L.D.order)
    G = L.qgram
    for i, mu in enumerate(L.D.elements):
        if (n - L.D.q(mu)) % 1:
            continue
        loc = Fraction(1)
        for ell in Sigma:
            loc *= local_density(G, ell, n, k_max, shift=mu).value
            if loc == 0:
                break
        out[i] = pref * float(loc) * float(glob)
    return out


@dataclass(frozen=True)
class EisCoefficient:
    n: Fraction
    components: np.ndarray = field(repr=False)
    phi: tuple
    snap_tol: float = 1e-9
    max_denominator: int = 10 ** 6

    @property
    def value(self) -> complex:
        return complex(sum(complex(p) * c for p, c in zip(self.phi, self.components)))

    @property
    def rational_snap(self):
        return rational_snap(self.value, self.max_denominator, self.snap_tol)

    @property
    def component_snaps(self):
        return tuple(rational_snap(complex(c), self.max_denominator, self.snap_tol)
                     for c in self.components)


def eis_coefficient(L, n, phi=None, prec=None, k_max: int = 14) -> EisCoefficient:
    """c_E(n)(phi); ``phi`` is a vector over L'/L (default: the characteristic function of 0)."""
    if not isinstance(L, EisensteinLattice):
        L = EisensteinLattice.of(L)
    if phi is None:
        phi = [0] * L.D.order
        phi[0] = 1
    phi = tuple(Fraction(p) for p in phi)
    return EisCoefficient(Fraction(n), coefficient_components(L, n, prec, k_max), phi)


def _indices_by_class(L: EisensteinLattice, n_max: int):
    """For each mu, the exponents n in q(mu) + Z with 0 <= n <= n_max."""
    out = []
    for mu in L.D.elements:
        q0 = L.D.q(mu)
        out.append([q0 + j for j in range(n_max + 1) if q0 + j <= n_max])
    return out


def q_expansion(L: EisensteinLattice, n_max: int, prec=None) -> dict:
    """{n: components} for all n <= n_max occurring in some q(mu) + Z."""
    ns = sorted({n for lst in _indices_by_class(L, n_max) for n in lst})
    return {n: coefficient_components(L, n, prec) for n in ns}


def evaluate_series(coeffs: dict, tau: complex, scale=None) -> np.ndarray:
    """sum_n c(n) e(n tau); with ``scale`` the n > 0 part is multiplied by it."""
    out = None
    for n, c in coeffs.items():
        term = np.asarray(c) * np.exp(2j * np.pi * float(n) * tau)
        if scale is not None and n > 0:
            term = term * scale
        out = term if out is None else out + term
    return out


def _split(coeffs):
    head = {n: c for n, c in coeffs.items() if n == 0}
    tail = {n: c for n, c in coeffs.items() if n > 0}
    return head, tail


def _tau_power(tau: complex, kappa: Fraction) -> complex:
    return complex(np.sqrt(complex(tau)) ** int(2 * kappa))


def modularity_defect(L: EisensteinLattice, coeffs: dict, tau: complex, K: complex = 1.0) -> float:
    """max_mu |F(-1/tau) - tau^kappa rho(S) F(tau)| for F = e_0-part + K * (n > 0 part)."""
    W = weil_matrices(L.D, L.signature)
    head, tail = _split(coeffs)
    F = lambda t: evaluate_series(head, t) + K * evaluate_series(tail, t)
    lhs = F(-1 / tau)
    rhs = _tau_power(tau, L.kappa) * (W.S @ F(tau))
    return float(np.abs(lhs - rhs).max())


def calibrate_normalization(L: EisensteinLattice, coeffs: dict,
                            taus=(1j, 0.2 + 1.3j, -0.35 + 1.05j)) -> complex:
    """Least-squares K with F(-1/tau) = tau^kappa rho(S) F(tau) at the sample points."""
    W = weil_matrices(L.D, L.signature)
    head, tail = _split(coeffs)
    A, b = [], []
    for tau in taus:
        t = _tau_power(tau, L.kappa)
        G1, G0 = evaluate_series(tail, -1 / tau), evaluate_series(tail, tau)
        H1, H0 = evaluate_series(head, -1 / tau), evaluate_series(head, tau)
        A.append(G1 - t * (W.S @ G0))
        b.append(t * (W.S @ H0) - H1)
    A, b = np.concatenate(A), np.concatenate(b)
    return complex(np.vdot(A, b) / np.vdot(A, A))


# --- growth of the twisted divisor sums -------------------------------------------

def twisted_divisor_sum(m: int, bplus: int, chi) -> float:
    """sum_{d | m} chi(d) d^{b+/2}, chi completely multiplicative.

    ``chi`` is a callable on primes or a mapping prime -> +-1.
    """
    if m < 1:
        raise ValueError("m must be positive")
    val = chi.__getitem__ if isinstance(chi, dict) else chi
    total = 1.0
    for p, e in factorint(m).items():
        c = val(p)
        x = c * p ** (bplus / 2)
        total *= sum(x ** j for j in range(e + 1))
    return total


def divisor_sum_kappa(bplus: int) -> float:
    """Lower bound constant prod_p (1 - p^{-b+/2}) = 1/zeta(b+/2), valid for b+ >= 3.

    For squarefree m and chi(p) = +-1 one has prod_{p | m} |1 + chi(p) p^{b/2}|
    >= m^{b/2} prod_{p | m} (1 - p^{-b/2}) >= m^{b/2} / zeta(b/2).
    """
    if bplus < 3:
        raise ValueError("the bound needs b+ >= 3")
    return float(1 / mpmath.zeta(mpf(bplus) / 2))


# --- derivative constant -------------------------------------------------------------

def eis_derivative_constant(dF: int, n: int, p: int):
    """Constant in the log-derivative of c_E(n) at the center, for p not dividing n."""
    from .constants import ConstExpr, GAMMA, LOGPI, ONE, ZQ_LD, zf_ld
    from .numth import is_prime
    if n <= 0:
        raise ValueError("n must be positive")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n % p == 0:
        raise ValueError(f"{p} divides {n}")
    h = Fraction(1, 2)
    return ConstExpr({LOGPI: h, GAMMA: h, ONE: -h, zf_ld(dF): Fraction(-1), ZQ_LD: Fraction(1)})


# --- pairing with a principal part ---------------------------------------------------

@dataclass(frozen=True)
class PrincipalPart:
    """c_f(-m) for finitely many m > 0 and the constant term c_f(0), all rational vectors."""
    negative: dict                  # {m: tuple of Fractions over L'/L}
    constant: tuple

    def __post_init__(self):
        for m in self.negative:
            if Fraction(m) <= 0:
                raise ValueError("principal part indices must be positive")
        vals = list(self.negative.values()) + [self.constant]
        for v in vals:
            for x in v:
                if not isinstance(x, (int, Fraction)):
                    raise TypeError("principal part entries must be rational")


def pairing_residue_check(g_coeffs, f: PrincipalPart) -> complex:
    """sum_{m>0} <c_g(m), c_f(-m)> + c_f(0)(0); vanishes when g f has no constant term."""
    by_n = {Fraction(c.n): c for c in g_coeffs}
    total = complex(f.constant[0]) if f.constant else 0j
    for m, vec in f.negative.items():
        m = Fraction(m)
        if all(x == 0 for x in vec):
            continue
        if m not in by_n:
            raise KeyError(f"coefficient c_g({m}) missing")
        total += complex(sum(complex(a) * complex(b) for a, b in zip(by_n[m].components, vec)))
    return total
