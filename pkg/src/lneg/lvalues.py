"""Closed-form O(sqrt(|D|)) evaluation of L(chi_D, 1-k) for quadratic
characters, via constant-term relations of Hecke-Eisenstein series and via
bracket identities in half-integral weight, plus the weight-one (k = 1)
formulas through class numbers.

The half-integral identities state that
(1 + (D/(N/4))) L(chi_D, 1-k) (k even, levels N in {4, 8, 12, 16}) resp.
(1 + (|D|/N_2)) L(chi_D, 1-k) (k odd, N in {1, 2, 3, 5, 6, 7}, split by the
2-class e = (D/2)) equals a universal linear combination of the twisted sums
S(.)(|D|/delta, N, P); the universal coefficients are solved here once per
(k, N[, e]) from reference L-values at small fundamental discriminants,
validated on held-out discriminants, and persisted to a text cache.  An
inconsistent solve falsifies the conjectured identity and is surfaced as a
first-class error, never patched.
"""

from __future__ import annotations

import hashlib
import os
import threading
import time
from dataclasses import dataclass, field

from gmpy2 import mpq, mpz

from . import nt
from .bernoulli import l_via_bernoulli
from .characters import DirichletCharacter, character_from_discriminant, trivial_character
from .errors import (
    CacheCorrupt,
    ConjectureInconsistent,
    DeadLevel,
    GcdViolation,
    Inconsistent,
    InadmissiblePair,
    NoUsableRatio,
    NotFundamental,
    RankDeficient,
)
from .exact import Cyclotomic, euler_number, bernoulli_number
from .modforms import gegenbauer, siegel_coefficients, solve_exact
from .nt import WeightPolynomial, kronecker, s_sum, s_sum_many

__all__ = [
    "CoefficientSet",
    "CoefficientCache",
    "LValueReport",
    "hecke_fourier_coefficient",
    "l_hecke_even",
    "l_hecke_odd",
    "half_even_coefficients",
    "half_odd_coefficients",
    "select_level_even",
    "select_level_odd",
    "l_half_even",
    "l_half_odd",
    "l_weight_one",
    "weight_one_ratio",
    "k1_coefficient",
    "EVEN_LEVELS",
    "ODD_LEVELS",
    "odd_m_bound",
    "reference_l_value",
    "BIG_LEVEL_THRESHOLD",
]

EVEN_LEVELS = (4, 8, 12, 16)
ODD_LEVELS = (1, 2, 3, 5, 6, 7)
_EVEN_MN = {4: 6, 8: 4, 12: 3, 16: 4}

# larger auxiliary levels shrink the sums but enlarge the coefficient solve;
# they only pay off past this |D| (tunable)
BIG_LEVEL_THRESHOLD = 10**8

_EXTRA_ROWS = 5
_MIN_VALIDATION = 10


# ---------------------------------------------------------------------------
# Reference values (bootstrap oracle for the coefficient solves)
# ---------------------------------------------------------------------------

_REF_CACHE: dict[tuple[int, int], mpq] = {}
_REF_LOCK = threading.Lock()

_FE_CROSSOVER = 10**5  # prefer the functional equation when k*F exceeds this


def reference_l_value(D: int, k: int) -> mpq:
    """Exact L(chi_D, 1-k) from the Bernoulli route (or the functional
    equation when k|D| is large); memoized.  This is the bootstrap feeding
    every universal-coefficient solve, always at fundamental D."""
    key = (D, k)
    val = _REF_CACHE.get(key)
    if val is not None:
        return val
    chi = character_from_discriminant(D)
    if k * abs(D) <= _FE_CROSSOVER or k < 2:
        val = l_via_bernoulli(chi, k).rational_value()
    else:
        from .funceq import l_via_functional_equation

        val = l_via_functional_equation(chi, k).rational_value()
    with _REF_LOCK:
        _REF_CACHE[key] = val
    return val


# ---------------------------------------------------------------------------
# Coefficient sets and their cache
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientSet:
    """Solved universal coefficients with provenance.

    kind is one of half_even, half_odd, siegel_even, siegel_odd_level2; e is
    the 2-class for half_odd (None otherwise); validation_count counts the
    independent discriminants (or forms) the set was verified against."""

    kind: str
    k: int
    N: int
    e: int | None
    coeffs: tuple
    validation_count: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(mpq(c) for c in self.coeffs))


class CoefficientCache:
    """One file per set: tab-separated records
    kind, k, N, e, j, numerator, denominator, validation_count
    followed by a line holding the sha256 hex digest of the records."""

    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def _path(self, kind: str, k: int, N: int, e: int | None) -> str:
        return os.path.join(self.directory, f"{kind}_k{k}_N{N}_e{0 if e is None else e}.tsv")

    @staticmethod
    def _canonical(cset: CoefficientSet) -> str:
        e = 0 if cset.e is None else cset.e
        lines = []
        for j, c in enumerate(cset.coeffs):
            lines.append(
                f"{cset.kind}\t{cset.k}\t{cset.N}\t{e}\t{j}\t{c.numerator}\t{c.denominator}\t{cset.validation_count}"
            )
        return "".join(line + "\n" for line in lines)

    def store(self, cset: CoefficientSet) -> str:
        if cset.validation_count < _MIN_VALIDATION:
            raise ValueError("refusing to persist a set with < 10 validations")
        text = self._canonical(cset)
        digest = hashlib.sha256(text.encode()).hexdigest()
        path = self._path(cset.kind, cset.k, cset.N, cset.e)
        tmp = path + f".tmp{os.getpid()}"
        with open(tmp, "w", encoding="ascii") as fh:
            import fcntl

            fcntl.flock(fh, fcntl.LOCK_EX)
            fh.write(text + digest + "\n")
        os.replace(tmp, path)
        return path

    def load(self, kind: str, k: int, N: int, e: int | None):
        path = self._path(kind, k, N, e)
        if not os.path.exists(path):
            return None
        with open(path, encoding="ascii") as fh:
            lines = fh.read().splitlines()
        if not lines:
            raise CacheCorrupt(f"{path}: empty cache file")
        digest = lines[-1].strip()
        text = "".join(line + "\n" for line in lines[:-1])
        if hashlib.sha256(text.encode()).hexdigest() != digest:
            raise CacheCorrupt(f"{path}: checksum mismatch")
        coeffs = []
        vcount = 0
        for line in lines[:-1]:
            f = line.split("\t")
            if len(f) != 8:
                raise CacheCorrupt(f"{path}: malformed record")
            coeffs.append(mpq(int(f[5]), int(f[6])))
            vcount = int(f[7])
        return CoefficientSet(kind=kind, k=k, N=N, e=e, coeffs=tuple(coeffs), validation_count=vcount)


def default_cache_dir() -> str:
    env = os.environ.get("LNEG_CACHE_DIR")
    if env:
        return env
    return os.path.join(
        os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache")), "lneg"
    )


@dataclass
class LValueReport:
    """One computed value plus how it was obtained."""

    value: object
    method: str
    k: int
    D: int | None = None
    chi_spec: str = ""
    elapsed: float = 0.0
    cross_checked: bool = False
    notes: tuple = ()


# ---------------------------------------------------------------------------
# Hecke-Eisenstein constant-term methods
# ---------------------------------------------------------------------------


def _psi_chi_product(psi: DirichletCharacter, D: int) -> DirichletCharacter:
    if psi.modulus == 1:
        return character_from_discriminant(D)
    if psi.quadratic_discriminant == -4:
        return character_from_discriminant(-4 * D)
    raise ValueError("only the trivial and chi_{-4} twists are supported")


def hecke_fourier_coefficient(k: int, psi: DirichletCharacter, N: int, D: int, n: int):
    """Fourier coefficient a_{k,psi,N}(n) of the weight-2k Hecke-Eisenstein
    restriction on Gamma_0(F_psi N):
    a(0) = prod_{p|N} (1 - psi chi_D(p) p^{k-1}) L(psi,1-k) L(psi chi_D,1-k)/4,
    a(n) = sum_{d|n, (d,N)=1} (psi chi_D)(d) d^{k-1}
           sum_s sigma_{k-1,psi}(((n/d)^2 D - s^2)/(4N)).
    """
    from math import gcd

    F = psi.modulus
    if gcd(F, N * D) != 1:
        raise GcdViolation("gcd(F_psi, N D) must be 1")
    if psi.is_even != (k % 2 == 0):
        raise ValueError("psi(-1) must equal (-1)^k")
    if not nt.is_fundamental_discriminant(D) or D <= 1:
        raise NotFundamental(f"{D} is not a fundamental discriminant > 1")
    prod_chi = _psi_chi_product(psi, D)
    if n == 0:
        val = l_via_bernoulli(psi, k).rational_value() * l_via_bernoulli(
            prod_chi, k
        ).rational_value() / 4
        for p, _ in nt.factorize(N):
            val *= 1 - prod_chi.sign_value(p) * mpz(p) ** (k - 1)
        return val
    kind = "plain" if F == 1 else "type1"
    total = mpq(0)
    for d in nt.factorize(n).divisors():
        if gcd(d, N) != 1:
            continue
        c = prod_chi.sign_value(d)
        if c == 0:
            continue
        q = n // d
        total += c * mpz(d) ** (k - 1) * s_sum(kind, k - 1, q * q * D, 4 * N)
    return total


def l_hecke_even(D: int, k: int) -> mpq:
    """L(chi_D, 1-k) for D > 0 fundamental and k >= 2 even, from the level-1
    constant-term relation:
    L = (4k / (c_0 B_k)) sum_{1<=m<=r} S_{k-1}(m^2 D, 4)
        sum_{1<=d<=r/m} d^{k-1} (D/d) c_{-dm},  r = floor(k/6) + 1."""
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    if D <= 1 or not nt.is_fundamental_discriminant(D):
        raise NotFundamental(f"{D} must be a positive fundamental discriminant")
    r = k // 6 + 1
    sc = siegel_coefficients(2 * k, 1)
    total = mpq(0)
    for m in range(1, r + 1):
        inner = mpq(0)
        for d in range(1, r // m + 1):
            inner += mpz(d) ** (k - 1) * kronecker(D, d) * sc.c(-d * m)
        if inner:
            total += s_sum("plain", k - 1, m * m * D, 4) * inner
    return 4 * k / (sc.c(0) * bernoulli_number(k)) * total


def l_hecke_odd(D: int, k: int) -> mpq:
    """L(chi_D, 1-k) for D < -4 fundamental and k >= 3 odd, from the
    Gamma_0(2) constant-term relation:
    L = (8/A) sum_{1<=m<=r} S^(1)_{k-1}(m^2 |D|/delta, 1)
        sum_{1<=d<=r/m} d^{k-1} (4D/delta / d) c_{-dm},
    A = c_0 (2^{k-1} (D/2) - 1) E_{k-1}, r = (k+3)/2, delta = 4 iff 4 | D."""
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be odd and >= 3")
    if D >= -4 or not nt.is_fundamental_discriminant(D):
        raise NotFundamental(f"{D} must be a fundamental discriminant < -4")
    r = (k + 3) // 2
    sc = siegel_coefficients(2 * k, 2)
    delta = 4 if D % 4 == 0 else 1
    twist = 4 * D // delta
    total = mpq(0)
    base = abs(D) // delta
    for m in range(1, r + 1):
        inner = mpq(0)
        for d in range(1, r // m + 1):
            inner += mpz(d) ** (k - 1) * kronecker(twist, d) * sc.c(-d * m)
        if inner:
            total += s_sum("type1", k - 1, m * m * base, 1) * inner
    A = sc.c(0) * (mpz(2) ** (k - 1) * kronecker(D, 2) - 1) * euler_number(k - 1)
    return 8 * total / A


# ---------------------------------------------------------------------------
# Half-integral-weight identities: channels and admissibility
# ---------------------------------------------------------------------------


def _even_channels(k: int, N: int):
    count = k // _EVEN_MN[N] + 1
    out = []
    for j in range(count):
        P = gegenbauer(j, k - 2 * j) if j > 0 else None
        out.append(("plain", k - 2 * j - 1, P))
    return out


def odd_m_bound(k: int, N: int, e: int) -> int:
    """Upper bound m(k, N, e) on the channel index for the odd identity;
    raises InadmissiblePair for the excluded (N, e) combinations."""
    if N not in ODD_LEVELS:
        raise ValueError(f"N must be one of {ODD_LEVELS}")
    if e not in (-1, 0, 1):
        raise ValueError("e must be -1, 0 or 1")
    if N == 6 and e == -1:
        raise InadmissiblePair("N = 6 requires e != -1")
    if N == 7 and e != -1:
        raise InadmissiblePair("N = 7 requires e = -1")
    table = {
        1: {-1: (k - 1, 4), 0: (k - 1, 3), 1: (k - 3, 4)},
        2: {-1: (k - 1, 4), 0: (k - 1, 2), 1: (k - 3, 4)},
        3: {-1: (k - 1, 2), 0: (2 * k - 1, 3), 1: (k - 1, 2)},
        5: {-1: (3 * k - 2, 4), 0: (k - 1, 1), 1: (3 * k - 5, 4)},
        6: {0: (k - 1, 1), 1: (k - 1, 1)},
        7: {-1: (k - 1, 1)},
    }
    num, den = table[N][e]
    return max(num // den, 0)


def _odd_channels(k: int, N: int, e: int, count: int | None = None):
    m = odd_m_bound(k, N, e) if count is None else count - 1
    out = []
    for j in range(m + 1):
        j1, j0 = divmod(j, 2)
        kind = "type1" if j0 == 0 else "type2"
        P = gegenbauer(j1, k - j1) if j1 > 0 else None
        out.append((kind, k - j1 - 1, P))
    return out


def even_factor(D: int, N: int) -> int:
    return 1 + kronecker(D, N // 4)


def odd_factor(D: int, N: int) -> int:
    N2 = N // 2 if N % 2 == 0 else N
    return 1 + kronecker(abs(D), N2)


def _even_admissible(D: int, N: int) -> bool:
    if N == 16 and D % 8 != 1:
        return False
    return even_factor(D, N) != 0


def _odd_admissible(D: int, N: int, e: int) -> bool:
    if kronecker(D, 2) != e:
        return False
    return odd_factor(D, N) != 0


# ---------------------------------------------------------------------------
# Universal-coefficient solving
# ---------------------------------------------------------------------------


def _solve_lenient(A, y):
    """Echelon solve that zeroes free variables; verifies every row."""
    nrows, ncols = len(A), len(A[0])
    M = [[mpq(c) for c in row] + [mpq(v)] for row, v in zip(A, y)]
    pivots, row = [], 0
    for col in range(ncols):
        piv = next((r for r in range(row, nrows) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = 1 / M[row][col]
        M[row] = [x * inv for x in M[row]]
        for r in range(nrows):
            if r != row and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * z for x, z in zip(M[r], M[row])]
        pivots.append(col)
        row += 1
    x = [mpq(0)] * ncols
    for i, col in enumerate(pivots):
        x[col] = M[i][ncols]
    for arow, v in zip(A, y):
        if sum(c * xx for c, xx in zip(arow, x)) != v:
            raise Inconsistent("echelon solution fails a row")
    return x


def _solve_identity(channels, rows_iter, ncoef: int, lhs_fn, inconsistent_exc, row_args):
    """Solve sum_j c_j * channel_j(D) = lhs(D) over fundamental-discriminant
    rows; extra rows make bad bases surface as Inconsistent, a rank-deficient
    pool is widened once before falling back to the echelon solution (free
    coefficients pinned to zero, every row re-verified)."""
    want = ncoef + _EXTRA_ROWS
    rows, rhs, used = [], [], []
    for target in (want, want + 2 * ncoef + 10):
        for D in rows_iter():
            if len(rows) >= target:
                break
            if D in used:
                continue
            m, N = row_args(D)
            rows.append([mpq(s) for s in s_sum_many(m, N, channels)])
            rhs.append(lhs_fn(D))
            used.append(D)
        try:
            return solve_exact(rows, rhs), used
        except RankDeficient:
            continue
        except Inconsistent as exc:
            raise inconsistent_exc(str(exc)) from exc
    try:
        return _solve_lenient(rows, rhs), used
    except Inconsistent as exc:
        raise inconsistent_exc(str(exc)) from exc


def half_even_coefficients(
    k: int, N: int, cache: CoefficientCache | None = None, validations: int = _MIN_VALIDATION
) -> CoefficientSet:
    """Universal coefficients c_{j,N}^k of the even identity
    (1 + (D/(N/4))) L(chi_D, 1-k) = sum_{0<=j<=floor(k/m_N)} c_{j,N}^k
    S_{k-2j-1}(D, N, P_{j,k-2j}),  m_N = 6, 4, 3, 4 for N = 4, 8, 12, 16
    (D = 1 mod 8 required when N = 16).

    Solved from reference L-values at admissible fundamental D > 0 with five
    consistency rows beyond the unknown count, then validated on held-out
    discriminants before persisting.  For N = 4 an inconsistency is an
    implementation bug; for larger N it would falsify the identity itself and
    aborts with ConjectureInconsistent.
    """
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    if N not in EVEN_LEVELS:
        raise ValueError(f"N must be one of {EVEN_LEVELS}")
    if cache is not None:
        cached = cache.load("half_even", k, N, None)
        if cached is not None:
            return cached
    channels = _even_channels(k, N)
    ncoef = len(channels)
    exc = Inconsistent if N == 4 else ConjectureInconsistent

    def rows_iter():
        for D in nt.fundamental_discriminants():
            if _even_admissible(D, N):
                yield D

    def lhs(D):
        return even_factor(D, N) * reference_l_value(D, k)

    coeffs, used = _solve_identity(
        channels, rows_iter, ncoef, lhs, exc, row_args=lambda D: (D, N)
    )
    count = 0
    for D in rows_iter():
        if count >= validations:
            break
        if D in used:
            continue
        sums = s_sum_many(D, N, channels)
        if sum(c * s for c, s in zip(coeffs, sums)) != lhs(D):
            raise exc(f"held-out discriminant {D} falsifies the (k={k}, N={N}) identity")
        count += 1
    cset = CoefficientSet("half_even", k, N, None, tuple(coeffs), count)
    if cache is not None:
        cache.store(cset)
    return cset


def half_odd_coefficients(
    k: int,
    N: int,
    e: int,
    cache: CoefficientCache | None = None,
    validations: int = _MIN_VALIDATION,
) -> CoefficientSet:
    """Universal coefficients c_{j,N,e}^k of the odd identity
    (1 + (|D|/N_2)) L(chi_D, 1-k)
      = sum_{0<=j<=m(k,N,e)} c_{j,N,e}^k S^{(1+j0)}_{k-j1-1}(|D|/delta, N, P_{j1,k-j1}),
    j = 2 j1 + j0, over fundamental D < 0 with (D/2) = e; delta = 4 when
    4 | D (so the sums run over |D|/4), else 1.

    m(k, N, e) is an upper bound, so trailing zero coefficients are trimmed
    after the solve.  Side conditions: e != -1 for N = 6, e = -1 for N = 7.
    """
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be odd and >= 3")
    mbound = odd_m_bound(k, N, e)  # raises InadmissiblePair when excluded
    if cache is not None:
        cached = cache.load("half_odd", k, N, e)
        if cached is not None:
            return cached
    channels = _odd_channels(k, N, e)
    ncoef = mbound + 1
    delta = 4 if e == 0 else 1

    def rows_iter():
        for D in nt.fundamental_discriminants(negative=True):
            if _odd_admissible(D, N, e):
                yield D

    def lhs(D):
        return odd_factor(D, N) * reference_l_value(D, k)

    coeffs, used = _solve_identity(
        channels, rows_iter, ncoef, lhs, ConjectureInconsistent,
        row_args=lambda D: (abs(D) // delta, N),
    )
    count = 0
    for D in rows_iter():
        if count >= validations:
            break
        if D in used:
            continue
        sums = s_sum_many(abs(D) // delta, N, channels)
        if sum(c * s for c, s in zip(coeffs, sums)) != lhs(D):
            raise ConjectureInconsistent(
                f"held-out discriminant {D} falsifies the (k={k}, N={N}, e={e}) identity"
            )
        count += 1
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    cset = CoefficientSet("half_odd", k, N, e, tuple(coeffs), count)
    if cache is not None:
        cache.store(cset)
    return cset


# ---------------------------------------------------------------------------
# Level selection and evaluation
# ---------------------------------------------------------------------------


def select_level_even(D: int) -> int:
    """Level choice minimizing the term count of the even identity:
    3 | D -> 12; D = 1 mod 8 -> 16; 4 | D -> 8; D = 1 mod 3 -> 12; else 4."""
    if D % 3 == 0:
        return 12
    if D % 8 == 1:
        return 16
    if D % 4 == 0:
        return 8
    if D % 3 == 1:
        return 12
    return 4


def select_level_odd(D: int) -> int:
    """Level choice for the odd identity, split on D mod 4.

    The D = 5 mod 8 branch keys on |D| being a square mod 7, i.e.
    D = 3, 5, 6 mod 7 (the level-7 factor 1 + (|D|/7) must not vanish, and
    D = -3 must fall through to the 3 | D branch).
    """
    if D % 4 == 0:
        if D % 3 == 0:
            return 6
        if D % 5 == 0:
            return 5
        if D % 3 == 2:
            return 6
        if D % 5 in (1, 4):
            return 5
        return 2
    if D % 7 == 0 and D % 8 == 5:
        return 7
    if D % 3 == 0 and D % 8 == 1:
        return 6
    if D % 5 == 0:
        return 5
    if D % 8 == 5 and D % 7 in (3, 5, 6):
        return 7
    if D % 3 == 2 and D % 8 == 1:
        return 6
    if D % 3 == 0:
        return 3
    if D % 5 in (1, 4):
        return 5
    return 2


def l_half_even(
    D: int,
    k: int,
    N: int | None = None,
    cache: CoefficientCache | None = None,
    big_level_threshold: int = BIG_LEVEL_THRESHOLD,
) -> mpq:
    """Exact L(chi_D, 1-k), D > 0 fundamental, k even >= 2, via the solved
    even identity; N defaults to 4 below the big-level threshold and to
    select_level_even(D) above it.  An explicitly requested dead level
    (vanishing projection factor) raises DeadLevel."""
    if D <= 1 or not nt.is_fundamental_discriminant(D):
        raise NotFundamental(f"{D} must be a positive fundamental discriminant")
    if N is None:
        N = select_level_even(D) if D > big_level_threshold else 4
    elif not _even_admissible(D, N):
        raise DeadLevel(f"level N={N} has vanishing factor at D={D}")
    cset = half_even_coefficients(k, N, cache)
    channels = _even_channels(k, N)
    sums = s_sum_many(D, N, channels)
    total = sum(c * s for c, s in zip(cset.coeffs, sums))
    return total / even_factor(D, N)


def l_half_odd(
    D: int,
    k: int,
    N: int | None = None,
    cache: CoefficientCache | None = None,
    big_level_threshold: int = BIG_LEVEL_THRESHOLD,
) -> mpq:
    """Exact L(chi_D, 1-k), D < 0 fundamental, k odd >= 3, via the solved odd
    identity at the 2-class e = (D/2); sums run over |D|/4 when 4 | D."""
    if D >= 0 or not nt.is_fundamental_discriminant(D):
        raise NotFundamental(f"{D} must be a negative fundamental discriminant")
    e = kronecker(D, 2)
    if N is None:
        N = select_level_odd(D) if abs(D) > big_level_threshold else 1
        if not _odd_admissible(D, N, e):
            N = 2  # the always-alive fallback level
    elif not _odd_admissible(D, N, e):
        odd_m_bound(k, N, e)  # raises InadmissiblePair when (N, e) is excluded
        raise DeadLevel(f"level N={N} has vanishing factor at D={D}")
    cset = half_odd_coefficients(k, N, e, cache)
    channels = _odd_channels(k, N, e, count=len(cset.coeffs))
    delta = 4 if e == 0 else 1
    sums = s_sum_many(abs(D) // delta, N, channels)
    total = sum(c * s for c, s in zip(cset.coeffs, sums))
    return total / odd_factor(D, N)


# ---------------------------------------------------------------------------
# k = 1: class-number formulas
# ---------------------------------------------------------------------------

_K1_ORDER = (2, 1, 3, 5, 6, 7)


def weight_one_ratio(D: int, N: int, delta: int):
    """The tabulated ratio S_0^(1)(|D|/delta, N) / L(chi_D, 0) for D < -4
    fundamental, or None when the table has no row for (N, delta, e)."""
    e = kronecker(D, 2)
    if delta == 1:
        if N in (1, 2):
            return mpq(3 * (1 - e))
        if N == 3:
            return mpq((1 - kronecker(D, 3)) * (5 - e), 2)
        if N == 5:
            return mpq((1 + kronecker(D, 5)) * (1 - e), 2)
        if N == 6:
            return mpq((1 - kronecker(D, 3)) * (1 + e), 2)
        if N == 7:
            return mpq(1 - kronecker(D, 7)) if e == -1 else None
        return None
    if delta == 4:
        if N == 1:
            return mpq(3)
        if N == 2:
            return mpq(1)
        if N in (3, 6):
            return mpq(1 - kronecker(D, 3), 2)
        if N == 5:
            return mpq(1 + kronecker(D, 5), 2)
        return None
    raise ValueError("delta must be 1 or 4")


def l_weight_one(D: int, N: int | None = None) -> int:
    """h(D) = L(chi_D, 0) for fundamental D < -4, from the weight-one ratios
    S_0^(1)(|D|/delta, N) / L = tabulated value; tries the requested N first,
    then levels in the order (2, 1, 3, 5, 6, 7), honoring the |D|/4 sub-table
    when 4 | D.  Discriminants the table cannot reach (e = 1 with (D/3) = 1)
    fall back to counting reduced binary quadratic forms."""
    if D >= -4 or not nt.is_fundamental_discriminant(D):
        raise NotFundamental(f"{D} must be a fundamental discriminant < -4")
    delta = 4 if D % 4 == 0 else 1
    order = ([N] if N is not None else []) + [x for x in _K1_ORDER if x != N]
    for cand in order:
        ratio = weight_one_ratio(D, cand, delta)
        if not ratio:
            continue
        total = s_sum("type1", 0, abs(D) // delta, cand)
        h = total / ratio
        if h.denominator != 1 or h <= 0:
            raise NoUsableRatio(f"ratio table gave non-integral h for D={D}, N={cand}")
        return int(h)
    # table gap (e = 1 and (D/3) = 1): reduced-forms fallback
    return nt.class_number(D)


def k1_coefficient(N: int, e: int, delta: int):
    """The k = 1 universal coefficient c^1_{0,N,e}: the odd identity holds at
    k = 1 with a single channel and these constants."""
    if delta == 1:
        vals = {
            1: mpq(2, 3 * (1 - e)) if e != 1 else None,
            2: mpq(2, 3 * (1 - e)) if e != 1 else None,
            3: mpq(2, 5 - e),
            5: mpq(2, 1 - e) if e != 1 else None,
            6: mpq(2, 1 + e) if e != -1 else None,
            7: mpq(1) if e == -1 else None,
        }
        return vals.get(N)
    if delta == 4:
        return {1: mpq(2, 3), 2: mpq(2), 3: mpq(2), 5: mpq(2), 6: mpq(2)}.get(N)
    raise ValueError("delta must be 1 or 4")
