"""Integer kernels: factorization, Kronecker symbol, twisted divisor sums,
and the quadratic-form-indexed sums S_k(m, N) that dominate runtime.

S_k(m, N) sums sigma_k((m - s^2)/N) over all integers s for which the
argument is a positive integer; the twisted variants replace sigma_k by its
chi_{-4}-twists, and the weighted variant multiplies each term by
m^n P(s^2/m) for an exact-rational polynomial P.  Because these sums are the
inner loop of every O(sqrt(F)) method, a single sweep over s factors each
(m - s^2)/N once and feeds every requested (kind, k, P) channel; for long
sweeps the smooth parts are extracted by sieving the roots of s^2 = m mod p
over the s-grid instead of trial-dividing each value separately.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from math import gcd, isqrt, prod

import gmpy2
import numpy as np
from gmpy2 import mpq, mpz, powmod

__all__ = [
    "Factorization",
    "factorize",
    "is_prime",
    "kronecker",
    "is_squarefree",
    "is_fundamental_discriminant",
    "fundamental_discriminants",
    "sqrt_mod",
    "WeightPolynomial",
    "divisor_sum_twisted",
    "s_sum",
    "s_sum_many",
    "class_number",
    "primes_up_to",
    "iter_primes",
]


# ---------------------------------------------------------------------------
# Primes
# ---------------------------------------------------------------------------

_SIEVE_LOCK = threading.Lock()
_sieve_limit = 0
_sieve_primes: np.ndarray | None = None

TRIAL_CUTOFF = 1 << 16


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (cached, grown geometrically)."""
    global _sieve_limit, _sieve_primes
    if n <= _sieve_limit and _sieve_primes is not None:
        return _sieve_primes[: np.searchsorted(_sieve_primes, n, side="right")]
    with _SIEVE_LOCK:
        if n > _sieve_limit or _sieve_primes is None:
            limit = max(n, 1 << 20, _sieve_limit * 2)
            sieve = np.ones(limit + 1, dtype=bool)
            sieve[:2] = False
            for p in range(2, isqrt(limit) + 1):
                if sieve[p]:
                    sieve[p * p :: p] = False
            _sieve_primes = np.flatnonzero(sieve).astype(np.int64)
            _sieve_limit = limit
    return _sieve_primes[: np.searchsorted(_sieve_primes, n, side="right")]


def iter_primes(limit: int):
    for p in primes_up_to(limit):
        yield int(p)


_TRIAL_PRIMES: list[int] = []


def _trial_primes() -> list[int]:
    global _TRIAL_PRIMES
    if not _TRIAL_PRIMES:
        _TRIAL_PRIMES = [int(p) for p in primes_up_to(TRIAL_CUTOFF)]
    return _TRIAL_PRIMES


# ---------------------------------------------------------------------------
# Primality and factorization
# ---------------------------------------------------------------------------

# Deterministic Miller-Rabin base set: proves primality below 3.317e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_BOUND = 3317044064679887385961981


def is_prime(n: int) -> bool:
    """Primality test: deterministic Miller-Rabin below 3.3e24, BPSW beyond."""
    n = int(n)
    if n < 2:
        return False
    if n < _MR_DETERMINISTIC_BOUND:
        nz = mpz(n)
        for a in _MR_BASES:
            if n == a:
                return True
            if not gmpy2.is_strong_prp(nz, a):
                return False
        return True
    return bool(gmpy2.is_prime(mpz(n), 48))


def _brent_rho(n: int) -> int:
    """A nontrivial factor of odd composite n, Brent's variant of Pollard rho.

    The polynomial increment is derived from n so repeated runs are
    reproducible; the increment is bumped until a factor appears.
    """
    n = int(n)
    c = 1 + (n % 1009)
    while True:
        y, r, q, m = 2, 1, 1, 128
        g, x, ys = 1, 2, 2
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
        c += 1  # cycle degenerated; restart with the next increment


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ((p1, e1), (p2, e2), ...) in increasing p."""

    pairs: tuple[tuple[int, int], ...]

    def value(self) -> int:
        return prod(p**e for p, e in self.pairs)

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.pairs:
            divs = [d * p**i for d in divs for i in range(e + 1)]
        return sorted(divs)

    def __iter__(self):
        return iter(self.pairs)


_FACTOR_CACHE: dict[int, Factorization] = {}
_FACTOR_CACHE_LOCK = threading.Lock()
_FACTOR_CACHE_MAX = 1 << 16


def factorize(m: int) -> Factorization:
    """Complete factorization of m >= 1.

    Trial division by primes below 2^16, then Brent rho on the remaining
    cofactor with primality certification at every split.
    """
    m = int(m)
    if m < 1:
        raise ValueError("factorize requires m >= 1")
    if m == 1:
        return Factorization(())
    cached = _FACTOR_CACHE.get(m)
    if cached is not None:
        return cached
    orig = m
    pairs: list[tuple[int, int]] = []
    for p in _trial_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
    if m > 1:
        if m < TRIAL_CUTOFF * TRIAL_CUTOFF or is_prime(m):
            # cofactor below 2^32 has no prime factor below 2^16 twice over
            pairs.append((m, 1))
        else:
            stack, found = [m], []
            while stack:
                n = stack.pop()
                if is_prime(n):
                    found.append(n)
                    continue
                d = _brent_rho(n)
                stack.extend((d, n // d))
            for p in sorted(set(found)):
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                pairs.append((p, e))
            pairs.sort()
    fac = Factorization(tuple(pairs))
    if orig < (1 << 24) and len(_FACTOR_CACHE) < _FACTOR_CACHE_MAX:
        with _FACTOR_CACHE_LOCK:
            _FACTOR_CACHE[orig] = fac
    return fac


# ---------------------------------------------------------------------------
# Kronecker symbol and fundamental discriminants
# ---------------------------------------------------------------------------


def kronecker(D: int, n: int) -> int:
    """Full Kronecker symbol (D/n), including n <= 0 and even n conventions."""
    return int(gmpy2.kronecker(mpz(D), mpz(n)))


def is_squarefree(m: int) -> bool:
    m = abs(int(m))
    if m == 0:
        return False
    return all(e == 1 for _, e in factorize(m))


def is_fundamental_discriminant(D: int) -> bool:
    """True iff D is 1, or squarefree D = 1 mod 4, or 4m with squarefree m = 2,3 mod 4."""
    D = int(D)
    if D == 0:
        return False
    if D == 1:
        return True
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_discriminants(negative: bool = False, start: int = 0):
    """Yield fundamental discriminants of one sign by increasing |D|, |D| > 4
    for neither sign excluded: positive from 5, negative from -3."""
    a = max(abs(start), 3 if negative else 5)
    while True:
        D = -a if negative else a
        if is_fundamental_discriminant(D):
            yield D
        a += 1


# ---------------------------------------------------------------------------
# Modular square roots (for the s-grid sieve)
# ---------------------------------------------------------------------------


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a modulo an odd prime p, or None when a is a non-residue."""
    a %= p
    if a == 0:
        return 0
    if powmod(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return int(powmod(a, (p + 1) // 4, p))
    if p % 8 == 5:
        x = int(powmod(a, (p + 3) // 8, p))
        if x * x % p != a:
            x = x * int(powmod(2, (p - 1) // 4, p)) % p
        return x
    # Tonelli-Shanks for p = 1 mod 8
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while powmod(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, int(powmod(z, q, p)), int(powmod(a, q, p)), int(powmod(a, (q + 1) // 2, p))
    while t != 1:
        t2, i = t * t % p, 1
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = int(powmod(c, 1 << (m - i - 1), p))
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


# ---------------------------------------------------------------------------
# Twisted divisor sums
# ---------------------------------------------------------------------------


def _sigma_pp(kind, k: int, p: int, e: int) -> int:
    """sigma-value of the prime power p^e for one twist kind.

    kind 'plain' is the ordinary sigma_k; 'type1' twists the divisor d by
    chi_{-4}(d); 'type2' twists the codivisor m/d; a callable kind gives the
    (quadratic) twist value at p directly.
    """
    pk = p**k
    if kind == "plain":
        chi = 1
    elif kind == "type1":
        if p == 2:
            return 1
        chi = 1 if p % 4 == 1 else -1
    elif kind == "type2":
        if p == 2:
            return pk**e
        chi = 1 if p % 4 == 1 else -1
        # sum_i chi^(e-i) p^(ik)
        acc, t = 0, 1
        for i in range(e + 1):
            acc += t if (e - i) % 2 == 0 or chi == 1 else -t
            t *= pk
        return acc
    else:
        chi = kind(p)
        if chi == 0:
            return 1
    if chi == 1:
        acc, t = 1, 1
        for _ in range(e):
            t *= pk
            acc += t
        return acc
    acc, t, sign = 1, 1, 1
    for _ in range(e):
        t *= pk
        sign = -sign
        acc += sign * t
    return acc


def _sigma_fac(kind, k: int, fac) -> int:
    acc = 1
    for p, e in fac:
        acc *= _sigma_pp(kind, k, p, e)
        if acc == 0 and kind == "plain":
            break
    return acc


def divisor_sum_twisted(kind, k: int, m) -> int:
    """sigma_k(m) with the requested twist; 0 whenever m is not a positive integer."""
    if not isinstance(m, int):
        try:
            mi = int(m)
        except (TypeError, ValueError):
            return 0
        if mi != m:
            return 0
        m = mi
    if m < 1:
        return 0
    return _sigma_fac(kind, k, factorize(m))


# ---------------------------------------------------------------------------
# Weight polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightPolynomial:
    """A dense exact-rational polynomial, coefficients ascending by degree."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(mpq(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = mpq(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def weight_at(self, s2: int, m: int):
        """m^degree * P(s2/m), evaluated exactly without intermediate fractions."""
        n = self.degree
        acc = mpq(0)
        mp = mpz(m)
        s2 = mpz(s2)
        for i, c in enumerate(self.coeffs):
            acc += c * (s2**i) * (mp ** (n - i))
        return acc

    @classmethod
    def one(cls) -> "WeightPolynomial":
        return cls((1,))


# ---------------------------------------------------------------------------
# The S-sums
# ---------------------------------------------------------------------------

_SIEVE_MIN_COUNT = 192  # below this many s-values plain trial division wins
_SIEVE_MIN_X = 1 << 22
_SIEVE_PRIME_CAP = 10_000_000


def _sweep_values(m: int, N: int):
    """All s >= 0 with (m - s^2)/N a positive integer, grouped by s mod N."""
    top = m - N
    if top < 0:
        return []
    smax = isqrt(top)
    classes = []
    for r in range(N):
        if (m - r * r) % N == 0:
            if r > smax:
                continue
            classes.append(r)
    return [(r, list(range(r, smax + 1, N))) for r in classes]


def _factored_sweep(m: int, N: int, classes):
    """Factor (m - s^2)/N for every s in the sweep; returns parallel lists
    (s, x_factors) flattened across classes."""
    total = sum(len(ss) for _, ss in classes)
    xmax = (m - N) // N if m > N else 0
    use_sieve = total >= _SIEVE_MIN_COUNT and xmax >= _SIEVE_MIN_X
    out_s: list[int] = []
    out_fac: list[list[tuple[int, int]]] = []
    if not use_sieve:
        for _, ss in classes:
            for s in ss:
                x = (m - s * s) // N
                out_s.append(s)
                out_fac.append(list(factorize(x).pairs))
        return out_s, out_fac

    small = sorted({2, 3, 5, 7, 11, 13} | {p for p, _ in factorize(N)})
    xs_all: list[list[int]] = []
    fac_all: list[list[list[tuple[int, int]]]] = []
    for _, ss in classes:
        xs = []
        facs = []
        for s in ss:
            x = (m - s * s) // N
            f: list[tuple[int, int]] = []
            for p in small:
                if x % p == 0:
                    e = 0
                    while x % p == 0:
                        x //= p
                        e += 1
                    f.append((p, e))
            xs.append(x)
            facs.append(f)
        xs_all.append(xs)
        fac_all.append(facs)

    bound = min(isqrt(xmax), _SIEVE_PRIME_CAP)
    for p in iter_primes(bound):
        if p in small or p < 17:
            continue
        mm = m % p
        if mm == 0:
            roots = (0,)
        else:
            t = sqrt_mod(mm, p)
            if t is None:
                continue
            roots = (t,) if 2 * t == p or t == 0 else (t, p - t)
        invN = pow(N, -1, p)
        for (r, ss), xs, facs in zip(classes, xs_all, fac_all):
            for t in roots:
                i0 = ((t - r) * invN) % p
                for i in range(i0, len(ss), p):
                    x = xs[i]
                    e = 0
                    while x % p == 0:
                        x //= p
                        e += 1
                    # e = 0 can occur when an earlier power already divided out
                    if e:
                        xs[i] = x
                        facs[i].append((p, e))

    for (r, ss), xs, facs in zip(classes, xs_all, fac_all):
        for s, x, f in zip(ss, xs, facs):
            if x > 1:
                if x <= bound * bound or is_prime(x):
                    f.append((x, 1))
                else:
                    f.extend(factorize(x).pairs)
            f.sort()
            out_s.append(s)
            out_fac.append(f)
    return out_s, out_fac


def s_sum_many(m: int, N: int, channels):
    """Evaluate several S-sums over one shared sweep and factorization pass.

    channels is a sequence of (kind, k, P) with P a WeightPolynomial or None;
    returns the list of exact sums in the same order.
    """
    if m < 1 or N < 1:
        raise ValueError("m and N must be positive")
    classes = _sweep_values(m, N)
    results = [mpq(0) for _ in channels]
    if not classes:
        return results
    ss, facs = _factored_sweep(m, N, classes)
    for s, f in zip(ss, facs):
        mult = 2 if s > 0 else 1
        s2 = s * s
        for idx, (kind, k, P) in enumerate(channels):
            sig = _sigma_fac(kind, k, f)
            if sig == 0:
                continue
            if P is None:
                results[idx] += mult * sig
            else:
                results[idx] += mult * sig * P.weight_at(s2, m)
    return results


def s_sum(kind, k: int, m: int, N: int, P: WeightPolynomial | None = None):
    """S_k(m, N) (or its weighted/twisted variant) as an exact rational."""
    return s_sum_many(m, N, [(kind, k, P)])[0]


# ---------------------------------------------------------------------------
# Class numbers via reduced binary quadratic forms
# ---------------------------------------------------------------------------


def class_number(D: int) -> int:
    """h(D) for a negative fundamental discriminant, by counting reduced forms
    (a, b, c) with b^2 - 4ac = D, |b| <= a <= c, b >= 0 when |b| = a or a = c."""
    if D >= 0:
        raise ValueError("class_number expects D < 0")
    h = 0
    b = 0 if D % 2 == 0 else 1
    while 3 * b * b <= -D:
        mm = (b * b - D) // 4
        for a in factorize(mm).divisors():
            if a * a > mm:
                break
            if a < max(b, 1):
                continue
            c = mm // a
            if gcd(gcd(a, b), c) != 1:
                continue
            h += 1 if (b == 0 or b == a or a == c) else 2
        b += 2
    return h
