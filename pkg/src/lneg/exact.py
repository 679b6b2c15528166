"""Exact multiprecision arithmetic: rationals, cyclotomic integers, big floats.

Rationals are gmpy2.mpq (always in lowest terms, positive denominator) and
big floats are gmpy2.mpfr/mpc, whose precision is a per-value attribute; all
arithmetic on them goes through explicit gmpy2 contexts so no global state
is mutated.  Cyclotomic elements are implemented here on the power basis
(zeta_u^j)_{0 <= j < phi(u)} with reduction by the u-th cyclotomic polynomial.
"""

from __future__ import annotations

import threading
from math import comb, gcd

import gmpy2
from gmpy2 import mpc, mpfr, mpq, mpz

from .errors import RoundingAmbiguous

Rational = mpq

__all__ = [
    "Rational",
    "bernoulli_number",
    "euler_number",
    "Cyclotomic",
    "cyclotomic_polynomial",
    "cyclotomic_round",
    "euler_phi",
    "context",
    "to_mpfr",
]


def context(bits: int) -> gmpy2.context:
    """A gmpy2 context carrying `bits` of binary precision (real and complex)."""
    return gmpy2.context(precision=bits, allow_complex=True)


def to_mpfr(x, bits: int) -> mpfr:
    return context(bits).mpfr(x)


# ---------------------------------------------------------------------------
# Bernoulli and Euler numbers
# ---------------------------------------------------------------------------

_BERN: list[mpq] = [mpq(1)]
_BERN_LOCK = threading.Lock()


def bernoulli_number(n: int) -> mpq:
    """Classical Bernoulli number B_n, with B_1 = -1/2 (T/(e^T - 1) convention).

    Computed by the recurrence sum_{j<=m} C(m+1, j) B_j = 0 and memoized;
    the table is extended under a lock so concurrent readers are safe.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > 1 and n % 2 == 1:
        return mpq(0)
    if n < len(_BERN):
        return _BERN[n]
    with _BERN_LOCK:
        while len(_BERN) <= n:
            m = len(_BERN)
            acc = mpq(0)
            for j in range(m):
                if j > 1 and j % 2 == 1:
                    continue
                acc += comb(m + 1, j) * _BERN[j]
            _BERN.append(-acc / (m + 1))
    return _BERN[n]


_EULER: list[int] = [1]  # E_0, E_2, E_4, ... (even indices only)
_EULER_LOCK = threading.Lock()


def euler_number(n: int) -> int:
    """Euler number E_n from 1/cosh(T) = sum E_n T^n / n!; n must be even.

    Odd-index Euler numbers vanish and are never requested, so odd n is
    rejected rather than silently returned as zero.
    """
    if n < 0 or n % 2 != 0:
        raise ValueError("Euler numbers are only defined here for even n >= 0")
    m = n // 2
    if m < len(_EULER):
        return _EULER[m]
    with _EULER_LOCK:
        while len(_EULER) <= m:
            t = len(_EULER)
            # sum_{j<=t} C(2t, 2j) E_{2j} = 0 for t >= 1
            acc = 0
            for j in range(t):
                acc += comb(2 * t, 2 * j) * _EULER[j]
            _EULER.append(-acc)
    return _EULER[m]


# ---------------------------------------------------------------------------
# Cyclotomic polynomials and the field Q(zeta_u)
# ---------------------------------------------------------------------------

_CYCLO: dict[int, tuple[int, ...]] = {}
_CYCLO_LOCK = threading.Lock()


def euler_phi(u: int) -> int:
    if u < 1:
        raise ValueError("u must be >= 1")
    result, m, p = u, u, 2
    while p * p <= m:
        if m % p == 0:
            result -= result // p
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divmod_int(num: list[int], den: list[int]) -> list[int]:
    # exact division of integer polynomials, den monic; returns quotient
    num = list(num)
    dn = len(den) - 1
    q = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q[i - dn] = c
        for j, dj in enumerate(den):
            num[i - dn + j] -= c * dj
    assert all(c == 0 for c in num), "non-exact polynomial division"
    return q


def cyclotomic_polynomial(u: int) -> tuple[int, ...]:
    """Coefficients (ascending) of the u-th cyclotomic polynomial."""
    if u in _CYCLO:
        return _CYCLO[u]
    with _CYCLO_LOCK:
        if u in _CYCLO:
            return _CYCLO[u]
        poly = [-1] + [0] * (u - 1) + [1]  # x^u - 1
        for d in range(1, u):
            if u % d == 0:
                poly = _poly_divmod_int(poly, list(cyclotomic_polynomial(d)))
        _CYCLO[u] = tuple(poly)
    return _CYCLO[u]


def _reduce_coeffs(coeffs: list[mpq], u: int) -> list[mpq]:
    """Reduce a power-basis coefficient list modulo Phi_u to length phi(u)."""
    phi = euler_phi(u)
    if len(coeffs) <= phi:
        return list(coeffs) + [mpq(0)] * (phi - len(coeffs))
    # first reduce exponents mod u via zeta^u = 1
    if len(coeffs) > u:
        folded = [mpq(0)] * u
        for j, c in enumerate(coeffs):
            folded[j % u] += c
        coeffs = folded
    poly = cyclotomic_polynomial(u)
    coeffs = list(coeffs)
    for i in range(len(coeffs) - 1, phi - 1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        coeffs[i] = mpq(0)
        for j in range(phi):
            coeffs[i - phi + j] -= c * poly[j]
    return coeffs[:phi]


def _poly_mod(a: list[mpq], b: list[mpq]) -> list[mpq]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    db = len(b) - 1
    while len(a) - 1 >= db:
        c = a[-1] / b[-1]
        for j in range(db + 1):
            a[len(a) - 1 - db + j] -= c * b[j]
        while a and a[-1] == 0:
            a.pop()
    return a


def _poly_invert_mod(a: list[mpq], mod: list[int]) -> list[mpq]:
    """Inverse of a modulo the monic polynomial `mod`, by extended Euclid."""
    modq = [mpq(c) for c in mod]
    r0, r1 = modq, [mpq(c) for c in a]
    s0, s1 = [mpq(0)], [mpq(1)]
    while True:
        while r1 and r1[-1] == 0:
            r1.pop()
        if len(r1) == 1:
            inv = 1 / r1[0]
            return [c * inv for c in s1]
        if not r1:
            raise ZeroDivisionError("element is a zero divisor mod Phi_u")
        q, rem = _poly_divmod_q(r0, r1)
        s_new = _poly_sub(s0, _poly_mul(q, s1))
        r0, r1 = r1, rem
        s0, s1 = s1, s_new


def _poly_divmod_q(a: list[mpq], b: list[mpq]):
    a = list(a)
    db = len(b) - 1
    q = [mpq(0)] * max(1, len(a) - db)
    while len(a) - 1 >= db and a:
        c = a[-1] / b[-1]
        q[len(a) - 1 - db] = c
        for j in range(db + 1):
            a[len(a) - 1 - db + j] -= c * b[j]
        while a and a[-1] == 0:
            a.pop()
    return q, a


def _poly_mul(a: list[mpq], b: list[mpq]) -> list[mpq]:
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _poly_sub(a: list[mpq], b: list[mpq]) -> list[mpq]:
    n = max(len(a), len(b))
    a = list(a) + [mpq(0)] * (n - len(a))
    for j, bj in enumerate(b):
        a[j] -= bj
    return a


class Cyclotomic:
    """An element of Q(zeta_u) on the power basis zeta_u^j, 0 <= j < phi(u).

    Multiplication reduces via the u-th cyclotomic polynomial; complex
    conjugation is the Galois map zeta_u -> zeta_u^{-1}.  Elements of
    different orders mix by promotion to the lcm order.  Instances are
    immutable and safe to share across threads.
    """

    __slots__ = ("u", "coeffs")

    def __init__(self, u: int, coeffs):
        self.u = u
        cl = [c if isinstance(c, type(mpq())) else mpq(c) for c in coeffs]
        self.coeffs = tuple(_reduce_coeffs(cl, u))

    # -- constructors -------------------------------------------------
    @classmethod
    def from_rational(cls, x, u: int = 1) -> "Cyclotomic":
        phi = euler_phi(u)
        return cls(u, [mpq(x)] + [mpq(0)] * (phi - 1))

    @classmethod
    def root_of_unity(cls, u: int, a: int = 1) -> "Cyclotomic":
        a %= u
        coeffs = [mpq(0)] * u
        coeffs[a] = mpq(1)
        return cls(u, coeffs)

    # -- structure ----------------------------------------------------
    def promote(self, u_new: int) -> "Cyclotomic":
        if u_new == self.u:
            return self
        if u_new % self.u != 0:
            raise ValueError("can only promote to a multiple order")
        step = u_new // self.u
        coeffs = [mpq(0)] * u_new
        for j, c in enumerate(self.coeffs):
            coeffs[j * step] += c
        return Cyclotomic(u_new, coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> mpq:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            if other.u == self.u:
                return self, other
            u = self.u * other.u // gcd(self.u, other.u)
            return self.promote(u), other.promote(u)
        return self, Cyclotomic.from_rational(other, self.u)

    def __add__(self, other):
        a, b = self._coerce(other)
        return Cyclotomic(a.u, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.u, [-c for c in self.coeffs])

    def __sub__(self, other):
        a, b = self._coerce(other)
        return Cyclotomic(a.u, [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            q = mpq(other)
            return Cyclotomic(self.u, [c * q for c in self.coeffs])
        a, b = self._coerce(other)
        prod = _poly_mul(list(a.coeffs), list(b.coeffs))
        return Cyclotomic(a.u, prod)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("cyclotomic division by zero")
        if self.is_rational():
            return Cyclotomic.from_rational(1 / self.coeffs[0], self.u)
        inv = _poly_invert_mod(list(self.coeffs), list(cyclotomic_polynomial(self.u)))
        return Cyclotomic(self.u, inv)

    def __truediv__(self, other):
        if not isinstance(other, Cyclotomic):
            q = mpq(other)
            return Cyclotomic(self.u, [c / q for c in self.coeffs])
        a, b = self._coerce(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return Cyclotomic.from_rational(other, self.u) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Cyclotomic.from_rational(1, self.u)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def galois(self, a: int) -> "Cyclotomic":
        """Image under zeta_u -> zeta_u^a; requires gcd(a, u) = 1."""
        a %= self.u
        if gcd(a, self.u) != 1:
            raise ValueError("galois exponent must be coprime to the order")
        coeffs = [mpq(0)] * self.u
        for j, c in enumerate(self.coeffs):
            coeffs[(a * j) % self.u] += c
        return Cyclotomic(self.u, coeffs)

    def conjugate(self) -> "Cyclotomic":
        return self.galois(self.u - 1) if self.u > 1 else self

    # -- comparisons / hashing ----------------------------------------
    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            a, b = self._coerce(other)
            return a.coeffs == b.coeffs
        if self.is_rational():
            return self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.u, self.coeffs))

    def __repr__(self):
        if self.is_rational():
            return f"Cyclotomic({self.coeffs[0]})"
        return f"Cyclotomic(u={self.u}, {list(self.coeffs)})"

    # -- numerics -------------------------------------------------------
    def embed(self, bits: int = 64, power: int = 1) -> mpc:
        """Numeric value at zeta_u -> exp(2*pi*i*power/u), at `bits` precision."""
        ctx = context(bits + 16)
        two_pi = 2 * gmpy2.const_pi(bits + 16)
        total = ctx.mpc(0)
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            angle = ctx.mul(two_pi, ctx.div(ctx.mpfr((power * j) % self.u), self.u))
            total = ctx.add(total, ctx.mul(ctx.mpfr(c), ctx.exp(ctx.mpc(0, angle))))
        return total

    def abs_max_embedding(self, bits: int = 64) -> mpfr:
        """max |sigma(x)| over all complex embeddings sigma."""
        best = to_mpfr(0, bits)
        for a in range(1, self.u + 1):
            if gcd(a, self.u) != 1:
                continue
            v = abs(self.embed(bits, power=a))
            if v > best:
                best = v
        return best


def cyclotomic_round(approx, u: int, slack: int) -> Cyclotomic:
    """Round a basis-coefficient vector to the nearest element of Z[zeta_u].

    Every coordinate must lie within 2^-slack of an integer (slack >= 16);
    otherwise RoundingAmbiguous is raised, signalling that upstream working
    precision was insufficient.
    """
    if slack < 16:
        raise ValueError("slack must be >= 16 bits")
    phi = euler_phi(u)
    vals = list(approx)
    if len(vals) != phi:
        raise ValueError(f"expected {phi} coordinates for order {u}")
    tol = mpfr(1) / (mpz(1) << slack)
    out = []
    for x in vals:
        n = int(gmpy2.rint_round(mpfr(x)))
        if abs(mpfr(x) - n) > tol:
            raise RoundingAmbiguous(
                f"coordinate {x} is {abs(mpfr(x) - n)} away from nearest integer"
            )
        out.append(n)
    return Cyclotomic(u, out)
