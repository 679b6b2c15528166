"""L(chi, 1-k) through the complete functional equation.

The value is assembled as 2 (k-1)! F^k L(chibar, k) / ((-2 pi i)^k g(chibar)),
computed to relative accuracy e^-B with
B > (k - 1/2) log(kF/(2 pi e)) + log |D(chi, k)| + 10, where D(chi, k) is a
proven denominator bound; the scaled value D(chi,k) L(chi,1-k) then has
integer coordinates on the power basis of Z[zeta_u] and is recovered by
rounding.  L(chibar, k) itself comes from the Euler product over primes up
to L(B, k) = (e^B/(k-1))^(1/(k-1)), where the per-prime working precision is
set from the bit length of p (never an exact log) so that 1/p^k carries
p^k e^(-kB/(k-1)) of relative accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr, mpz

from . import nt
from .characters import DirichletCharacter, gauss_sum
from .errors import KTooSmall, RoundingAmbiguous
from .exact import Cyclotomic, context, cyclotomic_round

__all__ = [
    "PrecisionPlan",
    "DenominatorBound",
    "denominator_bound",
    "precision_target",
    "euler_product",
    "l_via_functional_equation",
]

ROUND_SLACK = 16
GUARD_BITS = 64

# the numpy bulk tail only engages for long real products; below this many
# primes the sequential mpfr loop is already fast
_BULK_MIN_PRIMES = 200_000
_BULK_TABLE_CAP = 200_000
_BULK_HEAD = 65536


@dataclass(frozen=True)
class PrecisionPlan:
    """Accuracy budget for one functional-equation evaluation.

    B is the nat-log relative accuracy target, bits the working precision,
    prime_limit the Euler-product cutoff L(B, k)."""

    B: float
    bits: int
    prime_limit: int


@dataclass(frozen=True)
class DenominatorBound:
    """A nonzero D with D * L(chi, 1-k) integral over Z[zeta_u]."""

    value: Cyclotomic


def denominator_bound(chi: DirichletCharacter, k: int) -> DenominatorBound:
    """Proven denominator for L(chi, 1-k), by the shape of the conductor.

    F not a prime power gives 1; F = p^v (p odd) gives 1 unless the order of
    chi equals p^(v-1)(p-1)/gcd(p-1, k), in which case pk/((p-1)/u) for v = 1
    and chi(1+p) - 1 for v >= 2; F = 2^v gives 2 only at v = 2; F = 1 gives
    k times the product of primes p with (p-1) | k.
    """
    if not chi.is_primitive:
        raise ValueError("denominator bound is stated for primitive characters")
    F = chi.modulus
    if F == 1:
        d = k
        for p in range(2, k + 2):
            if k % (p - 1) == 0 and nt.is_prime(p):
                d *= p
        return DenominatorBound(Cyclotomic.from_rational(d))
    fac = nt.factorize(F).pairs
    if len(fac) > 1:
        return DenominatorBound(Cyclotomic.from_rational(1))
    p, v = fac[0]
    if p == 2:
        return DenominatorBound(Cyclotomic.from_rational(2 if v == 2 else 1))
    u = chi.order
    if u != p ** (v - 1) * (p - 1) // gcd(p - 1, k):
        return DenominatorBound(Cyclotomic.from_rational(1))
    if v == 1:
        return DenominatorBound(Cyclotomic.from_rational(p * k // gcd(p - 1, k)))
    return DenominatorBound(chi(1 + p) - 1)


def precision_target(chi: DirichletCharacter, k: int, b_scale: float = 1.0) -> PrecisionPlan:
    """PrecisionPlan for (chi, k), k >= 2.

    Working precision adds 64 guard bits beyond ceil(B/log 2): the 10 in B is
    a margin on the value itself, not on intermediate arithmetic, and a fixed
    binary cushion absorbs the ulp noise of ~L(B,k) multiplications.
    """
    if k < 2:
        raise KTooSmall("the functional-equation route is not offered at k = 1")
    F = chi.modulus
    dabs = float(denominator_bound(chi, k).value.abs_max_embedding(64))
    B = (k - 0.5) * math.log(k * F / (2 * math.pi * math.e)) + math.log(dabs) + 10
    B = (B + 1e-9) * b_scale
    bits = math.ceil(B / math.log(2)) + GUARD_BITS
    log_limit = (B - math.log(k - 1)) / (k - 1)
    if log_limit > 50:
        raise ValueError(
            f"Euler-product limit exp({log_limit:.1f}) is out of reach; "
            "use a different method for this (F, k)"
        )
    prime_limit = math.ceil(math.exp(log_limit))
    return PrecisionPlan(B=B, bits=bits, prime_limit=prime_limit)


def _inv_pk(p: int, k: int, bits: int) -> mpfr:
    ctx = context(max(bits, 12))
    if k * p.bit_length() <= 4096:
        return ctx.div(1, mpz(p) ** k)
    return ctx.pow(ctx.mpfr(p), -k)


def euler_product(chibar: DirichletCharacter, k: int, plan: PrecisionPlan):
    """L(chibar, k) via P = prod_{p <= L(B,k)} (1 - chibar(p)/p^k), inverted
    at full plan precision.  Returns mpfr for real characters, mpc otherwise.

    The accumulation is P <- P - chibar(p) P (1/p^k) in ascending primes; the
    required bits for 1/p^k shrink as k * bitlength(p) grows.  For real
    characters with very long products the tail beyond 65536 is folded in
    float64 chunks (error budgeted against e^-B), which keeps million-prime
    products tractable without changing any rounded result.
    """
    W = plan.bits
    ctx = context(W)
    base_bits = math.ceil(k * plan.B / ((k - 1) * math.log(2))) + 8
    u = chibar.order
    limit = plan.prime_limit
    if u <= 2:
        P = ctx.mpfr(1)
        head_limit = limit
        tail = None
        if limit > _BULK_HEAD and chibar.modulus <= _BULK_TABLE_CAP:
            primes = nt.primes_up_to(limit)
            n_tail = len(primes) - int(np.searchsorted(primes, _BULK_HEAD, side="right"))
            if n_tail > _BULK_MIN_PRIMES and n_tail * 2.0**-50 <= math.exp(-plan.B) and k <= 3:
                head_limit = _BULK_HEAD
                tail = primes[np.searchsorted(primes, _BULK_HEAD, side="right") :]
        for p in nt.iter_primes(head_limit):
            c = chibar.sign_value(p)
            if c == 0:
                continue
            inv = _inv_pk(p, k, base_bits - k * (p.bit_length() - 1))
            if c == 1:
                P = ctx.sub(P, ctx.mul(P, inv))
            else:
                P = ctx.add(P, ctx.mul(P, inv))
        if tail is not None and len(tail):
            F = chibar.modulus
            table = np.array([chibar.sign_value(r) for r in range(F)], dtype=np.float64)
            chi_vals = table[tail % F]
            terms = 1.0 - chi_vals * tail.astype(np.float64) ** float(-k)
            nchunk = 4096
            cut = len(terms) // nchunk * nchunk
            parts = list(terms[:cut].reshape(-1, nchunk).prod(axis=1))
            if cut < len(terms):
                parts.append(terms[cut:].prod())
            for part in parts:
                P = ctx.mul(P, ctx.mpfr(part))
        return ctx.div(1, P)
    # complex character: same loop with root-of-unity values
    roots = [ctx.exp(ctx.mpc(0, 2 * gmpy2.const_pi(W) * a / u)) for a in range(u)]
    P = ctx.mpc(1)
    for p in nt.iter_primes(limit):
        a = chibar.value_exponent(p)
        if a is None:
            continue
        inv = _inv_pk(p, k, base_bits - k * (p.bit_length() - 1))
        P = ctx.sub(P, ctx.mul(P, ctx.mul(roots[a], inv)))
    return ctx.div(1, P)


def _minus_i_pow(k: int, ctx) -> mpc:
    return (ctx.mpc(1), ctx.mpc(0, -1), ctx.mpc(-1), ctx.mpc(0, 1))[k % 4]


def _fe_real(chi: DirichletCharacter, k: int, b_scale: float) -> Cyclotomic:
    plan = precision_target(chi, k, b_scale)
    d = int(denominator_bound(chi, k).value.rational_value())
    L = euler_product(chi, k, plan)  # chibar = chi for real characters
    W = plan.bits
    ctx = context(W)
    sign = 1 if k % 4 in (0, 1) else -1
    num = ctx.mul(ctx.mpfr(sign * 2 * d * gmpy2.fac(k - 1) * mpz(chi.modulus) ** k), L)
    den = ctx.mul(
        ctx.pow(ctx.mul(ctx.mpfr(2), gmpy2.const_pi(W)), k),
        ctx.sqrt(ctx.mpfr(chi.modulus)),
    )
    scaled = ctx.div(num, den)
    rounded = cyclotomic_round([scaled], 1, ROUND_SLACK)
    return rounded / d


def _solve_complex(matrix, rhs, ctx):
    """Gaussian elimination with partial pivoting over mpc."""
    n = len(rhs)
    A = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col]))
        if A[piv][col] == 0:
            raise RoundingAmbiguous("singular embedding matrix")
        A[col], A[piv] = A[piv], A[col]
        inv = ctx.div(ctx.mpc(1), A[col][col])
        A[col] = [ctx.mul(x, inv) for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


def _fe_complex(chi: DirichletCharacter, k: int, b_scale: float) -> Cyclotomic:
    u = chi.order
    F = chi.modulus
    phi = len([j for j in range(1, u + 1) if gcd(j, u) == 1])
    units = [j for j in range(1, u) if gcd(j, u) == 1]
    plan0 = precision_target(chi, k, b_scale)
    W = plan0.bits
    ctx = context(W)
    two_pi = ctx.mul(ctx.mpfr(2), gmpy2.const_pi(W))
    fanf = ctx.mpfr(2 * gmpy2.fac(k - 1) * mpz(F) ** k)
    w: dict[int, mpc] = {}
    for j in units:
        if (u - j) in w:
            w[j] = w[u - j].conjugate()
            continue
        chij = chi.power(j)
        plan = precision_target(chij, k, b_scale)
        bchij = chij.conjugate()
        L = euler_product(bchij, k, plan)
        g = gauss_sum(bchij, W)
        denom = ctx.mul(ctx.mul(ctx.pow(two_pi, k), _minus_i_pow(k, ctx)), g)
        val = ctx.div(ctx.mul(fanf, ctx.mpc(L)), denom)
        dj = denominator_bound(chij, k).value.embed(W)
        w[j] = ctx.mul(val, dj)
    # solve sum_m a_m zeta_u^(j m) = w_j over the unit rows
    roots = [ctx.exp(ctx.mpc(0, ctx.mul(two_pi, ctx.div(ctx.mpfr(t), u)))) for t in range(u)]
    matrix = [[roots[(j * m) % u] for m in range(phi)] for j in units]
    sol = _solve_complex(matrix, [w[j] for j in units], ctx)
    tol = mpfr(1) / (mpz(1) << ROUND_SLACK)
    for z in sol:
        if abs(z.imag) > tol:
            raise RoundingAmbiguous(f"imaginary residue {z.imag} in coordinate solve")
    scaled = cyclotomic_round([z.real for z in sol], u, ROUND_SLACK)
    return scaled / denominator_bound(chi, k).value


def l_via_functional_equation(chi: DirichletCharacter, k: int) -> Cyclotomic:
    """Exact L(chi, 1-k) via the complete functional equation (k >= 2).

    On a RoundingAmbiguous (insufficient accuracy) the computation is retried
    exactly once with B doubled, then the error propagates.
    """
    if k < 2:
        raise KTooSmall("use the Bernoulli or weight-one routes for k = 1")
    if not chi.is_primitive:
        raise ValueError("chi must be primitive")
    if chi.is_even != (k % 2 == 0):
        return Cyclotomic.from_rational(0)
    fe = _fe_real if chi.order <= 2 else _fe_complex
    try:
        return fe(chi, k, 1.0)
    except RoundingAmbiguous:
        return fe(chi, k, 2.0)
