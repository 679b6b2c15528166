"""chi-Bernoulli numbers B_k(chi) and L(chi, 1-k) = -B_k(chi)/k.

B_k(chi) is defined by T/(e^{FT} - 1) sum_{0<=r<F} chi(r) e^{rT}
= sum B_k(chi) T^k / k!.  Six computation routes are provided: three direct
formulas driven by the power sums S_n(chi) = sum_{0<=r<F} chi(r) r^n, and
three recursions, of which the half-range one (driven by
Q_n(chi) = sum_{1<=r<F/2} chi(r) r^n) is the production default since it
sweeps only half the residues.  All are O(k F) and exist chiefly as the
small-conductor bootstrap and as mutual cross-checks.
"""

from __future__ import annotations

import threading
from math import comb

from gmpy2 import mpq, mpz

from .characters import DirichletCharacter
from .errors import VariantInapplicable
from .exact import Cyclotomic, bernoulli_number

__all__ = ["ChiBernoulliContext", "chi_bernoulli", "l_via_bernoulli", "VARIANTS"]

VARIANTS = (
    "direct1",
    "direct2",
    "direct3",
    "recursion_S",
    "recursion_half",
    "recursion_lucas",
)


class ChiBernoulliContext:
    """Per-character cache of the power sums S_n(chi) and Q_n(chi) and of
    already-computed B_k(chi); one sweep over residues fills every n at once,
    accumulating integer sums per character-value exponent."""

    def __init__(self, chi: DirichletCharacter):
        self.chi = chi
        self._S: list[Cyclotomic] = []
        self._Q: list[Cyclotomic] = []
        self._memo: dict[tuple[str, int], Cyclotomic] = {}
        self._lock = threading.Lock()

    # -- power sums -----------------------------------------------------
    def _sweep(self, n_max: int, half: bool) -> list[Cyclotomic]:
        chi, F, u = self.chi, self.chi.modulus, self.chi.order
        stop = (F + 1) // 2 if half else F
        start = 1 if half else 0
        buckets = [[0] * u for _ in range(n_max + 1)]
        if chi.quadratic_discriminant is not None:
            D = chi.quadratic_discriminant
            from .nt import kronecker

            neg = u // 2  # exponent of the -1 value (u = 2), unused for u = 1
            for r in range(start, stop):
                c = kronecker(D, r)
                if c == 0:
                    continue
                a = 0 if c == 1 else neg
                row = 1
                for n in range(n_max + 1):
                    buckets[n][a] += row
                    row *= r
        else:
            table = chi.exponent_table()
            for r in range(start, stop):
                a = table[r]
                if a is None:
                    continue
                row = 1
                for n in range(n_max + 1):
                    buckets[n][a] += row
                    row *= r
        out = []
        for n in range(n_max + 1):
            coeffs = [mpq(0)] * u
            for a, val in enumerate(buckets[n]):
                coeffs[a] = mpq(val)
            out.append(Cyclotomic(u, coeffs))
        return out

    def S(self, n: int) -> Cyclotomic:
        if n >= len(self._S):
            with self._lock:
                if n >= len(self._S):
                    self._S = self._sweep(max(n, 2 * len(self._S)), half=False)
        return self._S[n]

    def Q(self, n: int) -> Cyclotomic:
        if n >= len(self._Q):
            with self._lock:
                if n >= len(self._Q):
                    self._Q = self._sweep(max(n, 2 * len(self._Q)), half=True)
        return self._Q[n]

    # -- B_k -------------------------------------------------------------
    def bernoulli(self, k: int, variant: str) -> Cyclotomic:
        key = (variant, k)
        if key not in self._memo:
            self._memo[key] = _VARIANT_FNS[variant](self, k)
        return self._memo[key]


_CONTEXTS: dict[DirichletCharacter, ChiBernoulliContext] = {}
_CONTEXTS_LOCK = threading.Lock()


def context_for(chi: DirichletCharacter) -> ChiBernoulliContext:
    ctx = _CONTEXTS.get(chi)
    if ctx is None:
        with _CONTEXTS_LOCK:
            ctx = _CONTEXTS.setdefault(chi, ChiBernoulliContext(chi))
    return ctx


def _classical(ctx: ChiBernoulliContext, k: int) -> Cyclotomic:
    return Cyclotomic.from_rational(bernoulli_number(k))


def _direct1(ctx: ChiBernoulliContext, k: int) -> Cyclotomic:
    # (1/F) (S_k - (kF/2) S_{k-1} + sum_{1<=j<=k/2} C(k,2j) B_{2j} F^{2j} S_{k-2j});
    # degenerates to the tautology B_k = B_k at F = 1, so route to the classics.
    F = ctx.chi.modulus
    if F == 1:
        return _classical(ctx, k)
    acc = ctx.S(k) - ctx.S(k - 1) * mpq(k * F, 2)
    for j in range(1, k // 2 + 1):
        acc = acc + ctx.S(k - 2 * j) * (comb(k, 2 * j) * bernoulli_number(2 * j) * mpz(F) ** (2 * j))
    return acc / F


def _direct2(ctx: ChiBernoulliContext, k: int) -> Cyclotomic:
    # same combination evaluated residue-by-residue (Horner in r)
    chi, F = ctx.chi, ctx.chi.modulus
    if F == 1:
        return _classical(ctx, k)
    coeff = [mpq(0)] * (k + 1)
    coeff[k] = mpq(1)
    coeff[k - 1] = -mpq(k * F, 2)
    for j in range(1, k // 2 + 1):
        coeff[k - 2 * j] += comb(k, 2 * j) * bernoulli_number(2 * j) * mpz(F) ** (2 * j)
    u = chi.order
    buckets = [mpq(0)] * u
    for r in range(F):
        a = chi.value_exponent(r)
        if a is None:
            continue
        w = mpq(0)
        for c in reversed(coeff):
            w = w * r + c
        buckets[a] += w
    return Cyclotomic(u, buckets) / F


def _direct3(ctx: ChiBernoulliContext, k: int) -> Cyclotomic:
    # (1/F) sum_{1<=j<=k+1} ((-1)^(j-1)/j) C(k+1,j) sum_{0<=r<Fj} chi(r) r^k
    chi, F, u = ctx.chi, ctx.chi.modulus, ctx.chi.order
    if F > 1:
        table = chi.exponent_table()
    acc = Cyclotomic.from_rational(0, u)
    buckets = [mpq(0)] * u
    upper = 0
    for j in range(1, k + 2):
        for r in range(upper, F * j):
            a = table[r % F] if F > 1 else 0
            if a is None:
                continue
            buckets[a] += mpz(r) ** k
        upper = F * j
        inner = Cyclotomic(u, list(buckets))
        acc = acc + inner * (mpq((-1) ** (j - 1), j) * comb(k + 1, j))
    return acc / F


def _recursion_S(ctx: ChiBernoulliContext, k: int) -> Cyclotomic:
    # sum_{0<=j<K} F^{K-j} C(K,j) B_j(chi) = K S_{K-1}(chi), solved upward
    F = ctx.chi.modulus
    u = ctx.chi.order
    B: list[Cyclotomic] = [ctx.S(0) / F]
    for K in range(1, k + 1):
        acc = ctx.S(K) * (K + 1)
        for j in range(K):
            acc = acc - B[j] * (comb(K + 1, j) * mpz(F) ** (K + 1 - j))
        B.append(acc / ((K + 1) * F))
    return B[k]


def _recursion_half(ctx: ChiBernoulliContext, k: int) -> Cyclotomic:
    # (2^k - eps) B_k = -(k 2^{k-1} Q_{k-1} + sum_{1<=j<k/2} C(k,2j)(2^{k-1-2j} - eps) F^{2j} B_{k-2j}),
    # eps = conj(chi)(2); needs chi nontrivial.
    chi, F = ctx.chi, ctx.chi.modulus
    if F == 1:
        raise VariantInapplicable("half-range recursion needs a nontrivial character")
    eps = chi.conjugate()(2)
    lead = Cyclotomic.from_rational(mpz(2) ** k, eps.u) - eps
    if lead.is_zero():
        raise VariantInapplicable("2^k equals chibar(2); the division is undefined")
    acc = ctx.Q(k - 1) * (k * mpz(2) ** (k - 1))
    for j in range(1, (k - 1) // 2 + 1):
        factor = Cyclotomic.from_rational(mpz(2) ** (k - 1 - 2 * j), eps.u) - eps
        acc = acc + ctx.bernoulli(k - 2 * j, "recursion_half") * factor * (
            comb(k, 2 * j) * mpz(F) ** (2 * j)
        )
    return -acc / lead


def _recursion_lucas(ctx: ChiBernoulliContext, K: int) -> Cyclotomic:
    # half-history recursions driven by sums of chi(r) r^a (F-r)^b over r < F/2
    chi, F, u = ctx.chi, ctx.chi.modulus, ctx.chi.order
    if F == 1:
        raise VariantInapplicable("this recursion needs a nontrivial character")
    if K < 1:
        return ctx.S(0) / F
    even = chi.is_even
    if even != (K % 2 == 0):
        return Cyclotomic.from_rational(0, u)

    def half_sum(a: int, b: int, with_middle: bool) -> Cyclotomic:
        buckets = [mpq(0)] * u
        for r in range(1, (F + 1) // 2):
            e = chi.value_exponent(r)
            if e is None:
                continue
            w = mpz(r) ** a * mpz(F - r) ** b
            if with_middle:
                w *= F - 2 * r
            buckets[e] += w
        return Cyclotomic(u, buckets)

    if even:
        kk = K // 2
        rhs = half_sum(kk, kk, False) * mpq((-1) ** kk, F)
        acc = rhs
        for j in range(1, (kk - 1) // 2 + 1):
            acc = acc - ctx.bernoulli(K - 2 * j, "recursion_lucas") * mpq(
                comb(kk, 2 * j + 1) * mpz(F) ** (2 * j), K - 2 * j
            )
        return acc * 2
    kk = (K + 1) // 2
    rhs = half_sum(kk - 1, kk - 1, True) * mpq((-1) ** kk * kk, F)
    acc = rhs
    for j in range(1, (kk - 1) // 2 + 1):
        acc = acc - ctx.bernoulli(K - 2 * j, "recursion_lucas") * (
            comb(kk, 2 * j + 1) * mpz(F) ** (2 * j)
        )
    return acc / kk


_VARIANT_FNS = {
    "direct1": _direct1,
    "direct2": _direct2,
    "direct3": _direct3,
    "recursion_S": _recursion_S,
    "recursion_half": _recursion_half,
    "recursion_lucas": _recursion_lucas,
}


def chi_bernoulli(chi: DirichletCharacter, k: int, variant: str = "auto") -> Cyclotomic:
    """B_k(chi) for primitive chi; returns 0 when chi(-1) != (-1)^k and k >= 2.

    variant picks the computation route; "auto" uses the half-range recursion
    (the fastest) for nontrivial characters and the classical recurrence for
    the trivial one.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not chi.is_primitive:
        raise ValueError("chi must be primitive")
    if variant == "auto":
        variant = "recursion_S" if chi.modulus == 1 else "recursion_half"
    if variant not in _VARIANT_FNS:
        raise ValueError(f"unknown variant {variant!r}")
    if k >= 2 and chi.is_even != (k % 2 == 0):
        return Cyclotomic.from_rational(0, chi.order)
    return context_for(chi).bernoulli(k, variant)


def l_via_bernoulli(chi: DirichletCharacter, k: int, variant: str = "auto") -> Cyclotomic:
    """Exact L(chi, 1-k) = -B_k(chi)/k - chi(0)[k = 1] for primitive chi.

    The chi(0) correction only bites for the trivial character (F = 1, k = 1),
    where the value is zeta(0) = -1/2.  Mismatched parity returns 0 for k >= 2.
    """
    if k >= 2 and chi.is_even != (k % 2 == 0):
        return Cyclotomic.from_rational(0, chi.order)
    val = -chi_bernoulli(chi, k, variant) / k
    if chi.modulus == 1 and k == 1:
        val = val - 1
    return val
