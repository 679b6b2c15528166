"""Exact q-expansions: Eisenstein series, theta, eta-quotient forms at levels
2 and 4, Rankin-Cohen brackets, Gegenbauer bracket weights, and the
constant-term (Siegel) coefficients at level 1 and Gamma_0(2).

Two Eisenstein normalizations coexist and every consumer documents which one
it takes: eisenstein_level1 returns the constant-term-1 series E_k, while the
bracket coefficient formulas are stated for F_r = -B_r E_r / (2r), whose q^1
coefficient is 1.  A silent mismatch between the two is the likeliest bug in
this corner, hence the duplication of constructors and cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from gmpy2 import mpq

from . import nt
from .errors import Inconsistent, RankDeficient
from .exact import bernoulli_number
from .nt import WeightPolynomial
from .qseries import QSeries

__all__ = [
    "eisenstein_level1",
    "eisenstein_weight1_coefficient",
    "theta",
    "eisenstein_chi4",
    "level_forms",
    "eta_quotient",
    "v_operator",
    "derivative_D",
    "gegenbauer",
    "bracket_theta",
    "rankin_cohen_generic",
    "SiegelCoefficients",
    "siegel_coefficients",
    "solve_in_basis",
]


# ---------------------------------------------------------------------------
# Basic series
# ---------------------------------------------------------------------------


def eisenstein_level1(k: int, n_max: int) -> QSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, constant term 1; E_0 = 1."""
    if k < 0 or k % 2 != 0:
        raise ValueError("weight must be even and >= 0")
    if k == 0:
        return QSeries([1], 0, n_max)
    c = -mpq(2 * k) / bernoulli_number(k)
    coeffs = [mpq(1)] + [c * nt.divisor_sum_twisted("plain", k - 1, n) for n in range(1, n_max + 1)]
    return QSeries(coeffs, 0, n_max)


def eisenstein_weight1_coefficient(r: int) -> mpq:
    """Constant term -B_r/(2r) of F_r = -B_r E_r/(2r) (q^1-normalized series)."""
    return -bernoulli_number(r) / (2 * r)


def theta(n_max: int) -> QSeries:
    """theta = sum_{s in Z} q^(s^2) = 1 + 2 sum_{s>=1} q^(s^2)."""
    coeffs = [mpq(0)] * (n_max + 1)
    coeffs[0] = mpq(1)
    s = 1
    while s * s <= n_max:
        coeffs[s * s] = mpq(2)
        s += 1
    return QSeries(coeffs, 0, n_max)


def eisenstein_chi4(variant: str, ell: int, n_max: int) -> QSeries:
    """The two weight-ell Eisenstein series with chi_{-4} twist:
    type1 has constant term L(chi_{-4}, 1-ell)/2 and coefficients
    sigma^{(1)}_{ell-1}(n); type2 has constant 0 and sigma^{(2)}_{ell-1}(n)."""
    if ell < 1 or ell % 2 == 0:
        raise ValueError("ell must be odd and >= 1")
    if variant == "type1":
        from .bernoulli import l_via_bernoulli
        from .characters import character_from_discriminant

        if ell < 3:
            raise ValueError("type1 needs ell >= 3 for a finite constant term here")
        const = l_via_bernoulli(character_from_discriminant(-4), ell).rational_value() / 2
        kind = "type1"
    elif variant == "type2":
        const = mpq(0)
        kind = "type2"
    else:
        raise ValueError("variant must be type1 or type2")
    coeffs = [const] + [nt.divisor_sum_twisted(kind, ell - 1, n) for n in range(1, n_max + 1)]
    return QSeries(coeffs, 0, n_max)


def eta_quotient(powers: dict[int, int], n_max: int) -> QSeries:
    """prod_d eta(d tau)^{e_d} as a q-series; the total eta-power must make the
    leading exponent sum(d e_d)/24 an integer."""
    num, den = 0, 24
    for d, e in powers.items():
        num += d * e
    if num % den:
        raise ValueError("eta quotient has fractional leading exponent")
    lead = num // den
    # Euler products from the pentagonal number theorem, then integer powers
    result = QSeries([1], 0, n_max)
    for d, e in sorted(powers.items()):
        base = _euler_function(n_max).dilate(d).truncate(n_max)
        result = (result * base.pow(e).truncate(n_max)).truncate(n_max)
    out = [mpq(0)] * (n_max + 1)
    for i, c in enumerate(result.coeffs):
        n = result.val + i + lead
        if 0 <= n <= n_max:
            out[n] = c
    return QSeries(out, 0, n_max)


_EULER_FN_CACHE: dict[int, QSeries] = {}


def _euler_function(n_max: int) -> QSeries:
    """prod_{n>=1} (1 - q^n), sparse by the pentagonal number theorem."""
    best = _EULER_FN_CACHE.get(n_max)
    if best is not None:
        return best
    coeffs = [mpq(0)] * (n_max + 1)
    coeffs[0] = mpq(1)
    j = 1
    while True:
        g1 = j * (3 * j - 1) // 2
        g2 = j * (3 * j + 1) // 2
        if g1 > n_max and g2 > n_max:
            break
        sign = 1 if j % 2 == 0 else -1
        if g1 <= n_max:
            coeffs[g1] += sign
        if g2 <= n_max:
            coeffs[g2] += sign
        j += 1
    series = QSeries(coeffs, 0, n_max)
    if len(_EULER_FN_CACHE) < 8:
        _EULER_FN_CACHE[n_max] = series
    return series


_LEVEL_FORMS = ("F2_level2", "F4_level2", "Delta4_level2", "F2_level4", "Delta4_level4")


def level_forms(name: str, n_max: int) -> QSeries:
    """The auxiliary forms on Gamma_0(2) and Gamma_0(4).

    Level 2: F2 = 2 E2(2t) - E2(t), F4 = (16 E4(2t) - E4(t))/15,
    Delta4 = (E4(t) - E4(2t))/240.  Level 4: F2 = eta(4t)^8/eta(2t)^4
    = -(E2 - 3 E2(2t) + 2 E2(4t))/24 and Delta4 = eta(t)^8 eta(4t)^8/eta(2t)^8
    = (E4 - 17 E4(2t) + 16 E4(4t))/240; for these both constructions are
    computed and must agree coefficient-by-coefficient.
    """
    if name not in _LEVEL_FORMS:
        raise ValueError(f"unknown form {name!r}")
    if name in ("F2_level2", "Delta4_level2"):
        ew = eisenstein_level1(2 if name == "F2_level2" else 4, n_max)
        e2 = ew.dilate(2).truncate(n_max)
        if name == "F2_level2":
            return (e2.scale(2) - ew).truncate(n_max)
        return (ew - e2).scale(mpq(1, 240)).truncate(n_max)
    if name == "F4_level2":
        e4 = eisenstein_level1(4, n_max)
        return (e4.dilate(2).truncate(n_max).scale(16) - e4).scale(mpq(1, 15)).truncate(n_max)
    if name == "F2_level4":
        e2 = eisenstein_level1(2, n_max)
        comb = (e2 - e2.dilate(2).truncate(n_max).scale(3) + e2.dilate(4).truncate(n_max).scale(2))
        comb = comb.scale(mpq(-1, 24)).truncate(n_max)
        eta = eta_quotient({4: 8, 2: -4}, n_max)
        if comb != eta:
            raise Inconsistent("eta-quotient and Eisenstein forms of F2 disagree")
        return comb
    e4 = eisenstein_level1(4, n_max)
    comb = (e4 - e4.dilate(2).truncate(n_max).scale(17) + e4.dilate(4).truncate(n_max).scale(16))
    comb = comb.scale(mpq(1, 240)).truncate(n_max)
    eta = eta_quotient({1: 8, 4: 8, 2: -8}, n_max)
    if comb != eta:
        raise Inconsistent("eta-quotient and Eisenstein forms of Delta4 disagree")
    return comb


def v_operator(f: QSeries, d: int) -> QSeries:
    """f(tau) -> f(d tau): index dilation by d."""
    return f.dilate(d)


def derivative_D(f: QSeries) -> QSeries:
    """q d/dq."""
    return f.derivative()


# ---------------------------------------------------------------------------
# Gegenbauer weights and brackets
# ---------------------------------------------------------------------------


def _half_binom(a: mpq, j: int) -> mpq:
    out = mpq(1)
    for i in range(j):
        out *= (a - i) / (i + 1)
    return out


def gegenbauer(n: int, r: int) -> WeightPolynomial:
    """P_{n,r}(X) = sum_l (-1)^l C(n-1/2, l) C(2n+r-l-3/2, n-l) X^(n-l),
    the degree-n weight polynomial of the n-th theta bracket."""
    if n < 0:
        raise ValueError("n must be >= 0")
    coeffs = [mpq(0)] * (n + 1)
    for ell in range(n + 1):
        c = (-1) ** ell * _half_binom(mpq(2 * n - 1, 2), ell) * _half_binom(
            mpq(2 * (2 * n + r - ell) - 3, 2), n - ell
        )
        coeffs[n - ell] += c
    return WeightPolynomial(tuple(coeffs))


def bracket_theta(n: int, r: int, N: int, n_max: int, kind: str = "plain") -> QSeries:
    """Coefficients b(m) = m^n sum_s P_{n,r}(s^2/m) sigma_{r-1}((m - s^2)/N)
    of the n-th bracket of theta with the dilated q^1-normalized Eisenstein
    series of weight r (sigma twisted per `kind`).

    The divisor-sum convention sigma(x) = 0 for x outside Z_{>=1} is applied
    literally, so the s = +-sqrt(m) boundary contributes nothing; for n = 0
    the constant term is the product of the constant terms, for n >= 1 the
    m^n factor forces b(0) = 0.
    """
    P = gegenbauer(n, r) if n > 0 else None
    coeffs = [mpq(0)] * (n_max + 1)
    if n == 0:
        if kind == "plain":
            coeffs[0] = eisenstein_weight1_coefficient(r)
        elif kind == "type1":
            from .bernoulli import l_via_bernoulli
            from .characters import character_from_discriminant

            coeffs[0] = l_via_bernoulli(
                character_from_discriminant(-4), r
            ).rational_value() / 2
    for m in range(1, n_max + 1):
        coeffs[m] = nt.s_sum(kind, r - 1, m, N, P)
    return QSeries(coeffs, 0, n_max)


def rankin_cohen_generic(f: QSeries, kf, g: QSeries, kg, n: int) -> QSeries:
    """The n-th Rankin-Cohen bracket
    [f, g]_n = sum_l (-1)^l C(kf+n-1, n-l) C(kg+n-1, l) D^l(f) D^(n-l)(g)
    with half-integer weights, normalized exactly as written (the overall
    constant cancels wherever a basis is solved against)."""
    kf, kg = mpq(kf), mpq(kg)
    known = min(f.known_to + 1 + g.val, g.known_to + 1 + f.val) - 1
    out = QSeries([0], 0, known)
    Dl_f = f
    for ell in range(n + 1):
        Dg = g
        for _ in range(n - ell):
            Dg = Dg.derivative()
        c = (-1) ** ell * _half_binom(kf + n - 1, n - ell) * _half_binom(kg + n - 1, ell)
        out = out + (Dl_f * Dg).scale(c)
        Dl_f = Dl_f.derivative()
    return out


# ---------------------------------------------------------------------------
# Constant-term (Siegel) coefficients
# ---------------------------------------------------------------------------


def _dim_level1(k: int) -> int:
    if k < 0 or k % 2:
        return 0
    return k // 12 if k % 12 == 2 else k // 12 + 1


@dataclass(frozen=True)
class SiegelCoefficients:
    """The c_i of a negative-valuation series E/Delta^r with c_0 != 0; pairing
    (a(n))_{n<=r} against (c_{-n}) annihilates every form of this weight."""

    weight: int
    level: int
    r: int
    coeffs: dict[int, mpq]  # i -> c_i for -r <= i <= 0

    def c(self, i: int) -> mpq:
        return self.coeffs[i]


def siegel_coefficients(weight: int, level: int) -> SiegelCoefficients:
    """Exact c_i, -r <= i <= 0, at level 1 (Delta^-r E_{12r-k+2}) or level 2
    (E/Delta_4^r with r = floor(k/4)+2 and E = F2 F4 or F4 by k mod 4)."""
    if weight % 2:
        raise ValueError("weight must be even")
    if level == 1:
        if weight < 4:
            raise ValueError("level 1 needs weight >= 4")
        r = _dim_level1(weight)
        w_eis = 12 * r - weight + 2
        n_max = r + 1
        eis = eisenstein_level1(w_eis, n_max)
        delta = eta_quotient({1: 24}, n_max + r)
        series = eis * delta.inverse().pow(r)
    elif level == 2:
        r = weight // 4 + 2
        n_max = r + 1
        if weight % 4 == 0:
            e = level_forms("F2_level2", n_max + r) * level_forms("F4_level2", n_max + r)
        else:
            e = level_forms("F4_level2", n_max + r)
        d4 = level_forms("Delta4_level2", n_max + r)
        series = e.truncate(n_max + r) * d4.inverse().pow(r)
    else:
        raise ValueError("level must be 1 or 2")
    coeffs = {i: series.coefficient(i) for i in range(-r, 1)}
    if coeffs[0] == 0:
        raise Inconsistent("vanishing constant-term coefficient c_0")
    return SiegelCoefficients(weight=weight, level=level, r=r, coeffs=coeffs)


# ---------------------------------------------------------------------------
# Exact linear solves against a basis
# ---------------------------------------------------------------------------


def solve_in_basis(target: QSeries, basis: list[QSeries], rows: list[int]) -> list[mpq]:
    """Exact rational x with target = sum_j x_j basis_j on the given exponent
    rows; extra rows must be exactly consistent.

    Raises RankDeficient when the rows cannot pin every coefficient and
    Inconsistent when no solution exists: the latter is load-bearing, it is
    what falsifies a conjectured identity fed to this solver.
    """
    ncols = len(basis)
    if len(rows) < ncols:
        raise RankDeficient(f"{len(rows)} rows for {ncols} unknowns")
    A = [[b.coefficient(n) for b in basis] for n in rows]
    y = [target.coefficient(n) for n in rows]
    return solve_exact(A, y)


def solve_exact(A: list[list], y: list) -> list[mpq]:
    """Gauss elimination over mpq for an overdetermined consistent system."""
    nrows, ncols = len(A), len(A[0]) if A else 0
    M = [[mpq(c) for c in row] + [mpq(v)] for row, v in zip(A, y)]
    pivots = []
    row = 0
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
        if row == nrows:
            break
    for r in range(row, nrows):
        if M[r][ncols] != 0:
            raise Inconsistent("overdetermined system has no exact solution")
    if len(pivots) < ncols:
        raise RankDeficient(f"rank {len(pivots)} < {ncols} unknowns")
    x = [mpq(0)] * ncols
    for i, col in enumerate(pivots):
        x[col] = M[i][ncols]
    return x
