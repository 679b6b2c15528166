"""Truncated power series in q with exact rational coefficients.

A QSeries is q^val * (a0 + a1 q + ... ), known through the absolute exponent
`known_to`; ring operations track how far the result is trustworthy, so that
computing long and truncating agrees with computing short (the truncation-
consistency invariant).  Negative valuations represent series like
Delta^-r * E, whose principal part carries the constant-term coefficients.
"""

from __future__ import annotations

from gmpy2 import mpq

__all__ = ["QSeries"]


class QSeries:
    __slots__ = ("val", "coeffs", "known_to")

    def __init__(self, coeffs, val: int = 0, known_to: int | None = None):
        coeffs = [mpq(c) for c in coeffs]
        if known_to is None:
            known_to = val + len(coeffs) - 1
        # normalize: strip leading zeros (raising val), pad to known_to
        while coeffs and coeffs[0] == 0 and val < 0:
            coeffs.pop(0)
            val += 1
        need = known_to - val + 1
        if need < 0:
            raise ValueError("known_to below valuation")
        coeffs = coeffs[:need] + [mpq(0)] * (need - len(coeffs))
        self.val = val
        self.coeffs = coeffs
        self.known_to = known_to

    # -- access ---------------------------------------------------------
    def coefficient(self, n: int) -> mpq:
        if n > self.known_to:
            raise IndexError(f"coefficient q^{n} beyond known precision {self.known_to}")
        if n < self.val:
            return mpq(0)
        return self.coeffs[n - self.val]

    def coefficients(self, upto: int) -> list[mpq]:
        return [self.coefficient(n) for n in range(min(self.val, 0), upto + 1)]

    def truncate(self, known_to: int) -> "QSeries":
        if known_to > self.known_to:
            raise ValueError("cannot extend precision by truncation")
        return QSeries(self.coeffs[: known_to - self.val + 1], self.val, known_to)

    def order(self) -> int:
        """Exponent of the first nonzero known coefficient."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return self.val + i
        return self.known_to + 1

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries([other])
            other = QSeries(other.coeffs, 0, self.known_to)
        val = min(self.val, other.val)
        known = min(self.known_to, other.known_to)
        out = [mpq(0)] * (known - val + 1)
        for src in (self, other):
            for i, c in enumerate(src.coeffs):
                n = src.val + i
                if val <= n <= known:
                    out[n - val] += c
        return QSeries(out, val, known)

    __radd__ = __add__

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.val, self.known_to)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QSeries) else QSeries([-mpq(other)], 0, self.known_to))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = mpq(c)
        return QSeries([a * c for a in self.coeffs], self.val, self.known_to)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        # known_to of a product: the unknown tail of one factor first pollutes
        # the exponent (known_to+1) + other.val
        known = min(self.known_to + 1 + other.val, other.known_to + 1 + self.val) - 1
        val = self.val + other.val
        out = [mpq(0)] * (known - val + 1)
        terms = [(i, c) for i, c in enumerate(other.coeffs) if c != 0]
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            base = self.val + i + other.val
            for j, b in terms:
                n = base + j
                if n > known:
                    break
                out[n - val] += a * b
        return QSeries(out, val, known)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        """Inverse of a series with a unit leading coefficient."""
        lead = self.order()
        if lead > self.known_to or self.coefficient(lead) == 0:
            raise ZeroDivisionError("series has no invertible leading term")
        a0 = self.coefficient(lead)
        n = self.known_to - lead
        u = [self.coefficient(lead + i) for i in range(n + 1)]
        inv = [mpq(0)] * (n + 1)
        inv[0] = 1 / a0
        for m in range(1, n + 1):
            acc = mpq(0)
            for i in range(1, m + 1):
                acc += u[i] * inv[m - i]
            inv[m] = -acc / a0
        return QSeries(inv, -lead, -lead + n)

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.inverse()
        return self.scale(1 / mpq(other))

    def pow(self, e: int) -> "QSeries":
        if e < 0:
            return self.inverse().pow(-e)
        result = QSeries([1], 0, self.known_to - self.val)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    __pow__ = pow

    # -- operators from the modular-forms toolbox ---------------------------
    def dilate(self, d: int) -> "QSeries":
        """f(q) -> f(q^d); coefficients land on multiples of d."""
        if d < 1:
            raise ValueError("dilation factor must be positive")
        if d == 1:
            return self
        known = self.known_to * d + (d - 1) if self.known_to >= 0 else self.known_to * d
        val = self.val * d
        out = [mpq(0)] * (known - val + 1)
        for i, c in enumerate(self.coeffs):
            out[(self.val + i) * d - val] = c
        return QSeries(out, val, known)

    def derivative(self) -> "QSeries":
        """q d/dq: multiplies the q^n coefficient by n."""
        return QSeries(
            [c * (self.val + i) for i, c in enumerate(self.coeffs)], self.val, self.known_to
        )

    # -- comparisons -----------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        upto = min(self.known_to, other.known_to)
        lo = min(self.val, other.val, 0)
        return all(self.coefficient(n) == other.coefficient(n) for n in range(lo, upto + 1))

    def __repr__(self):
        shown = []
        for i, c in enumerate(self.coeffs[:8]):
            if c != 0:
                shown.append(f"{c}*q^{self.val + i}")
        body = " + ".join(shown) if shown else "0"
        return f"QSeries({body} + O(q^{self.known_to + 1}))"
