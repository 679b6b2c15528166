"""Dirichlet characters: factored construction, conductor, parity, order,
evaluation, numeric Gauss sums, and the non-primitive Euler-factor correction.

A character mod F is stored factored by prime power: each odd p^v || F
carries one cyclic component on a primitive root, the 2-part carries <-1>
(v = 2) or <-1> x <5> (v >= 3).  Values are roots of unity zeta_u^a where u
is the character order, so evaluation returns either the exponent a (or None
off the units) or the exact Cyclotomic value.  Quadratic characters chi_D
bypass all of this through the Kronecker symbol, which is what makes the
O(sqrt(F)) methods usable at billion-scale discriminants.
"""

from __future__ import annotations

import threading
from math import gcd, lcm

import gmpy2
from gmpy2 import mpc, mpfr

from . import nt
from .errors import CharacterSpecError, NotFundamental
from .exact import Cyclotomic, context

__all__ = [
    "DirichletCharacter",
    "character_from_discriminant",
    "trivial_character",
    "character_from_components",
    "all_characters",
    "all_primitive_characters",
    "conductor_and_primitive",
    "induce",
    "induced_correction",
    "gauss_sum",
    "parse_character_spec",
]

_TABLE_LIMIT = 1_000_000


class _Component:
    """One prime-power block of (Z/FZ)^*: generators, their orders, and the
    character exponents on them (chi(g_i) = e(exps[i] / orders[i]))."""

    __slots__ = ("q", "p", "v", "gens", "orders", "exps", "_dlog")

    def __init__(self, q, p, v, gens, orders, exps):
        self.q, self.p, self.v = q, p, v
        self.gens = tuple(gens)
        self.orders = tuple(orders)
        self.exps = tuple(e % o for e, o in zip(exps, orders))
        self._dlog = None

    def dlog(self, n: int) -> tuple[int, ...]:
        """Exponent vector of n on the component generators."""
        n %= self.q
        if self._dlog is None:
            table = {}
            if len(self.gens) == 1:
                g, o = self.gens[0], self.orders[0]
                x = 1
                for t in range(o):
                    table[x] = (t,)
                    x = x * g % self.q
            else:
                g1, g2 = self.gens
                o1, o2 = self.orders
                x1 = 1
                for t1 in range(o1):
                    x = x1
                    for t2 in range(o2):
                        table[x] = (t1, t2)
                        x = x * g2 % self.q
                    x1 = x1 * g1 % self.q
            self._dlog = table
        return self._dlog[n]


def _primitive_root(p: int, v: int) -> int:
    """Smallest generator of (Z/p^vZ)^* for odd p (works for every v >= 1)."""
    qs = [q for q, _ in nt.factorize(p - 1)]
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            break
        g += 1
    if v >= 2 and pow(g, p - 1, p * p) == 1:
        g += p
    return g


_COMPONENT_STRUCT: dict[int, tuple] = {}
_STRUCT_LOCK = threading.Lock()


def _group_structure(q: int, p: int, v: int):
    """Canonical (gens, orders) of (Z/qZ)^* for a prime power q = p^v."""
    if q in _COMPONENT_STRUCT:
        return _COMPONENT_STRUCT[q]
    with _STRUCT_LOCK:
        if q not in _COMPONENT_STRUCT:
            if p == 2:
                if v == 1:
                    st = ((), ())
                elif v == 2:
                    st = ((3,), (2,))
                else:
                    st = ((q - 1, 5), (2, 1 << (v - 2)))
            else:
                phi = q // p * (p - 1)
                st = ((_primitive_root(p, v),), (phi,))
            _COMPONENT_STRUCT[q] = st
    return _COMPONENT_STRUCT[q]


def _crt(r1: int, m1: int, r2: int, m2: int) -> int:
    if m1 == 1:
        return r2 % m2
    if m2 == 1:
        return r1 % m1
    inv = pow(m1, -1, m2)
    return (r1 + (r2 - r1) * inv % m2 * m1) % (m1 * m2)


class DirichletCharacter:
    """A Dirichlet character mod F, immutable after construction.

    quadratic_discriminant is set when the character is the Kronecker
    character chi_D; such characters evaluate via the Kronecker symbol and
    need no component tables.
    """

    __slots__ = (
        "modulus",
        "components",
        "quadratic_discriminant",
        "_order",
        "_conductor",
        "_even",
        "_table",
        "_lock",
    )

    def __init__(self, modulus, components=(), quadratic_discriminant=None):
        self.modulus = int(modulus)
        self.components = tuple(components)
        self.quadratic_discriminant = quadratic_discriminant
        self._order = None
        self._conductor = None
        self._even = None
        self._table = None
        self._lock = threading.Lock()

    # -- basic attributes ------------------------------------------------
    @property
    def order(self) -> int:
        if self._order is None:
            if self.quadratic_discriminant is not None:
                self._order = 1 if self.quadratic_discriminant == 1 else 2
            else:
                u = 1
                for comp in self.components:
                    for e, o in zip(comp.exps, comp.orders):
                        u = lcm(u, o // gcd(e, o))
                self._order = u
        return self._order

    @property
    def is_even(self) -> bool:
        if self._even is None:
            if self.quadratic_discriminant is not None:
                self._even = self.quadratic_discriminant > 0
            else:
                self._even = self.value_exponent(self.modulus - 1 if self.modulus > 1 else 1) == 0
        return self._even

    @property
    def parity(self) -> str:
        return "even" if self.is_even else "odd"

    @property
    def conductor(self) -> int:
        if self._conductor is None:
            if self.quadratic_discriminant is not None:
                self._conductor = abs(self.quadratic_discriminant)
            else:
                f = 1
                for comp in self.components:
                    f *= _component_conductor(comp)
                self._conductor = f
        return self._conductor

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus or self.modulus == 1

    def is_quadratic(self) -> bool:
        return self.order <= 2

    # -- evaluation --------------------------------------------------------
    def value_exponent(self, n: int) -> int | None:
        """a with chi(n) = zeta_u^a, or None when gcd(n, F) > 1."""
        F = self.modulus
        if self.quadratic_discriminant is not None:
            k = nt.kronecker(self.quadratic_discriminant, n)
            if k == 0:
                return None if F > 1 else 0
            return 0 if k == 1 else self.order // 2
        if F == 1:
            return 0
        n %= F
        if gcd(n, F) != 1:
            return None
        u = self.order
        a = 0
        for comp in self.components:
            ts = comp.dlog(n)
            for t, e, o in zip(ts, comp.exps, comp.orders):
                a = (a + e * t * (u // o)) % u
        return a

    def exponent_table(self):
        """value_exponent for all residues 0..F-1 (F below the table limit)."""
        if self._table is None:
            F = self.modulus
            if F > _TABLE_LIMIT:
                raise ValueError("modulus too large for a value table")
            with self._lock:
                if self._table is None:
                    self._table = [self.value_exponent(n) for n in range(F)]
        return self._table

    def sign_value(self, n: int) -> int:
        """chi(n) as an integer; only valid for quadratic (order <= 2) characters."""
        if self.quadratic_discriminant is not None:
            return nt.kronecker(self.quadratic_discriminant, n)
        a = self.value_exponent(n)
        if a is None:
            return 0
        return 1 if a == 0 else -1

    def __call__(self, n: int) -> Cyclotomic:
        a = self.value_exponent(n)
        u = self.order
        if a is None:
            return Cyclotomic.from_rational(0, u)
        return Cyclotomic.root_of_unity(u, a)

    # -- derived characters -------------------------------------------------
    def power(self, j: int) -> "DirichletCharacter":
        if self.quadratic_discriminant is not None:
            if j % max(self.order, 1) == 0 or self.quadratic_discriminant == 1:
                return induce(trivial_character(), self.modulus)
            return self
        comps = [
            _Component(c.q, c.p, c.v, c.gens, c.orders, [e * j for e in c.exps])
            for c in self.components
        ]
        return DirichletCharacter(self.modulus, comps)

    def conjugate(self) -> "DirichletCharacter":
        return self.power(-1)

    # -- identity -------------------------------------------------------------
    def _key(self):
        gens_exps = []
        for q, p, v in _modulus_blocks(self.modulus):
            gens, orders = _group_structure(q, p, v)
            for g in gens:
                b = _crt(g, q, 1, self.modulus // q)
                gens_exps.append(self.value_exponent(b))
        return (self.modulus, self.order, tuple(gens_exps))

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.quadratic_discriminant is not None:
            return f"chi_D({self.quadratic_discriminant})"
        return f"DirichletCharacter(mod {self.modulus}, order {self.order})"


def _component_conductor(comp: _Component) -> int:
    p, v = comp.p, comp.v
    if p == 2:
        if v <= 1:
            return 1
        if v == 2:
            return 4 if comp.exps[0] % 2 == 1 else 1
        e1, e2 = comp.exps
        o2 = comp.orders[1]
        d2 = o2 // gcd(e2, o2)
        if d2 > 1:
            return 4 * d2
        return 4 if e1 % 2 == 1 else 1
    e, o = comp.exps[0], comp.orders[0]
    d = o // gcd(e, o)
    if d == 1:
        return 1
    w = 1
    dp = d
    while dp % p == 0:
        dp //= p
        w += 1
    return p**w


def _modulus_blocks(F: int):
    return [(p**v, p, v) for p, v in nt.factorize(F)]


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

_TRIVIAL = None


def trivial_character() -> DirichletCharacter:
    global _TRIVIAL
    if _TRIVIAL is None:
        _TRIVIAL = DirichletCharacter(1, (), quadratic_discriminant=1)
    return _TRIVIAL


def character_from_discriminant(D: int) -> DirichletCharacter:
    """The Kronecker character chi_D = (D/.) for a fundamental discriminant."""
    D = int(D)
    if not nt.is_fundamental_discriminant(D):
        raise NotFundamental(f"{D} is not a fundamental discriminant")
    if D == 1:
        return trivial_character()
    return DirichletCharacter(abs(D), (), quadratic_discriminant=D)


def character_from_components(F: int, exps_by_block) -> DirichletCharacter:
    """Character mod F from per-block exponent tuples on canonical generators."""
    comps = []
    for (q, p, v), exps in zip(_modulus_blocks(F), exps_by_block):
        gens, orders = _group_structure(q, p, v)
        if len(exps) != len(gens):
            raise ValueError(f"block {q} expects {len(gens)} exponents")
        comps.append(_Component(q, p, v, gens, orders, exps))
    return DirichletCharacter(F, comps)


def all_characters(F: int):
    """Every Dirichlet character mod F."""
    blocks = _modulus_blocks(F)
    structs = [_group_structure(q, p, v) for q, p, v in blocks]

    def rec(i, chosen):
        if i == len(blocks):
            yield character_from_components(F, chosen)
            return
        gens, orders = structs[i]
        ranges = [range(o) for o in orders]

        def walk(j, cur):
            if j == len(ranges):
                yield tuple(cur)
                return
            for e in ranges[j]:
                yield from walk(j + 1, cur + [e])

        for exps in walk(0, []):
            yield from rec(i + 1, chosen + [exps])

    if F == 1:
        yield trivial_character()
        return
    yield from rec(0, [])


def all_primitive_characters(F: int):
    if F == 1:
        yield trivial_character()
        return
    for chi in all_characters(F):
        if chi.is_primitive:
            yield chi


def induce(chi_f: DirichletCharacter, F: int) -> DirichletCharacter:
    """The character mod F induced by chi_f (conductor of chi_f must divide F)."""
    f = chi_f.modulus
    if F % f != 0:
        raise ValueError("conductor must divide the new modulus")
    if F == f:
        return chi_f
    u = max(chi_f.order, 1)
    comps = []
    for q, p, v in _modulus_blocks(F):
        gens, orders = _group_structure(q, p, v)
        exps = []
        for g, o in zip(gens, orders):
            b = _crt(g, q, 1, F // q)
            a = chi_f.value_exponent(b)
            if a is None:
                raise ValueError("induction witness not coprime to conductor")
            num = a * o
            if num % u:
                raise ValueError("character does not factor as expected")
            exps.append(num // u)
        comps.append(_Component(q, p, v, gens, orders, exps))
    return DirichletCharacter(F, comps)


def conductor_and_primitive(chi: DirichletCharacter):
    """(f, chi_f): the conductor and the primitive character inducing chi."""
    f = chi.conductor
    if f == chi.modulus:
        return f, chi
    if f == 1:
        return 1, trivial_character()
    if chi.quadratic_discriminant is not None:
        return f, chi
    u = chi.order
    comps = []
    for q, p, v in _modulus_blocks(f):
        gens, orders = _group_structure(q, p, v)
        qfull = p ** _block_valuation(chi.modulus, p)
        exps = []
        for g, o in zip(gens, orders):
            b = _crt(g, qfull, 1, chi.modulus // qfull)
            a = chi.value_exponent(b)
            num = a * o
            assert num % u == 0, "conductor computation out of step with values"
            exps.append(num // u)
        comps.append(_Component(q, p, v, gens, orders, exps))
    out = DirichletCharacter(f, comps)
    if out.order <= 2 and f > 1:
        # identify the Kronecker form when the primitive character is quadratic
        for D in (f, -f):
            if nt.is_fundamental_discriminant(D):
                cand = character_from_discriminant(D)
                if cand == out:
                    return f, cand
    return f, out


def _block_valuation(F: int, p: int) -> int:
    v = 0
    while F % p == 0:
        F //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# Non-primitive correction and Gauss sums
# ---------------------------------------------------------------------------


def induced_correction(chi_f: DirichletCharacter, F: int, k: int) -> Cyclotomic:
    """prod_{p | F, p not | f} (1 - chi_f(p) p^(k-1)).

    Multiplying L(chi_f, 1-k) by this yields L(chi, 1-k) for the character
    mod F induced by chi_f.  The correction exponent is read as k-1.
    """
    f = chi_f.modulus
    if F % f != 0:
        raise ValueError("f must divide F")
    u = max(chi_f.order, 1)
    out = Cyclotomic.from_rational(1, u)
    for p, _ in nt.factorize(F):
        if f % p == 0:
            continue
        out = out * (Cyclotomic.from_rational(1, u) - chi_f(p) * (p ** (k - 1)))
    return out


def gauss_sum(chi: DirichletCharacter, prec: int) -> mpc:
    """Gauss sum sum_a chi(a) e(a/F) at `prec` bits; |g(chi)| = sqrt(F) for
    primitive chi.  Quadratic characters get the exact branch sqrt(D) for
    D > 0 and i sqrt(|D|) for D < 0."""
    ctx = context(prec + 16)
    F = chi.modulus
    D = chi.quadratic_discriminant
    if D is not None:
        root = ctx.sqrt(ctx.mpfr(abs(D)))
        return ctx.mpc(root, 0) if D > 0 else ctx.mpc(0, root)
    two_pi = 2 * gmpy2.const_pi(prec + 16)
    u = chi.order
    total = ctx.mpc(0)
    for a in range(1, F + 1 if F == 1 else F):
        t = chi.value_exponent(a)
        if t is None:
            continue
        # chi(a) e(a/F) = e(t/u + a/F)
        angle = ctx.mul(two_pi, ctx.add(ctx.div(ctx.mpfr(t), u), ctx.div(ctx.mpfr(a), F)))
        total = ctx.add(total, ctx.exp(ctx.mpc(0, angle)))
    return total


# ---------------------------------------------------------------------------
# CLI character specs
# ---------------------------------------------------------------------------


def parse_character_spec(spec: str) -> DirichletCharacter:
    """Parse "D:<int>" (Kronecker character) or
    "m:<F>:g:<g1,g2,...>:e:<e1,e2,...>" (generators and exponents per block).

    For the 2-part with modulus 2^v, v >= 3, two generator slots are consumed
    and the first must be -1 mod 2^v.  Errors carry the offending position.
    """
    if spec.startswith("D:"):
        body = spec[2:]
        try:
            D = int(body)
        except ValueError:
            raise CharacterSpecError("expected an integer discriminant", 2) from None
        try:
            return character_from_discriminant(D)
        except NotFundamental:
            raise CharacterSpecError(f"{D} is not a fundamental discriminant", 2) from None
    if not spec.startswith("m:"):
        raise CharacterSpecError("spec must start with 'D:' or 'm:'", 0)
    parts = spec.split(":")
    if len(parts) != 6 or parts[2] != "g" or parts[4] != "e":
        raise CharacterSpecError("expected m:<F>:g:<...>:e:<...>", len("m:" + parts[1]))
    try:
        F = int(parts[1])
    except ValueError:
        raise CharacterSpecError("modulus must be an integer", 2) from None
    if F < 1:
        raise CharacterSpecError("modulus must be >= 1", 2)
    gpos = spec.index(":g:") + 3
    epos = spec.index(":e:") + 3
    try:
        gens_in = [int(x) for x in parts[3].split(",")] if parts[3] else []
    except ValueError:
        raise CharacterSpecError("generators must be integers", gpos) from None
    try:
        exps_in = [int(x) for x in parts[5].split(",")] if parts[5] else []
    except ValueError:
        raise CharacterSpecError("exponents must be integers", epos) from None
    if len(gens_in) != len(exps_in):
        raise CharacterSpecError("generator and exponent lists differ in length", epos)

    blocks = _modulus_blocks(F)
    slot = 0
    exps_by_block = []
    for q, p, v in blocks:
        gens, orders = _group_structure(q, p, v)
        exps = []
        for g_can, o in zip(gens, orders):
            if slot >= len(gens_in):
                raise CharacterSpecError(
                    f"missing generator for block {q}", len(spec) - 1
                )
            g_user, e_user = gens_in[slot] % q, exps_in[slot]
            slot += 1
            if p == 2 and v >= 3 and g_can == q - 1:
                if g_user != q - 1:
                    raise CharacterSpecError(
                        f"first 2-part generator must be -1 mod {q}", gpos
                    )
                exps.append(e_user)
                continue
            # translate chi(g_user) = e(e_user / o) to the canonical generator
            comp = _Component(q, p, v, gens, orders, [0] * len(gens))
            ts = comp.dlog(g_user) if gcd(g_user, q) == 1 else None
            if ts is None:
                raise CharacterSpecError(f"{g_user} is not a unit mod {q}", gpos)
            t = ts[-1] if p == 2 and v >= 3 else ts[0]
            if gcd(t, o) != 1:
                raise CharacterSpecError(f"{g_user} does not generate block {q}", gpos)
            exps.append(e_user * pow(t, -1, o))
        exps_by_block.append(exps)
    if slot != len(gens_in):
        raise CharacterSpecError("too many generators for this modulus", gpos)
    return character_from_components(F, exps_by_block)
