"""Command-line front end: compute, cross-verify, precompute coefficient
caches, and benchmark.

Exit codes: 0 ok, 2 usage (including --strict on a parity-zero request and
inadmissible precompute pairs), 3 verification mismatch, 4 conjecture
inconsistency.  Output is line-oriented and stable: identical inputs produce
byte-identical reports apart from the trailing time_ms fields.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from gmpy2 import mpq

from . import lvalues, modforms, nt
from .bernoulli import l_via_bernoulli
from .characters import (
    DirichletCharacter,
    conductor_and_primitive,
    induced_correction,
    parse_character_spec,
)
from .errors import (
    CharacterSpecError,
    ConjectureInconsistent,
    InadmissiblePair,
    KTooSmall,
    LnegError,
)
from .exact import Cyclotomic
from .funceq import l_via_functional_equation
from .lvalues import CoefficientCache, default_cache_dir

METHODS = ("bernoulli", "functional_equation", "hecke_eisenstein", "half_integral")

# auto-selection thresholds (documented defaults, tunable via flags)
AUTO_K_CUTOFF = 100
AUTO_F_CUTOFF = 10**7


@dataclass(frozen=True)
class MethodChoice:
    method: str
    rationale: str


def choose_method(chi: DirichletCharacter, k: int) -> MethodChoice:
    """Deterministic method selection from (F, k): half-integral for
    quadratic characters at small k, the functional equation for large k
    unless the conductor is really large, Bernoulli otherwise."""
    D = chi.quadratic_discriminant
    quadratic = D is not None and D != 1
    F = chi.modulus
    if chi.is_even != (k % 2 == 0) and not (F == 1 and k == 1):
        return MethodChoice("parity_zero", "chi(-1) != (-1)^k forces L = 0")
    if k == 1:
        if quadratic and D < -4:
            return MethodChoice("half_integral", "k = 1 quadratic: class-number route")
        return MethodChoice("bernoulli", "k = 1: Bernoulli route")
    if k <= AUTO_K_CUTOFF:
        if quadratic:
            return MethodChoice("half_integral", f"k <= {AUTO_K_CUTOFF} and chi quadratic")
        return MethodChoice("bernoulli", f"k <= {AUTO_K_CUTOFF}, non-quadratic chi")
    if F <= AUTO_F_CUTOFF:
        return MethodChoice("functional_equation", f"k > {AUTO_K_CUTOFF} and F <= {AUTO_F_CUTOFF:.0e}")
    if quadratic:
        return MethodChoice("half_integral", f"k > {AUTO_K_CUTOFF} but F > {AUTO_F_CUTOFF:.0e}")
    return MethodChoice("functional_equation", "large k, large F, non-quadratic")


def applicable_methods(chi: DirichletCharacter, k: int) -> list[str]:
    out = ["bernoulli"]
    if k >= 2:
        out.append("functional_equation")
    D = chi.quadratic_discriminant
    if D is not None and D != 1:
        if k % 2 == 0 and k >= 2 and D > 4:
            out.append("hecke_eisenstein")
            out.append("half_integral")
        if k % 2 == 1 and k >= 3 and D < 0:
            if D < -4:
                out.append("hecke_eisenstein")
            out.append("half_integral")
        if k == 1 and D < -4:
            out.append("half_integral")
    return out


def compute_value(chi: DirichletCharacter, k: int, method: str, cache: CoefficientCache):
    """Dispatch one exact computation; imprimitive characters are reduced to
    their primitive part and corrected by the dead Euler factors."""
    f, chi_f = conductor_and_primitive(chi)
    corr = None
    if f != chi.modulus:
        corr = induced_correction(chi_f, chi.modulus, k)
        chi = chi_f
    D = chi.quadratic_discriminant
    if method == "bernoulli":
        value = l_via_bernoulli(chi, k)
    elif method == "functional_equation":
        value = l_via_functional_equation(chi, k)
    elif method == "hecke_eisenstein":
        if D is None or D == 1:
            raise LnegError("hecke_eisenstein requires a quadratic character")
        value = lvalues.l_hecke_even(D, k) if k % 2 == 0 else lvalues.l_hecke_odd(D, k)
    elif method == "half_integral":
        if D is None or D == 1:
            raise LnegError("half_integral requires a quadratic character")
        if k == 1:
            value = mpq(lvalues.l_weight_one(D))
        elif k % 2 == 0:
            value = lvalues.l_half_even(D, k, cache=cache)
        else:
            value = lvalues.l_half_odd(D, k, cache=cache)
    else:
        raise LnegError(f"unknown method {method!r}")
    if corr is not None:
        value = corr * value if isinstance(value, Cyclotomic) else corr * Cyclotomic.from_rational(value)
    return value


def format_value(value) -> str:
    if isinstance(value, Cyclotomic):
        if value.is_rational():
            return str(value.rational_value())
        coeffs = ",".join(str(c) for c in value.coeffs)
        return f"zeta{value.u}[{coeffs}]"
    return str(mpq(value))


def value_to_json(value):
    if isinstance(value, Cyclotomic) and not value.is_rational():
        return {"type": "cyclotomic", "order": value.u, "coeffs": [str(c) for c in value.coeffs]}
    v = value.rational_value() if isinstance(value, Cyclotomic) else mpq(value)
    return {"type": "rational", "value": str(v)}


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_compute(args) -> int:
    chi = parse_character_spec(args.chi)
    cache = CoefficientCache(args.cache_dir)
    if args.method == "auto":
        choice = choose_method(chi, args.k)
    else:
        choice = MethodChoice(args.method, "explicitly requested")
    if choice.method == "parity_zero":
        if args.json:
            print(json.dumps({"chi": args.chi, "k": args.k, "method": "parity_zero",
                              "value": {"type": "rational", "value": "0"}}))
        else:
            print(f"value=0 method=parity_zero k={args.k} chi={args.chi}")
        return 2 if args.strict else 0
    t0 = time.perf_counter()
    value = compute_value(chi, args.k, choice.method, cache)
    dt = (time.perf_counter() - t0) * 1000
    if args.json:
        print(json.dumps({
            "chi": args.chi, "k": args.k, "method": choice.method,
            "rationale": choice.rationale, "value": value_to_json(value),
            "time_ms": round(dt, 3),
        }))
    else:
        print(f"value={format_value(value)} method={choice.method} k={args.k} "
              f"chi={args.chi} time_ms={dt:.3f}")
    return 0


def _cmd_verify(args) -> int:
    chi = parse_character_spec(args.chi)
    cache = CoefficientCache(args.cache_dir)
    methods = args.methods.split(",") if args.methods else applicable_methods(chi, args.k)
    if len(methods) < 2:
        print("verify needs at least two applicable methods", file=sys.stderr)
        return 2
    results = []
    for m in methods:
        t0 = time.perf_counter()
        value = compute_value(chi, args.k, m, cache)
        dt = (time.perf_counter() - t0) * 1000
        results.append((m, value, dt))
        print(f"method={m} value={format_value(value)} time_ms={dt:.3f}")
    ref_m, ref_v, _ = results[0]
    for m, v, _ in results[1:]:
        same = (v == ref_v) if isinstance(v, Cyclotomic) or isinstance(ref_v, Cyclotomic) else mpq(v) == mpq(ref_v)
        if not same:
            print(f"MISMATCH: {ref_m}={format_value(ref_v)} vs {m}={format_value(v)}")
            return 3
    print(f"verify=ok methods={len(results)} value={format_value(ref_v)}")
    return 0


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def _cmd_precompute(args) -> int:
    cache = CoefficientCache(args.cache_dir)
    ks = _parse_range(args.k_range)
    levels = [int(x) for x in args.levels.split(",")] if args.levels else None
    es = [int(x) for x in args.e_list.split(",")] if args.e_list else [-1, 0, 1]
    count = 0
    if args.kind == "half_even":
        for k in ks:
            if k % 2:
                continue
            for N in levels or lvalues.EVEN_LEVELS:
                lvalues.half_even_coefficients(k, N, cache)
                count += 1
    elif args.kind == "half_odd":
        for k in ks:
            if k % 2 == 0:
                continue
            for N in levels or lvalues.ODD_LEVELS:
                for e in es:
                    try:
                        lvalues.odd_m_bound(k, N, e)
                    except InadmissiblePair:
                        if args.e_list:
                            raise
                        continue
                    lvalues.half_odd_coefficients(k, N, e, cache)
                    count += 1
    elif args.kind in ("siegel_even", "siegel_odd_level2"):
        level = 1 if args.kind == "siegel_even" else 2
        for k in ks:
            sc = modforms.siegel_coefficients(k, level)
            vcount = _validate_siegel(sc)
            coeffs = tuple(sc.c(-j) for j in range(sc.r + 1))
            cache.store(lvalues.CoefficientSet(args.kind, k, level, None, coeffs, vcount))
            count += 1
    else:
        print(f"unknown kind {args.kind}", file=sys.stderr)
        return 2
    print(f"precomputed={count} kind={args.kind} cache={args.cache_dir}")
    return 0


def _validate_siegel(sc) -> int:
    """Check sum_n a(n) c_{-n} = 0 on a panel of forms of the given weight."""
    n_max = sc.r + 1
    forms = []
    if sc.level == 1:
        e4 = modforms.eisenstein_level1(4, n_max)
        e6 = modforms.eisenstein_level1(6, n_max)
        for a in range(sc.weight // 4 + 1):
            rem = sc.weight - 4 * a
            if rem >= 0 and rem % 6 == 0:
                forms.append(e4.pow(a) * e6.pow(rem // 6))
    else:
        f2 = modforms.level_forms("F2_level2", n_max)
        f4 = modforms.level_forms("F4_level2", n_max)
        d4 = modforms.level_forms("Delta4_level2", n_max)
        for a in range(sc.weight // 2 + 1):
            for b in range((sc.weight - 2 * a) // 4 + 1):
                rem = sc.weight - 2 * a - 4 * b
                if rem % 4 == 0:
                    forms.append(f2.pow(a) * f4.pow(b) * d4.pow(rem // 4))
    rng = random.Random(sc.weight * 1000 + sc.level)
    while len(forms) < 10 and len(forms) >= 1:
        combo = forms[0].scale(0)
        for f in forms[: max(2, len(forms))]:
            combo = combo + f.scale(rng.randint(-9, 9))
        forms.append(combo)
    ok = 0
    for f in forms:
        total = sum(f.coefficient(n) * sc.c(-n) for n in range(sc.r + 1))
        if total != 0:
            raise ConjectureInconsistent(
                f"constant-term relation fails for a weight-{sc.weight} form"
            )
        ok += 1
    return ok


def _nearest_fundamental(x: int, negative: bool) -> int:
    gen = nt.fundamental_discriminants(negative=negative, start=x)
    return next(gen)


def _bench_cell(D, k, method, cache):
    chi_spec = f"D:{D}"
    chi = parse_character_spec(chi_spec)
    compute_value(chi, k, method, cache)  # warm caches and coefficient solves
    t0 = time.perf_counter()
    compute_value(chi, k, method, cache)
    return (time.perf_counter() - t0) * 1000


def _cmd_bench(args) -> int:
    cache = CoefficientCache(args.cache_dir)
    spec = dict(part.split("=", 1) for part in args.bench_grid.split(";"))
    ds = [int(float(x)) for x in spec.get("D", "100000").split(",")]
    ks = [int(x) for x in spec.get("k", "4").split(",")]
    methods = spec.get("methods", "half_integral").split(",")
    cells = []
    for k in ks:
        negative = k % 2 == 1
        for d in ds:
            D = _nearest_fundamental(abs(d), negative)
            for m in methods:
                cells.append((D, k, m))
    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        times = list(pool.map(lambda c: _bench_cell(c[0], c[1], c[2], cache), cells))
    rows = []
    for (D, k, m), t in zip(cells, times):
        rows.append({"D": D, "k": k, "method": m, "time_ms": round(t, 3)})
        print(f"D={D} k={k} method={m} time_ms={t:.3f}")
    for m in methods:
        for k in ks:
            pts = [(r["D"], r["time_ms"]) for r in rows if r["method"] == m and r["k"] == k]
            if len(pts) >= 2:
                xs = [math.log(abs(p[0])) for p in pts]
                ys = [math.log(max(p[1], 1e-6)) for p in pts]
                n = len(xs)
                sx, sy = sum(xs), sum(ys)
                sxx = sum(x * x for x in xs)
                sxy = sum(x * y for x, y in zip(xs, ys))
                slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
                print(f"fit method={m} k={k} exponent={slope:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lneg",
        description="Exact values of Dirichlet L-functions at negative integers.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cache-dir", default=default_cache_dir(),
                       help="coefficient cache directory (default: $LNEG_CACHE_DIR or ~/.cache/lneg)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--json", action="store_true", help="machine-readable output")

    pc = sub.add_parser("compute", help="compute one exact L(chi, 1-k)")
    pc.add_argument("--chi", required=True, help="character spec: D:<disc> or m:<F>:g:<...>:e:<...>")
    pc.add_argument("--k", type=int, required=True)
    pc.add_argument("--method", default="auto", choices=METHODS + ("auto",))
    pc.add_argument("--strict", action="store_true",
                    help="exit 2 when the value is 0 by the parity shortcut")
    common(pc)
    pc.set_defaults(fn=_cmd_compute)

    pv = sub.add_parser("verify", help="run several methods and require exact agreement")
    pv.add_argument("--chi", required=True)
    pv.add_argument("--k", type=int, required=True)
    pv.add_argument("--methods", default="", help="comma list; default: all applicable")
    common(pv)
    pv.set_defaults(fn=_cmd_verify)

    pp = sub.add_parser("precompute", help="populate the coefficient cache")
    pp.add_argument("--kind", required=True,
                    choices=("half_even", "half_odd", "siegel_even", "siegel_odd_level2"))
    pp.add_argument("--k-range", required=True, help="like 2..24 or 2,4,6")
    pp.add_argument("--levels", default="", help="comma list of auxiliary levels")
    pp.add_argument("--e-list", default="", help="comma list of 2-classes for half_odd")
    common(pp)
    pp.set_defaults(fn=_cmd_precompute)

    pb = sub.add_parser("bench", help="timing grid with fitted scaling exponents")
    pb.add_argument("--bench-grid", required=True,
                    help='like "D=1e6,1e7,1e8;k=4;methods=half_integral,bernoulli"')
    common(pb)
    pb.set_defaults(fn=_cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CharacterSpecError as exc:
        print(f"character spec error: {exc}", file=sys.stderr)
        return 2
    except (InadmissiblePair, KTooSmall) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ConjectureInconsistent as exc:
        print(f"conjecture inconsistency: {exc}", file=sys.stderr)
        return 4
    except LnegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
