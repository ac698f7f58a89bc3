"""Command-line surface: build/verify row-sum matrices, factorize them,
solve HWP instances, verify certificates, and search ingredient
factorizations.

Exit codes: 0 verified, 1 verification failed, 2 known exception or
unsupported case, 3 invalid parameters, 4 ingredient unavailable.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from pathlib import Path

from . import factor, hwp, rsm
from .groups import parse_group
from .rsm import RsmSpec, UnsupportedRsmCase

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_KNOWN_EXCEPTION = 2
EXIT_INVALID_PARAMS = 3
EXIT_INGREDIENT = 4


def _dump(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _parse_orders(text: str) -> Counter:
    """Order-list text like '[^7 1, ^1 2]' -> Counter{order: count}."""
    body = text.strip()
    if body.startswith("["):
        body = body[1:-1]
    out: Counter = Counter()
    for part in body.split(","):
        part = part.strip()
        if not part:
            continue
        if part.startswith("^"):
            mult, value = part[1:].split()
            out[int(value)] += int(mult)
        else:
            out[int(part)] += 1
    return out


def _cmd_rsm_build(args) -> int:
    group = parse_group(args.group)
    try:
        if group.is_dihedral:
            spec = RsmSpec(group.k, group.m, group.n, args.g, args.alpha, args.beta)
            M = rsm.build_dihedral_rsm(spec, seed=args.seed)
        else:
            print("rsm build drives the dihedral construction; "
                  "use a dihedral:m=..,n=..,k=.. group", file=sys.stderr)
            return EXIT_INVALID_PARAMS
    except UnsupportedRsmCase as exc:
        print(f"unsupported: {exc.case}", file=sys.stderr)
        return EXIT_KNOWN_EXCEPTION
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID_PARAMS
    _dump(rsm.rsm_to_json(M), args.output)
    orders = rsm.row_sum_orders(M)
    print(f"rsm {M.group.descriptor()} g={M.g} rows={len(M.rows)} "
          f"orders={dict(sorted(orders.items()))}", file=sys.stderr)
    return EXIT_OK


def _cmd_rsm_verify(args) -> int:
    doc = json.loads(Path(args.file).read_text())
    M = rsm.rsm_from_json(doc)
    expected = _parse_orders(args.orders) if args.orders else rsm.row_sum_orders(M)
    chk = rsm.verify_rsm(M, expected)
    print("verified" if chk else f"FAILED: {chk.reason}", file=sys.stderr)
    return EXIT_OK if chk else EXIT_VERIFY_FAILED


def _cmd_factorize(args) -> int:
    doc = json.loads(Path(args.rsm).read_text())
    M = rsm.rsm_from_json(doc)
    tf = factor.rsm_to_factorization(M)
    _dump(factor.factorization_to_json(tf, include_labels=not args.no_labels),
          args.output)
    print(f"factors={len(tf.factors)} profile={dict(sorted(tf.profile().items()))}",
          file=sys.stderr)
    return EXIT_OK


def _cmd_solve(args) -> int:
    try:
        inst = hwp.make_instance(args.v, args.M, args.N, args.alpha, args.beta)
    except hwp.HwpParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID_PARAMS
    t0 = time.perf_counter()
    try:
        cert = hwp.solve_hwp(inst, seed=args.seed, ingredients_dir=args.ingredients)
    except hwp.HwpParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID_PARAMS
    except hwp.HwpKnownException as exc:
        print(f"known exception: {exc.case}", file=sys.stderr)
        return EXIT_KNOWN_EXCEPTION
    except hwp.IngredientUnavailable as exc:
        print(f"ingredient unavailable: {exc}", file=sys.stderr)
        return EXIT_INGREDIENT
    doc = hwp.certificate_to_json(cert)
    _dump(doc, args.output)
    # re-read and re-verify what was written before declaring success
    reread = hwp.certificate_from_json(
        json.loads(Path(args.output).read_text()) if args.output else doc)
    chk = hwp.verify_hwp_certificate(reread)
    dt = time.perf_counter() - t0
    profile = Counter(f.cycle_length for f in cert.factors)
    print(f"HWP({args.v}; {args.M}, {args.N}; {args.alpha}, {args.beta}) "
          f"factors={dict(sorted(profile.items()))} "
          f"one_factor={'yes' if cert.one_factor else 'no'} "
          f"verified={'yes' if chk else 'NO'} time={dt:.2f}s", file=sys.stderr)
    return EXIT_OK if chk else EXIT_VERIFY_FAILED


def _cmd_verify(args) -> int:
    doc = json.loads(Path(args.file).read_text())
    kind = doc.get("kind")
    if kind == "hwp-certificate":
        chk = hwp.verify_hwp_certificate(hwp.certificate_from_json(doc))
    elif kind == "factorization":
        tf = factor.factorization_from_json(doc)
        chk = factor.verify_factorization(tf.graph, tf)
    elif kind == "rsm":
        M = rsm.rsm_from_json(doc)
        chk = rsm.verify_rsm(M, rsm.row_sum_orders(M))
    else:
        print(f"unknown document kind {kind!r}", file=sys.stderr)
        return EXIT_INVALID_PARAMS
    print("verified" if chk else f"FAILED: {chk.reason}", file=sys.stderr)
    return EXIT_OK if chk else EXIT_VERIFY_FAILED


def _cmd_ingredients_search(args) -> int:
    try:
        if args.type == "uniform":
            tf = hwp.provide_uniform_factorization(args.v, args.c, seed=args.seed,
                                                   budget=args.budget)
            name = f"uniform_v{args.v}_c{args.c}.json"
        else:
            tf = hwp.provide_equipartite_factorization(args.t, args.z, args.c,
                                                       seed=args.seed,
                                                       budget=args.budget)
            name = f"equipartite_t{args.t}_z{args.z}_c{args.c}.json"
    except hwp.IngredientNonexistent as exc:
        print(f"nonexistent: {exc}", file=sys.stderr)
        return EXIT_KNOWN_EXCEPTION
    except hwp.IngredientNotFound as exc:
        print(f"not found within budget: {exc}", file=sys.stderr)
        return EXIT_INGREDIENT
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INVALID_PARAMS
    out = Path(args.output) if args.output else Path(name)
    if out.is_dir():
        out = out / name
    _dump(factor.factorization_to_json(tf, include_labels=False), str(out))
    print(f"wrote {out} ({len(tf.factors)} factors)", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hwpkit",
                                 description="Row-sum matrices and certified "
                                             "Hamilton-Waterloo 2-factorizations")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--jobs", type=int, default=1,
                        help="worker count for verification passes (best effort)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    p = add("rsm-build", help="build a dihedral row-sum matrix")
    p.add_argument("--group", required=True, help="dihedral:m=3,n=1,k=1")
    p.add_argument("-g", type=int, default=3)
    p.add_argument("--alpha", "-a", type=int, required=True)
    p.add_argument("--beta", "-b", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_rsm_build)

    p = add("rsm-verify", help="verify a row-sum matrix file")
    p.add_argument("file")
    p.add_argument("--orders", help='target order list, e.g. "[^7 1, ^1 2]"')
    p.set_defaults(func=_cmd_rsm_verify)

    p = add("factorize", help="convert an RSM into a 2-factorization")
    p.add_argument("--rsm", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--no-labels", action="store_true")
    p.set_defaults(func=_cmd_factorize)

    p = add("solve", help="solve an HWP(v; M, N; alpha, beta) instance")
    p.add_argument("-v", type=int, required=True)
    p.add_argument("-M", type=int, required=True)
    p.add_argument("-N", type=int, required=True)
    p.add_argument("-a", "--alpha", type=int, required=True)
    p.add_argument("-b", "--beta", type=int, required=True)
    p.add_argument("--ingredients", help="certificate directory "
                                         f"(also ${hwp.INGREDIENTS_ENV})")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_solve)

    p = add("verify", help="verify a certificate (any kind)")
    p.add_argument("file")
    p.set_defaults(func=_cmd_verify)

    p = add("ingredients-search",
            help="search/construct a classical ingredient factorization")
    p.add_argument("--type", choices=("uniform", "equipartite"), required=True)
    p.add_argument("--v", type=int, help="order (uniform)")
    p.add_argument("--t", type=int, help="part count (equipartite)")
    p.add_argument("--z", type=int, help="part size (equipartite)")
    p.add_argument("--c", type=int, required=True, help="cycle length")
    p.add_argument("--budget", type=int, default=400_000)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_ingredients_search)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID_PARAMS if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_PARAMS


def main() -> None:
    sys.exit(run())
