"""Command-line surface.

Exit codes: 0 success (including a negative local verdict or a missed
bounded search), 1 certificate verification failure, 2 input or grammar
error, 3 search-bound exhaustion.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .certify import (
    build_witness,
    catalog,
    decode_certificate,
    encode_certificate,
    verify_certificate,
)
from .exact_arith import (
    GrammarError,
    InputError,
    SearchExhausted,
    format_elem,
    parse_elem,
)
from .hilbert import QuatPresentation, hilbert_symbol, ramification_set
from .places import format_place, parse_place
from .quadforms import DiagForm, global_search, local_represents

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_EXHAUSTED = 3


def _parse_sigma(text: str):
    return [parse_place(part) for part in text.split(",") if part]


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="quatcert",
        description="Build and verify certified quaternion-algebra norm "
                    "witnesses over Q(i) and F_q(t).")
    sub = top.add_subparsers(dest="command", required=True)

    w = sub.add_parser("witness", help="certificate operations")
    wsub = w.add_subparsers(dest="witness_command", required=True)

    wb = wsub.add_parser("build", help="construct a certificate")
    wb.add_argument("--field", default="gaussian",
                    help="gaussian or fq:<q> (q a prime power, 1 mod 4)")
    wb.add_argument("--sigma", default=None,
                    help="comma-separated places (default 2+i,2-i over Q(i))")
    wb.add_argument("--n", type=int, default=3)
    wb.add_argument("--bound", type=int, default=100)
    wb.add_argument("--out", required=True)

    wv = wsub.add_parser("verify", help="verify a certificate file")
    wv.add_argument("file")

    wc = wsub.add_parser("catalog", help="one certificate per n")
    wc.add_argument("--n", required=True,
                    help="comma-separated odd integers >= 3")
    wc.add_argument("--field", default="gaussian")
    wc.add_argument("--sigma", default=None)
    wc.add_argument("--bound", type=int, default=100)
    wc.add_argument("--out-dir", required=True)

    h = sub.add_parser("hilbert", help="Hilbert symbol at a place")
    h.add_argument("--a", required=True)
    h.add_argument("--b", required=True)
    h.add_argument("--place", required=True)

    r = sub.add_parser("ramify", help="ramification set of (a,b)")
    r.add_argument("--a", required=True)
    r.add_argument("--b", required=True)

    rep = sub.add_parser("represents",
                         help="local or bounded global representability")
    rep.add_argument("--form", required=True,
                     help="comma-separated coefficients c1,c2,c3[,c4]")
    rep.add_argument("--d", required=True)
    rep.add_argument("--place")
    rep.add_argument("--global", dest="global_search", action="store_true")
    rep.add_argument("--bound", type=int, default=10)
    return top


def _default_sigma(field: str):
    if field == "gaussian":
        return [parse_place("2+i"), parse_place("2-i")]
    raise InputError("--sigma is required for the function-field backend")


def _cmd_witness(args) -> int:
    if args.witness_command == "build":
        sigma = (_parse_sigma(args.sigma) if args.sigma
                 else _default_sigma(args.field))
        cert = build_witness(args.field, sigma, args.n, args.bound)
        Path(args.out).write_text(encode_certificate(cert), encoding="utf-8")
        print(f"certificate written to {args.out}: "
              f"Q = {cert.presentation}, d = {cert.d}, "
              f"trdeg bound {cert.group.trdeg_bound}")
        return EXIT_OK
    if args.witness_command == "verify":
        cert = decode_certificate(Path(args.file).read_text(encoding="utf-8"))
        report = verify_certificate(cert)
        for line in report.lines():
            print(line)
        return EXIT_OK if report.passed else EXIT_VERIFY_FAILED
    if args.witness_command == "catalog":
        n_list = [int(part) for part in args.n.split(",") if part]
        sigma = (_parse_sigma(args.sigma) if args.sigma
                 else _default_sigma(args.field))
        certs = catalog(n_list, args.field, sigma, args.bound)
        outdir = Path(args.out_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        for cert in certs:
            path = outdir / f"witness_n{cert.group.n}.json"
            path.write_text(encode_certificate(cert), encoding="utf-8")
            print(f"n = {cert.group.n}: trdeg bound "
                  f"{cert.group.trdeg_bound} -> {path}")
        return EXIT_OK
    raise AssertionError("unreachable")


def _cmd_hilbert(args) -> int:
    a, b = parse_elem(args.a), parse_elem(args.b)
    v = parse_place(args.place)
    value = hilbert_symbol(a, b, v)
    print("+1" if value == 1 else "-1")
    return EXIT_OK


def _cmd_ramify(args) -> int:
    p = QuatPresentation(parse_elem(args.a), parse_elem(args.b))
    ram = ramification_set(p)
    print(", ".join(format_place(v) for v in ram) if len(ram) else "(empty)")
    return EXIT_OK


def _cmd_represents(args) -> int:
    coeffs = [parse_elem(part) for part in args.form.split(",") if part]
    form = DiagForm.of(*coeffs)
    d = parse_elem(args.d)
    if args.global_search:
        vector = global_search(form, d, args.bound)
        if vector is None:
            print(f"no solution with heights <= {args.bound} "
                  "(not a proof of non-representability)")
        else:
            print("(" + ", ".join(format_elem(x) for x in vector) + ")")
        return EXIT_OK
    if not args.place:
        raise InputError("pass --place for a local verdict or --global "
                         "for a bounded search")
    v = parse_place(args.place)
    solv = local_represents(form, d, v)
    if solv.verdict:
        w = solv.evidence
        vec = ", ".join(format_elem(x) for x in w.vector)
        print(f"true: ({vec}) solves the congruence mod pi^{w.precision} "
              f"with scaling exponent {w.scaling_exp}")
    else:
        facts = solv.evidence
        print("false: discriminant is a local square and the Hasse product "
              f"is {facts['hasse_product']}")
    return EXIT_OK


_VALUE_OPTIONS = {"--a", "--b", "--d", "--form", "--place", "--sigma",
                  "--field", "--n", "--bound", "--out", "--out-dir"}


def _fuse_option_values(argv):
    """Join '--form -2,-5,10' into '--form=-2,-5,10' so that argparse does
    not mistake a leading minus in the value for an option."""
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in _VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = _build_parser().parse_args(_fuse_option_values(list(argv)))
    try:
        if args.command == "witness":
            return _cmd_witness(args)
        if args.command == "hilbert":
            return _cmd_hilbert(args)
        if args.command == "ramify":
            return _cmd_ramify(args)
        if args.command == "represents":
            return _cmd_represents(args)
        raise AssertionError("unreachable")
    except (GrammarError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SearchExhausted as exc:
        print(f"search exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
