"""Command-line front end.

One JSON input schema serves every subcommand:

    {"p": "3", "f": "1", "modulus": ["0", "1"], "precision": "8",
     "matrix": [["1", "0"], ["0", "3"]], "linear": ["0", "0"], "constant": "0"}

All numbers are decimal strings (arbitrary precision); for f >= 2 an entry may
be a list of f coefficient strings, low degree first.  Exit codes: 0 success,
1 domain error (machine-readable JSON on stdout), 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .fields import FieldDesc, pick_nonsquare, pick_xi
from .genfun import assemble_gf, modular_gf
from .oracle import verify_series
from .quadform import (
    PrecisionError,
    QuadPoly,
    UnsupportedReduction,
    classify_unimodular,
    reduce_standard,
)
from .ratfunc import poincare_from_zeta
from .zeta import reduced_denominator_odd, zeta_of_jordan

__all__ = ["main", "run"]

DEFAULT_PRECISION = 10
MAX_SERIES = 64


def _canon_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _parse_entry(raw, f: int):
    if isinstance(raw, list):
        return [int(str(x)) for x in raw]
    return int(str(raw))


def _load_quadpoly(payload: dict) -> tuple[FieldDesc, QuadPoly, int]:
    p = int(str(payload["p"]))
    f = int(str(payload.get("f", 1)))
    modulus = None
    if "modulus" in payload and payload["modulus"]:
        modulus = [int(str(x)) for x in payload["modulus"]]
    field = FieldDesc.make(p, f, modulus)
    precision = int(str(payload.get("precision", DEFAULT_PRECISION)))
    matrix = [[_parse_entry(v, f) for v in row] for row in payload.get("matrix", [])]
    linear = [_parse_entry(v, f) for v in payload.get("linear", [])]
    constant = _parse_entry(payload.get("constant", 0), f)
    qp = QuadPoly.from_ints(field, precision, matrix, linear, constant)
    return field, qp, precision


def _series_strings(values) -> list[str]:
    return [str(v) for v in values]


def _choices_metadata(field: FieldDesc) -> dict:
    out = {}
    if field.p == 2:
        out["xi"] = [str(c) for c in pick_xi(field, 3).coeffs]
    else:
        out["nonsquare"] = [str(c) for c in pick_nonsquare(field, 1).coeffs]
    return out


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="padiczeta",
        description="Exact Igusa local zeta functions of quadratic polynomials "
                    "over unramified p-adic rings.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("classify", "table shape of a unimodular quadratic form"),
        ("reduce", "standard form of a quadratic polynomial"),
        ("zeta", "closed-form Igusa local zeta function"),
        ("poles", "reduced denominator / pole data"),
        ("poincare", "Poincare series of the polynomial"),
        ("gf", "generating-function data"),
        ("verify", "closed form against the counting oracle"),
    ]:
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--input", help="path to the JSON input")
        sp.add_argument("--inline", help="inline JSON input")
        sp.add_argument("--format", choices=["text", "json"], default="text")
        sp.add_argument("--K", type=int, default=0,
                        help="series prefix length to print / compare (<= 64)")
        sp.add_argument("--precision", type=int, default=None,
                        help="override the input's working precision")
        sp.add_argument("--modular-level", type=int, default=0,
                        help="gf: also print the level-k histogram")
    args = parser.parse_args(argv)

    try:
        if args.input:
            with open(args.input, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        elif args.inline:
            payload = json.loads(args.inline)
        else:
            raise ValueError("one of --input or --inline is required")
        if args.precision is not None:
            payload = dict(payload)
            payload["precision"] = str(args.precision)
        if not (0 <= args.K <= MAX_SERIES):
            raise ValueError(f"series length must be between 0 and {MAX_SERIES}")
        return _dispatch(args, payload)
    except BrokenPipeError:  # pragma: no cover
        return 1
    except (ValueError, KeyError, OSError, UnsupportedReduction, PrecisionError,
            ZeroDivisionError, json.JSONDecodeError) as exc:
        print(_canon_json({"error": str(exc)}))
        return 1


def _dispatch(args, payload: dict) -> int:
    field, qp, precision = _load_quadpoly(payload)
    cmd = args.command

    if cmd == "classify":
        cls = classify_unimodular(field, qp.M)
        doc = {"class": cls.render(),
               "rank": str(cls.rank),
               "norm": cls.norm_code(),
               "disc": [str(c) for c in cls.disc_tuple()]}
        print(_canon_json(doc) if args.format == "json" else cls.render())
        return 0

    if cmd == "reduce":
        jf = reduce_standard(qp)
        doc = {"standard_form": jf.render(),
               "lambda": "inf" if jf.lam is None else str(jf.lam),
               "blocks": [[str(i), q.render()] for i, q in jf.blocks],
               "audit": list(jf.audit)}
        print(_canon_json(doc) if args.format == "json" else
              "\n".join([jf.render()] + [f"  - {a}" for a in jf.audit]))
        return 0

    jf = reduce_standard(qp)

    if cmd == "zeta":
        res = zeta_of_jordan(jf)
        doc = {"zeta": res.zf.to_json(),
               "zeta_text": res.zf.render(),
               "dispatch": res.metadata.get("dispatch", ""),
               "denominator_shape": res.shape.render(),
               "standard_form": jf.render(),
               "choices": _choices_metadata(field)}
        if args.K:
            doc["series"] = _series_strings(res.zf.series_prefix(args.K))
        if args.format == "json":
            print(_canon_json(doc))
        else:
            print(res.zf.render())
            print(f"dispatch: {doc['dispatch']}")
            print(f"denominator: {doc['denominator_shape']}")
            if args.K:
                print("series: " + " ".join(doc["series"]))
        return 0

    if cmd == "poles":
        res = zeta_of_jordan(jf)
        doc = {"denominator_shape": res.shape.render(),
               "reduced_denominator": res.zf.to_json()["denominator"]}
        if field.p != 2 and jf.lam is None and (jf.c is None or jf.c.is_zero()):
            g = reduced_denominator_odd(jf)
            doc["classified_denominator"] = [[str(c.numerator), str(c.denominator)]
                                             for c in g.coeffs]
        print(_canon_json(doc) if args.format == "json" else doc["denominator_shape"])
        return 0

    if cmd == "poincare":
        res = zeta_of_jordan(jf)
        pf = poincare_from_zeta(res.zf)
        doc = {"poincare": pf.to_json(), "poincare_text": pf.render()}
        if args.K:
            doc["series"] = _series_strings(pf.series_prefix(args.K))
        if args.format == "json":
            print(_canon_json(doc))
        else:
            print(pf.render())
            if args.K:
                print("series: " + " ".join(doc["series"]))
        return 0

    if cmd == "gf":
        level = args.K or 4
        ag = assemble_gf(jf, level)
        lines = ag.comb.render().split("  +  ")
        doc = {"valid_level": str(ag.valid_level), "terms": lines}
        if args.modular_level:
            gfk = modular_gf(jf.standard_poly(max(precision, args.modular_level)),
                             args.modular_level)
            doc["modular"] = gfk.render().split("\n")
        if args.format == "json":
            print(_canon_json(doc))
        else:
            print("\n".join(lines))
            if args.modular_level:
                print("-- level", args.modular_level)
                print("\n".join(doc["modular"]))
        return 0

    if cmd == "verify":
        K = args.K or 8
        res = zeta_of_jordan(jf)
        report = verify_series(qp, res.zf, K)
        report["first_mismatch"] = (None if report["first_mismatch"] is None
                                    else str(report["first_mismatch"]))
        print(_canon_json(report))
        return 0 if report["status"] == "PASS" else 2

    raise ValueError(f"unknown command {cmd}")  # pragma: no cover


def main() -> None:  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
