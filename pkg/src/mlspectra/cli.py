"""Command-line front end: ``mlspectra <command> ...``.

Exit codes: 0 success, 2 bad input, 3 infeasible prescription or numeric
failure, 4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import campaign, construct, feasibility, horn, spectra
from .simplex import LPInfeasible
from .tensor import TensorFormatError, load_tensor, tensor_to_json

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_INTERNAL = 0, 2, 3, 4


class InputError(Exception):
    pass


class Infeasible(Exception):
    def __init__(self, payload):
        super().__init__("infeasible")
        self.payload = payload


def _read_json(path: str):
    try:
        with (sys.stdin if path == "-" else open(path)) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _read_prescription(path: str) -> feasibility.Prescription:
    obj = _read_json(path)
    try:
        return feasibility.Prescription.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad prescription: {exc}") from exc


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_mlsvd(args):
    try:
        T = load_tensor(args.path)
    except OSError as exc:
        raise InputError(str(exc)) from exc
    res = spectra.mlsvd(T)
    if args.format == "csv":
        rows = [(n, k, v) for n, vals in enumerate(res.spectrum.values, 1) for k, v in enumerate(vals, 1)]
        return _csv(rows, ["mode", "index", "value"])
    return {
        "dims": list(T.shape),
        "norm": res.spectrum.frobenius_norm,
        "spectra": res.spectrum.to_json(),
        "factors": [tensor_to_json(U) for U in res.factors],
        "core": tensor_to_json(res.core),
    }


def cmd_check(args):
    p = _read_prescription(args.path)
    rep = feasibility.assess(p, args.tol)
    if args.format == "csv":
        out = _csv([(r.name, r.kind, r.lhs, r.rhs, r.slack) for r in rep.records],
                   ["name", "kind", "lhs", "rhs", "slack"])
    else:
        out = rep.to_json()
    if rep.verdict in (feasibility.Verdict.NECESSARY_VIOLATED, feasibility.Verdict.SPECIAL_RULE_INFEASIBLE):
        raise Infeasible(out)
    return out


def cmd_construct(args):
    p = _read_prescription(args.path)
    rep = feasibility.assess(p, args.tol)
    if rep.verdict is not feasibility.Verdict.SUFFICIENT_PROVEN:
        raise Infeasible({"error": "no construction for this prescription", "report": rep.to_json()})
    if p.order == 3:
        T = construct.construct_3(p.sigmas, p.dims, p.norm)
    else:
        T = construct.construct_N(p.sigmas, p.order, p.dims[0], p.norm)
    realized = spectra.largest_ml_singular_values(T)
    ortho = spectra.is_all_orthogonal(T)
    if args.format == "csv":
        rows = [(np.unravel_index(i, T.shape, order="F"), z.real) for i, z in enumerate(T.reshape(-1, order="F"))]
        return _csv([(*(k + 1 for k in idx), v) for idx, v in rows],
                    [f"i{n}" for n in range(1, T.ndim + 1)] + ["value"])
    return {
        "tensor": tensor_to_json(T),
        "verification": {
            "realized_sigmas": realized.tolist(),
            "all_orthogonal": bool(ortho),
            "norm": float(np.linalg.norm(T)),
        },
    }


def cmd_horn(args):
    if args.triples:
        r, n = args.triples
        try:
            ts = horn.generate_T(r, n, args.subcondition)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        out = {"r": r, "n": n, "subcondition": args.subcondition, "triples": [t.to_json() for t in ts]}
        if args.format == "csv":
            return _csv([(" ".join(map(str, t.I)), " ".join(map(str, t.J)), " ".join(map(str, t.K))) for t in ts],
                        ["I", "J", "K"])
        div = horn.subcondition_divergence(r, n)
        if div.differs:
            out["subcondition_divergence"] = {
                "only_leq": [t.to_json() for t in div.only_leq],
                "only_eq": [t.to_json() for t in div.only_eq],
            }
        return out
    if args.check:
        obj = _read_json(args.check)
        try:
            res = horn.check_horn(obj["alpha"], obj["beta"], obj["gamma"], rel_tol=args.tol,
                                  subcondition=args.subcondition)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad Horn input: {exc}") from exc
        if not res.feasible:
            raise Infeasible(res.to_json())
        return res.to_json()
    if args.equality_spectra:
        obj = _read_json(args.equality_spectra)
        try:
            res = horn.check_thm7_spectra(obj["sigmas"], obj["dims"], obj.get("norm", 1.0), rel_tol=args.tol)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad spectra input: {exc}") from exc
        if not res.feasible:
            raise Infeasible(res.to_json())
        return res.to_json()
    raise InputError("horn needs one of --triples, --check, --equality-spectra")


def cmd_vertices(args):
    try:
        v = feasibility.polytope_vertices(sorted(args.dims), args.norm)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return v.to_json() if args.format == "json" else v.to_csv()


def _parse_shape(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in s.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad shape {s!r}, expected e.g. 2x3x4") from exc


def cmd_verify(args):
    inject = ()
    if args.inject:
        obj = _read_json(args.inject)
        inject = tuple(obj if isinstance(obj, list) else [obj])
    try:
        cfg = campaign.VerifyConfig(
            shapes=tuple(args.shapes),
            trials=args.trials,
            seed=args.seed,
            distribution=args.distribution,
            tol=args.tol,
            workers=args.workers,
            inject=inject,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rep = campaign.run_campaign(cfg)
    if args.format == "csv":
        rows = [(k, rep.passes[k], rep.totals[k], rep.min_slack[k]) for k in sorted(rep.totals)]
        return _csv(rows, ["check", "passed", "total", "min_slack"])
    return rep.to_json(include_clock=not args.no_clock)


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    # accepted before or after the subcommand; the subcommand copy only
    # overrides when given explicitly
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--tol", type=float, default=d(1e-9), help="relative slack tolerance")
    p.add_argument("--out", default=d(None), help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=d(None),
                   help="output format (default: csv for vertices, json otherwise)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mlspectra", description=__doc__.splitlines()[0])
    _add_globals(ap, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mlsvd", parents=[common], help="full MLSVD of a tensor file")
    p.add_argument("path")
    p.set_defaults(func=cmd_mlsvd)

    p = sub.add_parser("check", parents=[common], help="feasibility verdict for a prescription")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", parents=[common], help="build a tensor realising a prescription")
    p.add_argument("path")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("horn", parents=[common], help="Horn triple sets and spectrum checks")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--triples", nargs=2, type=int, metavar=("R", "N"))
    g.add_argument("--check", metavar="PATH", help='JSON {"alpha", "beta", "gamma"}')
    g.add_argument("--equality-spectra", metavar="PATH", help='JSON {"dims", "norm", "sigmas": [s1, s2, s3]}')
    p.add_argument("--subcondition", choices=horn.SUBCONDITIONS, default="leq")
    p.set_defaults(func=cmd_horn)

    p = sub.add_parser("vertices", parents=[common], help="corner points of the third-order polytopes")
    p.add_argument("--dims", nargs=3, type=int, required=True)
    p.add_argument("--norm", type=float, default=1.0)
    p.set_defaults(func=cmd_vertices)

    p = sub.add_parser("verify", parents=[common], help="randomised campaign over the necessary inequalities")
    p.add_argument("--shapes", nargs="+", type=_parse_shape, default=[(2, 2, 2)])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--distribution", choices=campaign.DISTRIBUTIONS, default="complex-gaussian")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--inject", metavar="PATH", help="prescription(s) expected to be flagged")
    p.add_argument("--no-clock", action="store_true", help="omit wall-clock time for byte-stable output")
    p.set_defaults(func=cmd_verify)
    return ap


def _emit(out, args) -> None:
    text = out if isinstance(out, str) else json.dumps(out, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "vertices" else "json"
    try:
        _emit(args.func(args), args)
        return EXIT_OK
    except Infeasible as exc:
        _emit(exc.payload, args)
        return EXIT_INFEASIBLE
    except (InputError, TensorFormatError) as exc:
        print(f"mlspectra: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (construct.InfeasiblePrescription, LPInfeasible, spectra.EigenSolverError) as exc:
        print(f"mlspectra: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Exception as exc:  # pragma: no cover - last resort
        print(f"mlspectra: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
