"""Command line front end.

Subcommands map one-to-one onto the analysis layer: ``analyze`` one
(parameter set, cycle type) pair, ``scan`` all or sampled cycle types,
``cyclic`` the uniform types, ``ads`` the almost-difference-set sweeps,
``verify`` an explicit block list, ``table`` the built-in survey
reports, and ``sample`` the uniform cycle-type sampler.  Exit code 0
means the computation completed (whatever the verdict), 2 means the
parameters were invalid.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analysis
from .cycletypes import count_feasible, parse_cycle_type, sample_feasible
from .rules import run_all

PROG = "symcover"


class _InvalidParameters(Exception):
    pass


def _params_or_fail(k: int, lambda_: int):
    params = analysis.params_for(k, lambda_)
    if params is None:
        raise _InvalidParameters(
            f"no valid parameter set for k={k}, lambda={lambda_} "
            "(need lambda | k(k-1)-2 and lambda + 2 < k < v)"
        )
    return params


def _emit(payload: dict, as_json: bool, text: str) -> None:
    if as_json:
        json.dump(payload, sys.stdout, indent=2)
        print()
    else:
        print(text)


def _cert_text(cert) -> str:
    where = "" if cert.place is None else f" at p={cert.place}"
    sign = "" if cert.sign is None else f" (C_p = {cert.sign:+d})"
    return f"{cert.rule}{where}{sign}"


def _verdict_text(vd) -> str:
    lines = [
        f"(v,k,lambda) = ({vd.params.v},{vd.params.k},{vd.params.lambda_}), "
        f"cycle type [{vd.ct}]: {vd.status}"
    ]
    for cert in vd.certificates:
        lines.append(f"  - {_cert_text(cert)}")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    params = _params_or_fail(args.k, args.lambda_)
    if args.cycle_type is None:
        payload = {
            "params": {"v": params.v, "k": params.k, "lambda": params.lambda_},
            "a": params.a,
            "cycle_types": count_feasible(params.v),
        }
        _emit(
            payload,
            args.json,
            f"(v,k,lambda) = ({params.v},{params.k},{params.lambda_}), "
            f"a = k-lambda = {params.a}, "
            f"{payload['cycle_types']} feasible cycle types",
        )
        return 0
    ct = parse_cycle_type(args.cycle_type)
    if ct.v != params.v:
        print(f"cycle type sums to {ct.v}, expected v={params.v}", file=sys.stderr)
        return 2
    vd = run_all(params, ct, args.prime_bound)
    _emit(vd.to_json(), args.json, _verdict_text(vd))
    return 0


def cmd_scan(args) -> int:
    params = _params_or_fail(args.k, args.lambda_)
    if args.sample is not None and args.seed is None:
        print("--sample requires --seed for reproducibility", file=sys.stderr)
        return 2
    report = analysis.scan(
        params,
        prime_bound=args.prime_bound,
        sample=args.sample,
        seed=args.seed,
        checkpoint=args.checkpoint,
    )
    totals = report.totals
    text = (
        f"(v,k,lambda) = ({params.v},{params.k},{params.lambda_}): "
        f"{totals['types']} types, {totals['brc']} ruled by counting, "
        f"{totals['hasse']} ruled by invariants (p < {args.prime_bound}), "
        f"{totals['open']} open"
    )
    _emit(report.to_json(), args.json, text)
    return 0


def cmd_cyclic(args) -> int:
    params = _params_or_fail(args.k, args.lambda_)
    report = analysis.cyclic_scan(params, args.prime_bound)
    lines = [
        f"(v,k,lambda) = ({params.v},{params.k},{params.lambda_}): "
        + ("no cyclic covering exists" if report.all_ruled else "cyclic covering not ruled out")
    ]
    for vd in report.verdicts:
        lines.append(f"  [{vd.ct}]: {vd.status}"
                     + (f" via {', '.join(_cert_text(c) for c in vd.certificates)}"
                        if vd.certificates else ""))
    _emit(report.to_json(), args.json, "\n".join(lines))
    return 0


def cmd_ads(args) -> int:
    ruled = analysis.ads_scan(
        args.v_max, prime_bound=args.prime_bound, hamilton_only=args.hamilton_only
    )
    kind = "hamilton-only" if args.hamilton_only else "nonexistent"
    payload = {"v_max": args.v_max, "prime_bound": args.prime_bound,
               "mode": kind, "values": ruled}
    _emit(payload, args.json, f"{kind} v < {args.v_max}: {', '.join(map(str, ruled))}")
    return 0


def cmd_verify(args) -> int:
    try:
        instance = analysis.CoveringInstance.from_file(args.file)
    except (OSError, ValueError) as exc:
        print(f"cannot read covering: {exc}", file=sys.stderr)
        return 2
    try:
        ct = analysis.verify_covering(instance)
    except (analysis.NotACovering, analysis.ExcessNotTwoRegular) as exc:
        _emit(
            {"valid": False, "reason": str(exc)},
            args.json,
            f"NOT a valid symmetric covering: {exc}",
        )
        return 0
    vd = run_all(instance.params, ct, args.prime_bound)
    payload = {"valid": True, "excess_cycle_type": str(ct), "soundness": vd.to_json()}
    text = (
        f"valid symmetric ({instance.params.v},{instance.params.k},"
        f"{instance.params.lambda_})-covering with excess [{ct}]\n"
        f"soundness: rules report {vd.status}"
    )
    _emit(payload, args.json, text)
    return 0


def cmd_table(args) -> int:
    report = analysis.reproduce_table(
        args.id,
        prime_bound=args.prime_bound,
        v_max=args.v_max,
        seed=args.seed,
        extended=args.extended,
    )
    if args.json:
        json.dump(report, sys.stdout, indent=2)
        print()
        return 0
    rows = report["rows"]
    if not rows:
        print("(no rows)")
        return 0
    cols = list(rows[0].keys())
    widths = [max(len(str(r.get(c, ""))) for r in rows + [dict(zip(cols, cols))]) for c in cols]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    for r in rows:
        print("  ".join(str(r.get(c, "")).ljust(w) for c, w in zip(cols, widths)))
    return 0


def cmd_sample(args) -> int:
    types = sample_feasible(args.v, args.count, args.seed)
    payload = {"v": args.v, "count": args.count, "seed": args.seed,
               "cycle_types": [str(ct) for ct in types]}
    _emit(payload, args.json, "\n".join(str(ct) for ct in types))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Nonexistence tests for symmetric pair coverings with "
        "2-regular excess, via exact local invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, k_lambda=True, bound_default=1000):
        if k_lambda:
            p.add_argument("--k", type=int, required=True, help="block size")
            p.add_argument("--lambda", dest="lambda_", type=int, required=True,
                           help="covering index")
        p.add_argument("--prime-bound", type=int, default=bound_default,
                       help=f"scan primes below this bound (default {bound_default})")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("analyze", help="verdict for one cycle type (or a summary)")
    add_common(p)
    p.add_argument("--cycle-type", help="cycle type text, e.g. '2^2,7' or '[11]'")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("scan", help="run the rules over all or sampled cycle types")
    add_common(p)
    p.add_argument("--sample", type=int, help="sample this many distinct cycle types")
    p.add_argument("--seed", type=int, help="sampling seed (required with --sample)")
    p.add_argument("--checkpoint", help="resumable progress file for long scans")
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("cyclic", help="rule out cyclic coverings (uniform cycle types)")
    add_common(p)
    p.set_defaults(fn=cmd_cyclic)

    p = sub.add_parser("ads", help="almost-difference-set nonexistence sweep")
    p.add_argument("--v-max", type=int, required=True, help="scan v below this bound")
    p.add_argument("--hamilton-only", action="store_true",
                   help="list composite v where only the full-length excess survives")
    add_common(p, k_lambda=False)
    p.set_defaults(fn=cmd_ads)

    p = sub.add_parser("verify", help="verify an explicit block list")
    p.add_argument("--file", required=True,
                   help="text file: header 'v k lambda', one block per line")
    add_common(p, k_lambda=False)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("table", help="regenerate a built-in survey report")
    p.add_argument("--id", type=int, required=True, choices=range(1, 6),
                   help="1 lambda=1 scans, 2 cyclic, 3 proportions, "
                   "4 full-length excess, 5 uniform excess")
    p.add_argument("--prime-bound", type=int, default=None,
                   help="override the report's default prime bound")
    p.add_argument("--v-max", type=int, help="restrict to rows with v at most this")
    p.add_argument("--seed", type=int, help="seed for sampled rows (table 3)")
    p.add_argument("--extended", action="store_true",
                   help="include the long-running rows")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("sample", help="uniformly sample distinct cycle types")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (_InvalidParameters, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
