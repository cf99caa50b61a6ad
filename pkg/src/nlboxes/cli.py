"""Command-line interface.

Exit codes: 0 on success, 1 when a box fails validation or the
non-signaling check, 2 on usage errors including malformed JSON.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import distill, games, quantum, search, symmetry
from .boxes import (
    DEFAULT_TOL,
    Box,
    chsh_csv,
    chsh_values,
    correlators,
    is_non_signaling,
    nl_correlators,
    p_eps,
    p_eps_delta,
    validate,
    CHSH_LABELS,
)

MAX_CLI_XOR_DEPTH = 16
DEFAULT_CLI_XOR_DEPTH = 10


class _CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_box(path: str) -> Box:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _CliFailure(2, f"cannot read {path}: {exc}")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _CliFailure(2, f"malformed JSON in {path} at line {exc.lineno} column {exc.colno}: {exc.msg}")
    try:
        return Box.from_json_dict(obj)
    except ValueError as exc:
        raise _CliFailure(2, f"bad box file {path}: {exc}")


def _require_valid_ns(box: Box, tol: float) -> None:
    report = validate(box, tol)
    if not report.ok:
        raise _CliFailure(1, "invalid box:\n" + report.describe())
    check = is_non_signaling(box, tol)
    if not check.ok:
        raise _CliFailure(1, f"box is signaling: worst marginal discrepancy {check.residual:.3g}")


def _parse_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo_text, hi_text = text.split("..", 1)
            lo, hi = int(lo_text), int(hi_text)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise _CliFailure(2, f"bad range {text!r}; expected N or LO..HI")


def _cmd_validate(args) -> int:
    box = _load_box(args.box)
    report = validate(box, args.tol)
    if not report.ok:
        print("invalid box:")
        print(report.describe())
        return 1
    check = is_non_signaling(box, args.tol)
    print(f"rows: valid probability distributions (tol {args.tol:g})")
    print(f"non-signaling: {'yes' if check.ok else 'NO'} (worst marginal discrepancy {check.residual:.3g})")
    return 0 if check.ok else 1


def _cmd_chsh(args) -> int:
    box = _load_box(args.box)
    _require_valid_ns(box, args.tol)
    if args.format == "csv":
        sys.stdout.write(chsh_csv(box, args.tol))
        return 0
    c = correlators(box, args.tol)
    vals = chsh_values(c)
    if args.format == "json":
        print(json.dumps({
            "correlators": list(c.as_tuple()),
            "chsh": dict(zip(CHSH_LABELS, vals)),
            "nl": nl_correlators(c),
        }))
        return 0
    print(f"correlators: x00={c.x00:.9g} x01={c.x01:.9g} x10={c.x10:.9g} x11={c.x11:.9g}")
    for label, val in zip(CHSH_LABELS, vals):
        print(f"{label:>12}: {val:.9g}")
    print(f"          NL: {nl_correlators(c):.9g}")
    return 0


def _cmd_quantum(args) -> int:
    if args.correlators is not None:
        parts = args.correlators.split(",")
        if len(parts) != 4:
            raise _CliFailure(2, "--correlators needs four comma-separated values")
        try:
            from .boxes import Correlators

            c = Correlators(*(float(p) for p in parts))
        except ValueError:
            raise _CliFailure(2, f"bad correlator values: {args.correlators!r}")
        ok, slack = quantum.is_quantum_correlators(c, args.tol)
        tsi = quantum.tsirelson_check(c, args.tol)
        flagged = False
    else:
        if args.box is None:
            raise _CliFailure(2, "quantum needs a box file or --correlators")
        box = _load_box(args.box)
        _require_valid_ns(box, args.tol)
        verdict = quantum.is_quantum_box(box, args.tol)
        ok, slack, flagged = verdict.quantum, verdict.slack, verdict.correlator_level_only
        tsi = quantum.tsirelson_check(correlators(box, args.tol), args.tol)
    if args.format == "json":
        print(json.dumps({
            "quantum": ok,
            "slack": slack,
            "tsirelson_ok": tsi,
            "correlator_level_only": flagged,
        }))
        return 0
    print(f"quantum realizable: {'yes' if ok else 'no'} (arcsin slack {slack:.6g})")
    print(f"within Tsirelson bound: {'yes' if tsi else 'no'}")
    if flagged:
        print("note: marginals are not uniform; verdict covers the correlators only")
    return 0


def _cmd_distill(args) -> int:
    n_values = _parse_range(args.n)
    cap = args.max_n
    if cap > MAX_CLI_XOR_DEPTH:
        raise _CliFailure(2, f"--max-n cannot exceed {MAX_CLI_XOR_DEPTH}")
    if max(n_values) > cap:
        raise _CliFailure(2, f"n up to {max(n_values)} exceeds the cap {cap}; raise --max-n (max {MAX_CLI_XOR_DEPTH})")
    if args.family == "eps" and args.delta != 0.0:
        raise _CliFailure(2, "--family eps does not take --delta")
    delta = args.delta
    try:
        report = distill.distillation_report(args.eps, delta, n_values, args.tol)
    except ValueError as exc:
        raise _CliFailure(2, str(exc))
    if args.format == "csv":
        sys.stdout.write(report.to_csv())
    elif args.format == "json":
        print(json.dumps(report.to_json_dict()))
    else:
        print(f"resource eps={args.eps:g} delta={delta:g} quantum={report.resource_quantum}")
        print(f"{'n':>3} {'nl_closed':>12} {'nl_brute':>12} distilled")
        for row in report.rows:
            print(f"{row.n:>3} {row.nl_closed:>12.9f} {row.nl_brute:>12.9f} {row.distilled}")
    return 0


def _cmd_optimize(args) -> int:
    try:
        opt = distill.optimize_quantum_distillation(
            n_max=args.n_max,
            coarse_step=args.coarse_step,
            refine_to=args.refine_to,
            tol=args.tol,
        )
    except distill.InfeasibleRegionError as exc:
        raise _CliFailure(1, str(exc))
    if args.format == "json":
        print(json.dumps({
            "n": opt.n,
            "eps": opt.eps,
            "delta": opt.delta,
            "nl_in": opt.nl_in,
            "nl_out": opt.nl_out,
        }))
        return 0
    print(f"NL_out {opt.nl_out:.6f}, n={opt.n}, eps={opt.eps:.5f}, delta={opt.delta:.5f}, NL_in {opt.nl_in:.6f}")
    return 0


def _cmd_search(args) -> int:
    box = _load_box(args.box)
    _require_valid_ns(box, args.tol)
    result = search.search_2copy(box, tol=args.tol, jobs=args.jobs)
    if args.format == "table":
        print(f"NL_in  {result.nl_in:.9g}")
        print(f"NL_out {result.nl_out:.9g} ({'distilled' if result.distilled else 'no gain'})")
        print(f"strategies: {result.strategies_raw} raw, {result.strategies_deduped} after dedup")
        print(f"wall time: {result.wall_time_s:.2f} s")
    else:
        print(json.dumps(result.to_json_dict()))
    return 0


def _cmd_depolarize(args) -> int:
    box = _load_box(args.box)
    _require_valid_ns(box, args.tol)
    iso = symmetry.depolarize(box, args.tol)
    print(iso.to_json())
    return 0


def _cmd_game(args) -> int:
    if args.box is not None:
        resource = _load_box(args.box)
        _require_valid_ns(resource, args.tol)
    elif args.eps is not None:
        try:
            resource = p_eps(args.eps) if args.delta is None else p_eps_delta(args.eps, args.delta)
        except ValueError as exc:
            raise _CliFailure(2, str(exc))
    else:
        raise _CliFailure(2, "game needs a box file or --eps")
    if args.m > MAX_CLI_XOR_DEPTH:
        raise _CliFailure(2, f"--m cannot exceed {MAX_CLI_XOR_DEPTH}")
    result = games.play_and_game(resource, args.m, args.tol)
    if args.format == "json":
        print(json.dumps(result.to_json_dict()))
        return 0
    print(f"resource NL: {result.resource_nl:.9g}, distillation depth m={result.m}")
    print(f"S of played box: {result.s_value:.9g}")
    print(f"win probability: {result.success:.9g}")
    print(f"classical optimum: {result.classical_baseline:.9g}")
    print(f"margin: {result.margin:+.9g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlboxes",
        description="Exact analysis of binary non-signaling boxes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, fmt=("table", "csv", "json")) -> None:
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="global numeric tolerance")
        p.add_argument("--format", choices=fmt, default=fmt[0])

    p = sub.add_parser("validate", help="check a box file for validity and non-signaling")
    p.add_argument("box")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("chsh", help="correlators, the eight CHSH values, and NL")
    p.add_argument("box")
    common(p)
    p.set_defaults(func=_cmd_chsh)

    p = sub.add_parser("quantum", help="quantum realizability of a box or correlator tuple")
    p.add_argument("box", nargs="?")
    p.add_argument("--correlators", help="four comma-separated correlators")
    common(p, fmt=("table", "json"))
    p.set_defaults(func=_cmd_quantum)

    p = sub.add_parser("distill", help="XOR-protocol distillation report over a range of n")
    p.add_argument("--family", choices=("eps", "eps-delta"), default="eps-delta")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--n", required=True, help="copy count, N or LO..HI")
    p.add_argument("--max-n", type=int, default=DEFAULT_CLI_XOR_DEPTH,
                   help=f"cap on brute-force depth (default {DEFAULT_CLI_XOR_DEPTH}, max {MAX_CLI_XOR_DEPTH})")
    common(p)
    p.set_defaults(func=_cmd_distill)

    p = sub.add_parser("optimize", help="best quantum-realizable resource for the XOR protocol")
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--coarse-step", type=float, default=1e-3)
    p.add_argument("--refine-to", type=float, default=1e-8)
    common(p, fmt=("table", "json"))
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("search", help="exhaustive two-copy wiring search")
    p.add_argument("box")
    p.add_argument("--jobs", type=int, default=1)
    common(p, fmt=("json", "table"))
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("depolarize", help="project a box onto the isotropic line, preserving S")
    p.add_argument("box")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=_cmd_depolarize)

    p = sub.add_parser("game", help="distributed AND game win rate of a resource")
    p.add_argument("box", nargs="?")
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--m", type=int, default=1, help="XOR pre-distillation depth")
    common(p, fmt=("table", "json"))
    p.set_defaults(func=_cmd_game)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except _CliFailure as failure:
        print(str(failure), file=sys.stderr)
        return failure.code


def main() -> None:
    sys.exit(run())
