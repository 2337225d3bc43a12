"""Command line interface.

Subcommands: reduce, increase, verify, report, bench.  Exit codes are
0 for success, 1 for usage errors, 2 for data or input errors, 3 for a
failed verification suite.  Every failure also prints a one-line
diagnostic of the form ``ERROR <code> <subcommand> <detail>`` to the
error stream.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .bench import SweepSpec, run_sweep
from .chain import (
    DegeneratePolicy,
    increase_dataset,
    itemized_ops_increase,
    predicted_ops_increase,
    predicted_ops_reduce,
    reduce_dataset,
)
from .dataio import (
    DatasetFileFormat,
    _atomic_write_text,
    infer_format,
    make_report_doc,
    read_dataset,
    write_dataset,
    write_report_doc,
)
from .distortion import (
    angle_distortion,
    circle_image_check,
    distance_distortion,
    sample_sphere_circle,
)
from .errors import InfeasibleGridError, StereochainError
from .sphere import (
    SpherePoint,
    conformality_check,
    inverse_conformality_check,
    stereo_lift,
    stereo_project,
)

PROG = "stereochain"


class _UsageError(Exception):
    def __init__(self, message: str, subcommand: str = "cli"):
        super().__init__(message)
        self.subcommand = subcommand


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so cli_main owns the exit code."""

    def error(self, message):
        sub = self.prog.split()[-1] if " " in self.prog else "cli"
        raise _UsageError(message, sub)


def _err(code: int, subcommand: str, detail: str) -> None:
    print(f"ERROR {code} {subcommand} {detail}", file=sys.stderr)


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise _UsageError(f"{flag} expects a comma-separated integer list, got {text!r}")
    if not values:
        raise _UsageError(f"{flag} must name at least one value")
    return values


def _add_io_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="input dataset file")
    p.add_argument("--output", required=True, help="output dataset file")
    p.add_argument(
        "--input-format", choices=["csv", "jsonl"], default=None,
        help="override the format inferred from the input suffix",
    )
    p.add_argument(
        "--output-format", choices=["csv", "jsonl"], default=None,
        help="override the format inferred from the output suffix",
    )
    p.add_argument(
        "--header", action=argparse.BooleanOptionalAction, default=None,
        help="force header handling for CSV (default: detect on read, omit on write)",
    )
    p.add_argument("--delimiter", default=",", help="CSV field delimiter")
    p.add_argument("--trace", default=None, help="write the per-level trace here (JSON)")
    p.add_argument("--counter", default=None, help="write the operation counts here (JSON)")
    p.add_argument(
        "--endpoints-only", action="store_true",
        help="keep only the first and last level in the trace",
    )


def _fmt_for(args, path: str, which: str) -> DatasetFileFormat:
    kind = getattr(args, f"{which}_format") or infer_format(path).kind
    return DatasetFileFormat(kind=kind, has_header=args.header, delimiter=args.delimiter)


def build_parser() -> _Parser:
    parser = _Parser(prog=PROG, description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reduce", help="lower the dimensionality of a dataset")
    _add_io_arguments(p)
    p.add_argument("--target-dim", type=int, required=True, help="output coordinate count")
    p.add_argument("--policy", choices=["fail", "perturb", "drop"], default="fail")
    p.add_argument("--perturb-scale", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("increase", help="raise the dimensionality of a dataset")
    _add_io_arguments(p)
    p.add_argument("--target-dim", type=int, required=True, help="output coordinate count")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_increase)

    p = sub.add_parser("verify", help="run a numeric self-check suite")
    p.add_argument("--suite", choices=["roundtrip", "conformal", "circles"], required=True)
    p.add_argument("--dims", default="2,3,4", help="comma-separated dimension list")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="measure distortion between two matched datasets")
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--max-triples", type=int, default=20000)
    p.add_argument("--max-pairs", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--header", action=argparse.BooleanOptionalAction, default=None,
        help="force header handling for CSV inputs",
    )
    p.add_argument("--delimiter", default=",")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("bench", help="sweep chain sizes and compare operation counts")
    p.add_argument("--mode", choices=["reduce", "increase"], required=True)
    p.add_argument("--n-list", required=True, help="comma-separated point counts")
    p.add_argument(
        "--dim-list", required=True,
        help="input dimensions (reduce) or lift offsets (increase)",
    )
    p.add_argument(
        "--target-dim", type=int, default=None,
        help="fixed output dimension (reduce, default 2) or fixed input dimension (increase, default 4)",
    )
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--csv", default=None, help="also write flat rows with wall times here")
    p.set_defaults(func=_cmd_bench)

    return parser


def _op_counts_payload(counter, predicted_paper: int, predicted_measured: int) -> dict:
    payload = counter.as_dict()
    payload["predicted_paper"] = predicted_paper
    payload["predicted_measured_formula"] = predicted_measured
    return payload


def _trace_payload(trace) -> dict:
    return {
        "direction": trace.direction,
        "complete": trace.complete,
        "dropped_ids": list(trace.dropped_ids),
        "warnings": list(trace.warnings),
        "levels": [
            {"dim": dim, "ids": list(snap.ids), "points": snap.points.tolist()}
            for dim, snap in trace.levels
        ],
    }


def _cmd_reduce(args) -> int:
    data = read_dataset(args.input, _fmt_for(args, args.input, "input"))
    if not (1 <= args.target_dim < data.dim):
        raise _UsageError(
            f"target dimension must lie in [1, {data.dim - 1}] for {data.dim}-column input, "
            f"got {args.target_dim}",
            "reduce",
        )
    if data.dim < 3:
        raise _UsageError("reduction needs at least 3 input columns", "reduce")
    policy = DegeneratePolicy(args.policy, args.perturb_scale, args.seed)
    result, trace, counter = reduce_dataset(
        data, args.target_dim, policy, endpoints_only=args.endpoints_only
    )
    write_dataset(result, args.output, _fmt_for(args, args.output, "output"))
    inputs = {
        "input": args.input,
        "output": args.output,
        "target_dim": args.target_dim,
        "policy": args.policy,
        "perturb_scale": args.perturb_scale,
        "n": data.n,
        "input_dim": data.dim,
        "endpoints_only": args.endpoints_only,
    }
    predicted = predicted_ops_reduce(result.n, data.dim - 1, args.target_dim - 1)
    if args.counter:
        doc = make_report_doc(
            "reduce", args.seed, inputs,
            {
                "op_counts": _op_counts_payload(counter, predicted, predicted),
                "dropped_ids": list(trace.dropped_ids),
                "warnings": list(trace.warnings),
            },
        )
        write_report_doc(args.counter, doc)
    if args.trace:
        doc = make_report_doc("reduce", args.seed, inputs, _trace_payload(trace))
        write_report_doc(args.trace, doc)
    return 0


def _cmd_increase(args) -> int:
    data = read_dataset(args.input, _fmt_for(args, args.input, "input"))
    if not (args.target_dim > data.dim):
        raise _UsageError(
            f"target dimension must exceed the {data.dim}-column input, got {args.target_dim}",
            "increase",
        )
    result, trace, counter = increase_dataset(
        data, args.target_dim, endpoints_only=args.endpoints_only
    )
    write_dataset(result, args.output, _fmt_for(args, args.output, "output"))
    inputs = {
        "input": args.input,
        "output": args.output,
        "target_dim": args.target_dim,
        "n": data.n,
        "input_dim": data.dim,
        "endpoints_only": args.endpoints_only,
    }
    published = predicted_ops_increase(data.n, data.dim - 1, args.target_dim - 1)
    itemized = itemized_ops_increase(data.n, data.dim - 1, args.target_dim - 1)
    if args.counter:
        doc = make_report_doc(
            "increase", args.seed, inputs,
            {"op_counts": _op_counts_payload(counter, published, itemized)},
        )
        write_report_doc(args.counter, doc)
    if args.trace:
        doc = make_report_doc("increase", args.seed, inputs, _trace_payload(trace))
        write_report_doc(args.trace, doc)
    return 0


def _sphere_samples(rng, count: int, ambient: int, cap_last: float) -> np.ndarray:
    """Seeded points on the unit sphere with last coordinate capped."""
    out = np.empty((count, ambient))
    have = 0
    while have < count:
        cand = rng.standard_normal((2 * count + 8, ambient))
        norms = np.linalg.norm(cand, axis=1)
        cand = cand[norms > 1e-12] / norms[norms > 1e-12, None]
        cand = cand[cand[:, -1] <= cap_last]
        take = min(len(cand), count - have)
        out[have : have + take] = cand[:take]
        have += take
    return out


def _verify_roundtrip(dims, samples, seed, lines) -> bool:
    ok = True
    for dim in dims:
        rng = np.random.default_rng([seed, dim, 1])
        flat = rng.uniform(-1000.0, 1000.0, size=(samples, dim))
        max_rel = 0.0
        for v in flat:
            w = stereo_project(stereo_lift(v))
            rel = np.max(np.abs(w - v) / np.maximum(np.abs(v), 1e-300))
            max_rel = max(max_rel, float(rel))
        sphere = _sphere_samples(np.random.default_rng([seed, dim, 2]), samples, dim + 1, 0.9)
        max_abs = 0.0
        for row in sphere:
            p = SpherePoint(row)
            back = stereo_lift(stereo_project(p))
            max_abs = max(max_abs, float(np.max(np.abs(back.coords - row))))
        good = max_rel < 1e-9 and max_abs < 1e-10
        ok &= good
        lines.append(
            f"{'PASS' if good else 'FAIL'} roundtrip dim={dim} samples={samples} "
            f"max_rel={max_rel:.3e} max_abs={max_abs:.3e}"
        )
    return ok


def _verify_conformal(dims, samples, seed, lines) -> bool:
    ok = True
    for dim in dims:
        sphere = _sphere_samples(np.random.default_rng([seed, dim, 3]), samples, dim + 1, 0.9)
        worst_off = worst_scale = 0.0
        for row in sphere:
            rep = conformality_check(SpherePoint(row))
            worst_off = max(worst_off, rep.off_diagonal_residual)
            rel = abs(rep.scale_factor_observed - rep.scale_factor_predicted)
            worst_scale = max(worst_scale, rel / rep.scale_factor_predicted)
        flat = np.random.default_rng([seed, dim, 4]).uniform(-3.0, 3.0, size=(samples, dim))
        for v in flat:
            rep = inverse_conformality_check(v)
            worst_off = max(worst_off, rep.off_diagonal_residual)
            rel = abs(rep.scale_factor_observed - rep.scale_factor_predicted)
            worst_scale = max(worst_scale, rel / rep.scale_factor_predicted)
        good = worst_off < 1e-5 and worst_scale < 1e-4
        ok &= good
        lines.append(
            f"{'PASS' if good else 'FAIL'} conformal dim={dim} samples={samples} "
            f"max_offdiag={worst_off:.3e} max_scale_rel={worst_scale:.3e}"
        )
    return ok


def _verify_circles(m, lines) -> bool:
    checks = []
    pole_circle = sample_sphere_circle((1.0, 0.0, 0.0), 0.0, m)
    rep = circle_image_check(pole_circle, through_pole=True)
    checks.append(("circle through pole maps to a line", rep.residual < 1e-8,
                   f"residual={rep.residual:.3e}"))
    latitude = sample_sphere_circle((0.0, 0.0, 1.0), -0.5, m)
    rep = circle_image_check(latitude, through_pole=False)
    radius_err = abs(rep.fit_params["radius"] - 0.5773502691896257)
    checks.append(("latitude circle maps to a circle", rep.residual < 1e-8 and radius_err < 1e-9,
                   f"residual={rep.residual:.3e} radius_err={radius_err:.3e}"))
    equator = sample_sphere_circle((0.0, 0.0, 1.0), 0.0, m)
    rep = circle_image_check(equator, through_pole=False)
    radius_err = abs(rep.fit_params["radius"] - 1.0)
    checks.append(("equator maps to the unit circle", rep.residual < 1e-8 and radius_err < 1e-12,
                   f"residual={rep.residual:.3e} radius_err={radius_err:.3e}"))
    ok = True
    for name, good, detail in checks:
        ok &= good
        lines.append(f"{'PASS' if good else 'FAIL'} circles {name}: {detail}")
    return ok


def _cmd_verify(args) -> int:
    dims = _parse_int_list(args.dims, "--dims")
    if args.samples < 1:
        raise _UsageError("--samples must be positive", "verify")
    lines: list[str] = []
    if args.suite == "roundtrip":
        ok = _verify_roundtrip(dims, args.samples, args.seed, lines)
    elif args.suite == "conformal":
        if any(d < 1 for d in dims):
            raise _UsageError("conformal suite needs dims >= 1", "verify")
        ok = _verify_conformal(dims, args.samples, args.seed, lines)
    else:
        m = max(args.samples, 8)
        ok = _verify_circles(m, lines)
    for line in lines:
        print(line)
    if not ok:
        _err(3, "verify", f"suite {args.suite} failed")
        return 3
    print(f"OK {args.suite}")
    return 0


def _report_payload(rep) -> dict:
    payload = {k: getattr(rep, k) for k in rep.__dataclass_fields__}
    if "histogram" in payload:
        payload["histogram"] = list(payload["histogram"])
        payload["histogram_bins"] = len(payload["histogram"])
        payload["histogram_range"] = [0.0, math.pi]
    return payload


def _cmd_report(args) -> int:
    def fmt(path: str) -> DatasetFileFormat:
        return DatasetFileFormat(
            kind=infer_format(path).kind, has_header=args.header, delimiter=args.delimiter
        )

    before = read_dataset(args.before, fmt(args.before))
    after = read_dataset(args.after, fmt(args.after))
    if before.n != after.n:
        _err(2, "report", f"row counts differ: {before.n} vs {after.n}")
        return 2
    angles = angle_distortion(before, after, args.max_triples, args.seed)
    distances = distance_distortion(before, after, args.max_pairs, args.seed)
    doc = make_report_doc(
        "report",
        args.seed,
        {
            "before": args.before,
            "after": args.after,
            "max_triples": args.max_triples,
            "max_pairs": args.max_pairs,
            "n": before.n,
            "before_dim": before.dim,
            "after_dim": after.dim,
        },
        {
            "angle_distortion": _report_payload(angles),
            "distance_distortion": _report_payload(distances),
        },
    )
    write_report_doc(args.out, doc)
    return 0


def _cmd_bench(args) -> int:
    n_values = _parse_int_list(args.n_list, "--n-list")
    dim_values = _parse_int_list(args.dim_list, "--dim-list")
    target = args.target_dim
    if target is None:
        target = 2 if args.mode == "reduce" else 4
    spec = SweepSpec(
        mode=args.mode,
        n_values=n_values,
        dim_values=dim_values,
        target_dim=target,
        repetitions=args.reps,
        seed=args.seed,
    )
    result = run_sweep(spec)
    rows_payload = [
        {
            "n": row.n,
            "dim": row.dim,
            "target": row.target,
            "repetition": row.repetition,
            "op_counts": _op_counts_payload(
                row.ops, row.predicted_paper, row.predicted_measured
            ),
        }
        for row in result.rows
    ]
    doc = make_report_doc(
        "bench",
        args.seed,
        {
            "mode": args.mode,
            "n_list": list(n_values),
            "dim_list": list(dim_values),
            "target_dim": target,
            "repetitions": args.reps,
        },
        {
            "rows": rows_payload,
            "fitted_exponent_dim": result.fitted_exponent_dim,
            "fitted_exponent_n": result.fitted_exponent_n,
            "fit_r2": result.fit_r2,
        },
    )
    write_report_doc(args.out, doc)
    if args.csv:
        header = (
            "mode,n,dim,target,rep,mults,adds,subs,divs,sqrts,total,"
            "predicted_paper,predicted_measured_formula,wall_time_s"
        )
        lines = [header]
        for row in result.rows:
            ops = row.ops
            lines.append(
                f"{args.mode},{row.n},{row.dim},{row.target},{row.repetition},"
                f"{ops.mults},{ops.adds},{ops.subs},{ops.divs},{ops.sqrts},"
                f"{ops.total()},{row.predicted_paper},{row.predicted_measured},"
                f"{row.wall_time!r}"
            )
        _atomic_write_text(Path(args.csv), "\n".join(lines) + "\n")
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    """Parse arguments, run the chosen subcommand, map errors to exit codes."""
    parser = build_parser()
    sub = "cli"
    try:
        args = parser.parse_args(argv)
        sub = args.command
        return args.func(args)
    except _UsageError as exc:
        _err(1, exc.subcommand if exc.subcommand != "cli" else sub, str(exc))
        return 1
    except InfeasibleGridError as exc:
        _err(1, sub, f"{type(exc).__name__}: {exc}")
        return 1
    except ValueError as exc:
        _err(1, sub, str(exc))
        return 1
    except StereochainError as exc:
        _err(2, sub, f"{type(exc).__name__}: {exc}")
        return 2
    except OSError as exc:
        _err(2, sub, str(exc))
        return 2
    except SystemExit as exc:  # argparse --help
        code = exc.code
        return int(code) if isinstance(code, int) else 0


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
