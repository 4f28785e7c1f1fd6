"""Command-line surface.

Subcommands: ``prob``, ``dist``, ``tvd-curve``, ``validate``, ``bench``,
``sample``.  States come from a JSON file (``--state``) or an inline
preparation (``--prep`` + ``--param`` + optional ``--lon-seed``); detector
models from ``--N``, ``--eta``, ``--nu``.  All numeric output uses 17
significant digits, and files are written atomically so schema violations
never leave partial output behind.

Exit codes: 0 success, 1 failed validation checks, 2 input/schema error,
3 numerical-domain error, 4 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import functools
import io
import json
import math
import os
import sys
import tempfile
import time

from . import figures, gaussian, probstat, validation
from .detection import DetectorModel
from .errors import (
    ClickGBSError,
    DimensionMismatch,
    IdentityViolation,
    IndexOutOfRange,
    InvalidMatrix,
    InvalidOrdering,
    InvalidState,
    NegativeMeanPhotons,
    NotClassical,
    NotPositiveDefinite,
    NotSwapSymmetric,
    OutOfRange,
    PatternOutOfRange,
    ProbabilityOutOfRange,
    SingularConstantTerm,
    TailTooHeavy,
    TooLarge,
    ZeroConditional,
)
from .matrixfn import instrumentation

_INPUT_ERRORS = (
    InvalidState,
    InvalidMatrix,
    PatternOutOfRange,
    OutOfRange,
    NegativeMeanPhotons,
    DimensionMismatch,
    IndexOutOfRange,
)
_NUMERIC_ERRORS = (
    NotPositiveDefinite,
    InvalidOrdering,
    NotClassical,
    SingularConstantTerm,
    NotSwapSymmetric,
    ZeroConditional,
    ProbabilityOutOfRange,
    IdentityViolation,
    TailTooHeavy,
)


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".clickgbs-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        _write_atomic(out_path, text)
    else:
        sys.stdout.write(text)


def _build_state(args) -> gaussian.GaussianState:
    if (args.state is None) == (args.prep is None):
        raise InvalidState("exactly one of --state or --prep must be given")
    if args.state is not None:
        try:
            return gaussian.load_state(args.state)
        except OSError as exc:
            raise InvalidState(f"cannot read state file: {exc}") from exc
    params = args.param or []
    kind = args.prep
    if kind == "vacuum":
        try:
            state = gaussian.vacuum(int(params[0]) if params else 1)
        except ValueError as exc:
            raise InvalidState(f"bad --param value: {exc}") from exc
    else:
        if not params:
            raise InvalidState(f"--prep {kind} needs one --param per mode")
        try:
            if kind == "thermal":
                parts = [gaussian.thermal(float(p)) for p in params]
            elif kind == "squeezed":
                parts = [gaussian.squeezed(float(p)) for p in params]
            else:  # coherent
                parts = [gaussian.coherent(complex(p)) for p in params]
        except ValueError as exc:
            raise InvalidState(f"bad --param value: {exc}") from exc
        state = functools.reduce(gaussian.tensor, parts)
    if args.lon_seed is not None:
        state = gaussian.apply_unitary(
            state, gaussian.haar_unitary(state.modes, args.lon_seed)
        )
    return state


def _parse_pattern(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise PatternOutOfRange(f"pattern must be comma-separated integers: {exc}") from exc


def _model(args) -> DetectorModel:
    return DetectorModel(args.N, args.eta, args.nu)


# -- subcommands -----------------------------------------------------------------

def cmd_prob(args) -> int:
    state = _build_state(args)
    model = _model(args)
    pattern = _parse_pattern(args.pattern)
    start = time.perf_counter()
    rec = probstat.click_prob_record(state, pattern, model)
    wall = time.perf_counter() - start
    print(f"{rec.probability:.17g}")
    record = {
        "probability": rec.probability,
        "pattern": list(pattern),
        "N": model.n_detectors,
        "eta": model.eta,
        "nu": model.nu,
        "det_sigma": rec.sqrt_det_sigma ** 2,
        "ken_value": rec.ken_value,
        "term_count": rec.term_count,
        "engine": rec.engine,
        "wall_time_s": wall,
    }
    text = json.dumps(record, indent=2) + "\n"
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_dist(args) -> int:
    state = _build_state(args)
    dist = probstat.full_distribution(state, _model(args))
    text = dist.to_csv()
    text += f"# normalization_residual = {dist.normalization_residual:.17g}\n"
    _emit(text, args.out)
    if args.plot:
        figures.render_distribution(dist, args.plot)
    return 0


def cmd_tvd_curve(args) -> int:
    if args.nbar_step <= 0:
        raise OutOfRange("--nbar-step must be positive")
    steps = round((args.nbar_max - args.nbar_min) / args.nbar_step)
    grid = [args.nbar_min + i * args.nbar_step for i in range(steps + 1)]
    rows = probstat.tvd_curve(grid, args.N)
    lines = ["nbar,tvd"]
    lines += [f"{nbar:.17g},{tvd:.17g}" for nbar, tvd in rows]
    _emit("\n".join(lines) + "\n", args.out)
    if args.plot:
        figures.render_tvd_curve(rows, args.plot, args.N)
    return 0


def cmd_validate(args) -> int:
    extra = gaussian.load_state(args.state) if args.state else None
    report = validation.run_validation(seed=args.seed, extra_state=extra)
    for entry in report:
        status = "PASS" if entry["pass"] else "FAIL"
        print(
            f"{status} {entry['check']}: max_residual={entry['max_residual']:.3e} "
            f"tolerance={entry['tolerance']:.0e}"
        )
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0 if all(entry["pass"] for entry in report) else 1


def _bench_patterns(args) -> list[tuple[int, ...]]:
    if args.pattern:
        return [_parse_pattern(p) for p in args.pattern]
    return [(1,) * n for n in range(1, 11)]


def cmd_bench(args) -> int:
    patterns = _bench_patterns(args)
    explicit_state = args.state is not None or args.prep is not None
    state = _build_state(args) if explicit_state else None
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["pattern", "F", "det_evals", "wall_time_s"])
    for pattern in patterns:
        n_detectors = args.N if args.N is not None else max(1, max(pattern))
        model = DetectorModel(n_detectors, args.eta, args.nu)
        target = state
        if target is None:
            target = functools.reduce(
                gaussian.tensor, [gaussian.thermal(0.5)] * len(pattern)
            )
        instrumentation.reset()
        start = time.perf_counter()
        probstat.click_prob(target, pattern, model)
        wall = time.perf_counter() - start
        writer.writerow(
            [
                ",".join(str(x) for x in pattern),
                probstat.term_count(pattern),
                instrumentation.determinant_evals,
                f"{wall:.6e}",
            ]
        )
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_sample(args) -> int:
    state = _build_state(args)
    model = _model(args)
    sampler = probstat.sample_chain if args.method == "chain" else probstat.sample_exact
    samples = sampler(state, model, args.count, args.seed)
    lines = [f"# seed = {args.seed}, method = {args.method}"]
    lines.append(",".join(f"k_{i + 1}" for i in range(state.modes)))
    lines += [",".join(str(x) for x in pattern) for pattern in samples]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- parser ----------------------------------------------------------------------

def _add_state_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", help="path to a GaussianState JSON file")
    parser.add_argument(
        "--prep",
        choices=["vacuum", "thermal", "squeezed", "coherent"],
        help="inline preparation kind (one --param per mode; vacuum: mode count)",
    )
    parser.add_argument(
        "--param", action="append", help="preparation parameter, repeatable"
    )
    parser.add_argument(
        "--lon-seed", type=int, help="feed the preparation through a seeded Haar LON"
    )


def _add_model_flags(parser: argparse.ArgumentParser, *, require_n: bool = True) -> None:
    parser.add_argument(
        "--N", type=int, required=require_n, help="threshold detectors per click detector"
    )
    parser.add_argument("--eta", type=float, default=1.0, help="detector efficiency")
    parser.add_argument("--nu", type=float, default=0.0, help="dark-count rate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clickgbs",
        description="Click-counting Gaussian boson sampling probabilities and samples",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", help="probability of one click pattern")
    _add_state_flags(p)
    _add_model_flags(p)
    p.add_argument("--pattern", required=True, help="comma-separated click counts")
    p.add_argument("--out", help="write the JSON record here")
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("dist", help="full click distribution as CSV")
    _add_state_flags(p)
    _add_model_flags(p)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--plot", help="also render a bar chart to this image path")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("tvd-curve", help="click-vs-PNR TVD sweep for a thermal probe")
    _add_model_flags(p)
    p.add_argument("--nbar-min", type=float, default=0.0)
    p.add_argument("--nbar-max", type=float, default=1.0)
    p.add_argument("--nbar-step", type=float, default=0.05)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--plot", help="also render the curve to this image path")
    p.set_defaults(func=cmd_tvd_curve)

    p = sub.add_parser("validate", help="run the exact-identity suites")
    p.add_argument("--state", help="optional state file to include in the suites")
    p.add_argument("--seed", type=int, default=validation.DEFAULT_SEED)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="term counts and wall times over a pattern ladder")
    _add_state_flags(p)
    _add_model_flags(p, require_n=False)
    p.add_argument(
        "--pattern",
        action="append",
        help="pattern to time, repeatable (default: collision-free ladder n=1..10)",
    )
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sample", help="draw click patterns")
    _add_state_flags(p)
    _add_model_flags(p)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--method", choices=["exact", "chain"], default="exact")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ClickGBSError as exc:  # anything uncategorized is an input problem
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
