"""Command-line entry point: construct, analyze, bound, simulate, oracle."""

from __future__ import annotations

import argparse
import math
import sys

from . import bounds, weightdist
from .codec import build_encoder
from .construction import CodeSpec, build_order_s, find_low_weight_codewords, shorten
from .decode_soft import SoftConfig
from .harness import BecConfig, SimConfig, prepare, records_to_csv, run_grid

EXIT_USAGE = 2
EXIT_RUNTIME = 1


class UsageError(Exception):
    pass


def _log(msg: str) -> None:
    for line in msg.splitlines():
        print(f"# {line}", file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_grid(text: str) -> tuple[float, ...]:
    """``a:step:b`` (inclusive) or a comma-separated list."""
    try:
        if ":" in text:
            a, step, b = (float(x) for x in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            return tuple(round(a + i * step, 12) for i in range(count))
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; use a:step:b or v1,v2,...") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty grid")
    return vals


def _int_at_least(lo: int):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v

    return conv


# -- code selection -------------------------------------------------------------


def _add_code_args(p: argparse.ArgumentParser, with_file: bool = True) -> None:
    g = p.add_argument_group("code")
    if with_file:
        g.add_argument("--spec", help="code description written by `construct --out`")
    g.add_argument("--t", type=_int_at_least(2), help="base parameter (n = 4 t^2)")
    g.add_argument("--s", type=_int_at_least(1), default=1, help="order (number of stacked blocks)")
    g.add_argument("--seed", type=_int_at_least(0), default=1, help="construction seed")
    g.add_argument("--shorten-w4", type=_int_at_least(0), default=0, metavar="A4")
    g.add_argument("--shorten-w6", type=_int_at_least(0), default=0, metavar="A6")


def _resolve_code(args) -> CodeSpec:
    if getattr(args, "spec", None):
        if args.t is not None:
            raise UsageError("give either --spec or --t, not both")
        return CodeSpec.load(args.spec)
    if args.t is None:
        raise UsageError("a code is required: --spec FILE or --t T")
    spec = CodeSpec.from_seed(args.t, args.s, args.seed)
    alphas = {w: a for w, a in ((4, args.shorten_w4), (6, args.shorten_w6)) if a}
    if alphas:
        _log(f"shortening {alphas} (searching low-weight codewords)")
        spec = shorten(spec, alphas)
    return spec


def _dmin_status(h) -> str:
    low = find_low_weight_codewords(h, 4)
    if not low:
        return "d_min >= 6 (no codeword of weight <= 4)"
    w = min(len(c) for c in low)
    return f"d_min = {w} ({sum(len(c) == w for c in low)} codewords of weight {w}, {len(low)} of weight <= 4)"


# -- subcommands -------------------------------------------------------------------


def cmd_construct(args) -> int:
    spec = _resolve_code(args)
    _log(spec.dumps())
    h = build_order_s(spec)
    k = build_encoder(h).k
    print(f"n={h.cols} k={k} r={h.rows} rate={k / h.cols:.6f}")
    print(_dmin_status(h))
    if args.out:
        spec.save(args.out + ".spec")
        h.save(args.out + ".mat")
        print(f"wrote {args.out}.spec {args.out}.mat")
    return 0


def cmd_analyze(args) -> int:
    t = args.t if args.t is not None else CodeSpec.load(args.spec).t if args.spec else None
    if t is None:
        raise UsageError("a code is required: --spec FILE or --t T")
    if args.wmax < 4 or args.wmax % 2:
        raise UsageError("--wmax must be even and >= 4")
    _log(f"t={t} n={4 * t * t} mode={args.mode} wmax={args.wmax} pairwise={args.pairwise}")
    if args.mode == "ensemble":
        spec = weightdist.ensemble_spectrum(t, args.wmax, args.pairwise)
    elif args.mode == "bound":
        spec = weightdist.base_bound_spectrum(t, args.wmax, args.pairwise)
    else:
        spec = weightdist.WeightSpectrum()
        for m in range(4, args.wmax + 1, 2):
            spec.set(m, weightdist.irreducible_count(t, m), weightdist.EXACT)
    _emit(_spectrum_csv(spec), args.out)
    return 0


def _spectrum_csv(spec: weightdist.WeightSpectrum) -> str:
    # exact fractions are printed as floats; integers stay integers
    out = weightdist.WeightSpectrum()
    for w in spec.weights:
        v = spec.value(w)
        out.set(w, v if isinstance(v, int) else float(v), spec.kind(w))
    return out.to_csv()


def cmd_oracle(args) -> int:
    spec = _resolve_code(args)
    h = build_order_s(spec)
    _log(spec.dumps())
    k = build_encoder(h).k
    if k > weightdist.MAX_EXHAUSTIVE_DIMENSION:
        raise RuntimeError(f"dimension {k} exceeds the exhaustive limit {weightdist.MAX_EXHAUSTIVE_DIMENSION}")
    _emit(weightdist.enumerate_exhaustive(h).to_csv(), args.out)
    return 0


def cmd_bound(args) -> int:
    spec = _resolve_code(args)
    wt = args.wt if args.wt is not None else (20 if args.channel == "bec" else 30)
    alphas = {4: args.alpha4, 6: args.alpha6}
    cfg = bounds.BoundConfig(wt=wt, d=args.d, alphas=alphas)
    avg = weightdist.ensemble_spectrum(spec.t, wt)
    rate = prepare(spec).rate if args.channel == "awgn" else None
    _log(spec.dumps())
    _log(f"channel={args.channel} grid={','.join(repr(g) for g in args.grid)} wt={wt} d={args.d} "
         f"alphas={alphas} ensemble_n={4 * spec.t * spec.t}" + (f" rate={rate:.6f}" if rate else ""))
    lines = ["param,bound"]
    for g in args.grid:
        if args.channel == "bec":
            val = bounds.ensemble_bound_bec(cfg, avg, g)
        else:
            val = bounds.ensemble_bound_awgn(cfg, avg, bounds.snr_db_to_sigma(g, rate))
        lines.append(f"{g!r},{val!r}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    spec = _resolve_code(args)
    try:
        if args.channel == "bec":
            dec = BecConfig(max_list=args.max_list or 1024, lambda_it=args.lambda_it)
        elif args.min_sum:
            dec = SoftConfig.min_sum(args.min_sum, beta=args.beta)
        else:
            dec = SoftConfig(beta=args.beta, iters_per_stage=args.iters_per_stage, max_stages=args.max_stages,
                             max_list=args.max_list or 2**16)
        cfg = SimConfig(spec, args.channel, args.grid, dec, trials=args.trials, seed=args.sim_seed,
                        max_errors=args.max_errors, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _log(cfg.describe())

    def progress(rec):
        _log(f"param={rec.param!r} trials={rec.trials} errors={rec.block_errors} bler={rec.bler:.3e} "
             f"{rec.seconds:.1f}s")

    records = run_grid(cfg, progress)
    _emit(records_to_csv(records), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fdpc", description="Fair-density parity-check codes: construction, "
                                 "weight analysis, union bounds and list decoding simulation.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code, report n, k and low-weight status")
    _add_code_args(p, with_file=False)
    p.add_argument("--out", help="write OUT.spec and OUT.mat")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="weight spectrum: ensemble averages, base bounds or loop counts")
    p.add_argument("--spec")
    p.add_argument("--t", type=_int_at_least(2))
    p.add_argument("--mode", choices=("ensemble", "bound", "irreducible"), default="ensemble")
    p.add_argument("--wmax", type=int, default=20)
    p.add_argument("--pairwise", action="store_true", help="use the tighter bound for weights >= 8")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", help="exhaustive weight spectrum (dimension <= 26)")
    _add_code_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bound", help="ensemble union bound over a parameter grid")
    _add_code_args(p)
    p.add_argument("--channel", choices=("bec", "awgn"), required=True)
    p.add_argument("--grid", type=parse_grid, required=True, help="erasure probabilities or Eb/N0 in dB")
    p.add_argument("--wt", type=int, help="truncation weight (default 20 bec, 30 awgn)")
    p.add_argument("--d", type=_int_at_least(2), default=3)
    p.add_argument("--alpha4", type=_int_at_least(0), default=1)
    p.add_argument("--alpha6", type=_int_at_least(0), default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", help="Monte Carlo block/bit error rates")
    _add_code_args(p)
    p.add_argument("--channel", choices=("bec", "awgn"), required=True)
    p.add_argument("--grid", type=parse_grid, required=True, help="erasure probabilities or Eb/N0 in dB")
    p.add_argument("--trials", type=_int_at_least(1), required=True)
    p.add_argument("--sim-seed", type=_int_at_least(0), default=1, help="master seed for messages and noise")
    p.add_argument("--max-errors", type=_int_at_least(0), default=200, help="stop a point after this many block errors (0: never)")
    p.add_argument("--workers", type=_int_at_least(1), default=1)
    p.add_argument("--max-list", type=_int_at_least(1), help="list cap (default 1024 bec, 65536 awgn)")
    p.add_argument("--lambda-it", type=_int_at_least(1), default=4, help="bec iterations per stage")
    p.add_argument("--beta", type=float, default=0.05)
    p.add_argument("--iters-per-stage", type=_int_at_least(1), default=4)
    p.add_argument("--max-stages", type=_int_at_least(1), default=16)
    p.add_argument("--min-sum", type=_int_at_least(1), metavar="ITERS",
                   help="single-path weighted min-sum with this many iterations")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.error(str(exc))
    except (RuntimeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
