"""Command-line front end: ``ppclab run|gen|energy|paircorr|variance|selberg-check|watt-check``."""
import argparse
import json
import os
import sys

from ppclab import __version__
from ppclab._backend import set_threads
from ppclab.errors import ConfigError, DomainError, SequenceFileError
from ppclab.expcli.config import load_config, parse_config
from ppclab.expcli.runner import run_experiment
from ppclab.sequences import gen_nlog, gen_power, load_sequence, save_sequence

EXIT_OK, EXIT_VALIDATION, EXIT_TASK, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse's own usage errors exit 2, which is reserved for task failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _vectors(text):
    """``"1.6;2.5,3.1"`` -> ``[[1.6], [2.5, 3.1]]``."""
    return [_floats(chunk) for chunk in text.split(";") if chunk.strip()]


def _common(p, out_default="ppclab-out"):
    p.add_argument("--seed", type=int, default=None, help="integer seed for alpha draws")
    p.add_argument("--threads", type=int, default=None, help="worker count (default: all)")
    p.add_argument("--out-dir", default=out_default, help="directory for result files")


def build_parser():
    ap = _Parser(prog="ppclab", description="Pair-correlation and additive-energy experiments.")
    ap.add_argument("--version", action="version", version=f"ppclab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run a JSON experiment config")
    p.add_argument("config")
    _common(p, out_default=None)

    p = sub.add_parser("gen", help="generate a sequence file")
    p.add_argument("--family", choices=["power", "nlog"], required=True)
    p.add_argument("--theta", type=_floats, help="exponents for the power family")
    p.add_argument("--A", type=float, help="log exponent for the nlog family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n0", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("energy", help="joint additive energy over an N grid")
    p.add_argument("--seq", required=True)
    p.add_argument("--gamma", type=_floats, default=None)
    p.add_argument("--subset", type=_ints, default=None, help="0-based columns")
    p.add_argument("--n-grid", type=_ints, required=True)
    _common(p)

    p = sub.add_parser("paircorr", help="pair correlation of dilated sequences")
    p.add_argument("--seq", required=True)
    p.add_argument("--alpha-samples", type=int, default=None)
    p.add_argument("--alpha", type=_vectors, default=None,
                   help="fixed dilations, e.g. '1.618' or '0.3,0.7;1.2,2.1'")
    p.add_argument("--s-grid", type=_floats, required=True)
    p.add_argument("--n-grid", type=_ints, default=None, help="default: all rows")
    p.add_argument("--norm", choices=["sup", "euclid"], default="sup")
    _common(p)

    p = sub.add_parser("variance", help="Monte Carlo variance of the smoothed pair statistic")
    p.add_argument("--seq", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--n-grid", type=_ints, required=True)
    _common(p)

    p = sub.add_parser("selberg-check", help="verify the Selberg sandwich at one (K, s, scale)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--scale", type=float, required=True)
    p.add_argument("--grid", type=int, default=10000)
    _common(p)

    p = sub.add_parser("watt-check", help="solution count versus scaled integral")
    p.add_argument("--A", type=_ints, default=list(range(1, 9)))
    p.add_argument("--M", type=_ints, default=[1, 2])
    p.add_argument("--delta", type=_floats, default=[0.5, 0.25, 0.125])
    _common(p)
    return ap


def _n_rows(path):
    return load_sequence(path).N


def _config_for(args):
    """Translate an ad-hoc subcommand into the equivalent experiment config."""
    seq = {"family": "file", "path": getattr(args, "seq", None)}
    out = {"dir": args.out_dir}
    if args.command == "energy":
        return {"sequence": seq, "tasks": ["energy"], "N_grid": args.n_grid,
                "gamma": args.gamma, "subset": args.subset, "output": out}
    if args.command == "paircorr":
        grid = args.n_grid or [_n_rows(args.seq)]
        if args.alpha is not None:
            alpha = {"measure": "fixed", "values": args.alpha}
        else:
            alpha = {"measure": "mu", "samples": args.alpha_samples, "seed": args.seed}
        return {"sequence": seq, "tasks": ["paircorr"], "N_grid": grid, "s_grid": args.s_grid,
                "norm": args.norm, "alpha": alpha, "output": out}
    if args.command == "variance":
        return {"sequence": seq, "tasks": ["variance"], "N_grid": args.n_grid, "r": args.r,
                "variance": {"s": args.s},
                "alpha": {"measure": "mu", "samples": args.samples, "seed": args.seed},
                "output": out}
    placeholder = {"sequence": {"family": "power", "theta": [1.0]}, "N_grid": [1], "output": out}
    if args.command == "selberg-check":
        return {**placeholder, "tasks": ["selberg-check"],
                "selberg": {"k": args.k, "s": args.s, "scale": args.scale, "grid": args.grid}}
    return {**placeholder, "tasks": ["watt-check"],
            "watt": {"A": args.A, "M": args.M, "delta": args.delta}}


def _report(manifest, out):
    for name, rec in manifest.tasks.items():
        print(f"[{rec.status}] {name}" + (f": {rec.error}" if rec.error else ""))
        for f in rec.files:
            path = os.path.join(out, f)
            print(f"    {path}")
            if f in ("energy.csv", "variance.csv", "watt.csv") or f == "selberg.json":
                with open(path, encoding="utf-8") as fh:
                    print("      " + fh.read().strip().replace("\n", "\n      "))
            elif f == "energy.json":
                with open(path, encoding="utf-8") as fh:
                    side = json.load(fh)
                if side.get("slope") is not None:
                    print(f"      slope={side['slope']:.4f}±{side['slope_stderr']:.4f}")
    print(f"manifest: {os.path.join(out, 'manifest.json')}")


def _dispatch(args):
    set_threads(args.threads if hasattr(args, "threads") else None)
    if args.command == "gen":
        if args.family == "power":
            if not args.theta:
                raise DomainError("--theta is required for the power family")
            seq = gen_power(args.theta, args.n, n0=1 if args.n0 is None else args.n0)
        else:
            if args.A is None:
                raise DomainError("--A is required for the nlog family")
            seq = gen_nlog(args.A, args.n, n0=2 if args.n0 is None else args.n0)
        save_sequence(seq, args.out)
        print(f"wrote {seq.N} x {seq.d} sequence to {args.out}")
        return EXIT_OK

    if args.command == "run":
        cfg = load_config(args.config)
        if args.seed is not None:
            raw = cfg.model_dump(mode="json")
            raw["alpha"]["seed"] = args.seed
            cfg = parse_config(raw)
    else:
        cfg = parse_config(_config_for(args))
    out = args.out_dir or cfg.output.dir
    manifest = run_experiment(cfg, out)
    _report(manifest, out)
    return manifest.exit_code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as err:
        print("invalid configuration:", file=sys.stderr)
        for p in err.problems:
            print(f"  - {p}", file=sys.stderr)
        return EXIT_VALIDATION
    except SequenceFileError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO if err.code == "missing" else EXIT_VALIDATION
    except (DomainError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
