"""Command line entry point: ``simulate``, ``sweep`` and ``verify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .harness import RECEIVERS, SimConfig, run_experiment, sweep, write_csv
from .numerics import InvalidArgumentError

LAMBDA_HELP = ("relaxation for the SDK receiver: constant:<value>, sanchez "
               "(0.5*(K/M)*ln(4*M*SNR), natural log) or proposed "
               "(min(sqrt(K*SNR/(t*m)), 1)); default %(default)s")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--M", type=int, default=128, help="antennas (default %(default)s)")
    p.add_argument("--K", type=int, default=16, help="users (default %(default)s)")
    p.add_argument("--D", type=int, default=None,
                   help="effective users per antenna; omit for a stationary channel")
    p.add_argument("--snr-db", type=float, default=0.0, help="SNR = p/sigma^2 in dB")
    p.add_argument("--cycles", type=int, default=1, help="cycles T (default %(default)s)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lam", default="proposed", help=LAMBDA_HELP)
    p.add_argument("--topology", default="chain",
                   help="chain, tree:SxN, or a JSON file {\"subarrays\": [...], \"weights\": [...]}")
    p.add_argument("--random-root", action="store_true",
                   help="draw the chain root with probability proportional to ||h_m||^2")
    p.add_argument("--noiseless", action="store_true", help="set the noise power to zero")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--out", required=True, help="output CSV path ('-' for stdout)")


def parse_values(text: str) -> list[float]:
    """``a:b:step`` (inclusive) or a comma-separated list."""
    if ":" in text:
        parts = [float(v) for v in text.split(":")]
        if len(parts) == 2:
            parts.append(1.0)
        if len(parts) != 3 or parts[2] == 0:
            raise InvalidArgumentError(f"bad range {text!r}, expected a:b:step")
        a, b, step = parts
        vals = np.arange(a, b + step / 2 if step > 0 else b - abs(step) / 2, step)
        return [float(v) for v in vals]
    return [float(v) for v in text.split(",") if v.strip()]


def _config(args, receiver: str, lam: str) -> SimConfig:
    return SimConfig(receiver=receiver, M=args.M, K=args.K, D=args.D, snr_db=args.snr_db,
                     T=args.cycles, lam=lam, topology=args.topology, trials=args.trials,
                     random_root=args.random_root, seed=args.seed, noiseless=args.noiseless)


def _emit(results, out: str) -> None:
    if out == "-":
        write_csv(results, "/dev/stdout")
    else:
        write_csv(results, out)


def cmd_simulate(args) -> int:
    res = run_experiment(_config(args, args.receiver, args.lam), args.workers)
    _emit([res], args.out)
    return 0


def cmd_sweep(args) -> int:
    receivers = [r.strip() for r in args.receiver.split(",")]
    lams = [s.strip() for s in args.lam.split(",")]
    values = parse_values(args.values)
    results = []
    for receiver in receivers:
        for lam in (lams if receiver == "sdk" else lams[:1]):
            results.extend(sweep(_config(args, receiver, lam), args.axis, values, args.workers))
    _emit(results, args.out)
    if args.plot and args.out != "-":
        from .plotting import plot_ber

        from .harness import AXES
        fig = Path(args.out).with_suffix(".png")
        plot_ber(results, AXES[args.axis], fig, title=args.title)
        logging.getLogger(__name__).info("figure written to %s", fig)
    return 0


def cmd_verify(args) -> int:
    targets = ["identity", "theorem1", "costs"] if args.target == "all" else [args.target]
    findings = []
    for target in targets:
        if target == "identity":
            findings += analysis.verify_identity(args.steps, args.seed)
        elif target == "theorem1":
            findings += analysis.verify_theorem1(draws=args.draws, seed=args.seed)
        else:
            findings += analysis.verify_costs()
    for f in findings:
        print(f"{'PASS' if f.passed else 'FAIL'}  {f.name}: {f.measured}")
    return 0 if all(f.passed for f in findings) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dkaczmarz", description="Decentralized Kaczmarz receivers for M-MIMO / XL-MIMO.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="BER of one configuration")
    sim.add_argument("--receiver", choices=RECEIVERS, default="sdk")
    _add_common(sim)
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="BER along one axis; writes CSV and a PNG next to it")
    sw.add_argument("--receiver", default="sdk",
                    help=f"comma-separated subset of {','.join(RECEIVERS)}")
    sw.add_argument("--axis", choices=("snr", "cycles", "D"), required=True)
    sw.add_argument("--values", required=True, help="a:b:step (inclusive) or v1,v2,...")
    sw.add_argument("--no-plot", dest="plot", action="store_false")
    sw.add_argument("--title", default=None)
    _add_common(sw)
    sw.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="numerical audits with a pass/fail report")
    ver.add_argument("target", choices=("theorem1", "identity", "costs", "all"))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--steps", type=int, default=1000, help="fuzzed steps for identity")
    ver.add_argument("--draws", type=int, default=10_000, help="(x, n) draws per channel")
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if hasattr(args, "receiver") and args.command == "sweep":
        bad = [r for r in args.receiver.split(",") if r.strip() not in RECEIVERS]
        if bad:
            return _fail("invalid_argument", f"unknown receiver(s) {bad}")
    try:
        return args.func(args)
    except InvalidArgumentError as exc:
        return _fail("invalid_argument", str(exc))
    except OSError as exc:
        return _fail("io_error", str(exc))


def _fail(kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
