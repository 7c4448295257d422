"""Command-line interface.

Subcommands: ``simulate`` (one burst to file), ``estimate`` (burst file to
joint estimates), ``sweep`` (Monte-Carlo CSV), ``crlb`` (bound CSV) and
``selftest``. Exit codes: 0 success, 2 configuration error, 3 numerical
degeneracy, 4 I/O failure.
"""

import argparse
import sys

import numpy as np

from . import configio, harness
from .burstio import load_burst, save_burst
from .errors import (BeamsyncError, BurstIOError, ConfigError, ParameterError)
from .joint import joint_estimate
from .synthesis import draw_ground_truth, substream, synthesize_burst

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _load_all(path):
    text = configio.read_config_file(path) if path else ""
    config = configio.scenario_from_text(text)
    points, trials, methods, seed, config = configio.sweep_from_text(text, config)
    cp_cfg = configio.baselines_from_text(text)
    return config, points, trials, methods, seed, cp_cfg


def _cmd_simulate(args):
    config, _, _, _, seed, cp_cfg = _load_all(args.config)
    if args.sinr is not None:
        from dataclasses import replace
        config = replace(config, target_sinr_db=args.sinr)
    if args.seed is not None:
        seed = args.seed
    truth = draw_ground_truth(config, substream(seed, args.trial, 0))
    if args.cp:
        from .baselines import synthesize_cp_burst
        burst = synthesize_cp_burst(config, truth, substream(seed, args.trial, 2), cp_cfg)
    else:
        burst = synthesize_burst(config, truth, substream(seed, args.trial, 1))
    save_burst(burst, args.out)
    print(f"wrote {burst.samples.shape[0]} samples to {args.out} (+{args.out}.hdr)")
    return EXIT_OK


def _result_text(result, truth):
    lines = ["[estimate]"]
    lines.append(f"converged = {result.converged}")
    lines.append(f"iterations = {result.iterations}")
    lines.append(f"epsilon = {result.epsilon!r}")
    lines.append("omegas_hat = " + ",".join(repr(float(w)) for w in result.omegas_hat))
    lines.append("mus_hat = " + ",".join(repr(float(m)) for m in result.mus_hat))
    lines.append("trace = " + ",".join(repr(float(t)) for t in result.iteration_trace))
    re_rows = [",".join(repr(float(v)) for v in row) for row in result.alphas_hat.real]
    im_rows = [",".join(repr(float(v)) for v in row) for row in result.alphas_hat.imag]
    lines.append("alphas_hat_real = " + ";".join(re_rows))
    lines.append("alphas_hat_imag = " + ";".join(im_rows))
    if truth is not None:
        lines.append("")
        lines.append("[reference]")
        lines.append("omegas_true = " + ",".join(repr(float(w)) for w in truth.omegas))
        err = np.abs(result.omegas_hat - truth.omegas)
        lines.append("cfo_abs_error = " + ",".join(repr(float(e)) for e in err))
    return "\n".join(lines) + "\n"


def _cmd_estimate(args):
    burst = load_burst(args.burst)
    result = joint_estimate(burst, epsilon=args.epsilon, max_iter=args.max_iter)
    text = _result_text(result, burst.truth)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise BurstIOError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_sweep(args):
    config, points, trials, methods, seed, cp_cfg = _load_all(args.config)
    spec = harness.SweepSpec(
        sinr_points_db=tuple(points), trials=trials, methods=tuple(methods),
        base_config=config, seed=seed, cp_config=cp_cfg)
    rows = harness.run_sweep(spec, workers=args.workers)
    harness.emit_csv(rows, args.out, include_wall_time=args.timing)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _cmd_crlb(args):
    config, points, _, _, seed, _ = _load_all(args.config)
    reports = harness.crlb_rows(config, points, seed)
    lines = ["gamma0,gamma1,r_mag,bound"]
    for rep in reports:
        lines.append(f"{rep.gamma0!r},{rep.gamma1!r},{rep.r_mag!r},{rep.bound!r}")
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise BurstIOError(f"cannot write CSV {args.out}: {exc}") from exc
    print(f"wrote {len(reports)} rows to {args.out}")
    return EXIT_OK


def _cmd_selftest(args):
    from .selftest import run
    return run()


def build_parser():
    parser = argparse.ArgumentParser(
        prog="beamsync",
        description="Beam-swept synchronization-burst simulator and estimator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize one burst to a file")
    p.add_argument("--config", help="INI config file (defaults used if omitted)")
    p.add_argument("--out", required=True, help="output burst path")
    p.add_argument("--sinr", type=float, help="override target SINR (dB)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--trial", type=int, default=0, help="trial substream index")
    p.add_argument("--cp", action="store_true", help="cyclic-prefix wrapped burst")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="joint estimation on a burst file")
    p.add_argument("--burst", required=True, help="burst path (expects .hdr sidecar)")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=20)
    p.add_argument("--out", help="write the result here instead of stdout")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("sweep", help="Monte-Carlo MAE/NMSE sweep to CSV")
    p.add_argument("--config", help="INI config file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true",
                   help="include the wall_time_s column (breaks byte determinism)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("crlb", help="bound reports per SINR point to CSV")
    p.add_argument("--config", help="INI config file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_crlb)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BurstIOError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BeamsyncError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
