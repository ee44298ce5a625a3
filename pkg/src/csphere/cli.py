"""Command line interface.

Subcommands:

* ``run``     -- execute a benchmark sweep from a spec file (plus flag
                 overrides) and write CSV/JSON results;
* ``bounds``  -- evaluate the analytic lower bounds over an SNR grid;
* ``oracle``  -- brute-force one instance loaded from a JSON file;
* ``report``  -- percent-reduction table against a baseline detector, with
                 figures rendered next to the delimited output.

Exit code 0 on success, 1 on any diagnosed error, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import (
    ConstellationSpec,
    build_spec,
    compare_report,
    emit_csv,
    emit_json,
    load_csv,
    read_spec_file,
    run_experiment,
)
from .channel import radius_alpha
from .bounds import BoundParams, beta_factors, csd_bound, sd_bound
from .constellation import Constellation, avg_intra_sq_distance
from .engine import detect_ml_bruteforce, residual_sq
from .errors import CsphereError


def _pairs_to_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _complex_to_pairs(arr: np.ndarray):
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr).reshape(-1)]


def _cmd_run(args) -> int:
    overrides = {
        "m": args.m,
        "n": args.n,
        "constellation": args.constellation,
        "snr_db": args.snr,
        "trials": args.trials,
        "seed": args.seed,
        "detectors": args.detectors,
        "epsilon": args.epsilon,
        "frozen_radius": True if args.frozen else None,
    }
    if args.spec:
        spec = read_spec_file(args.spec, overrides)
    else:
        spec = build_spec({k: v for k, v in overrides.items() if v is not None})
    result = run_experiment(spec, workers=args.workers)
    emit_csv(result.rows, args.out)
    print(f"wrote {len(result.rows)} rows to {args.out}")
    if result.resampled_channels:
        print(f"resampled {result.resampled_channels} rank-deficient channel draws", file=sys.stderr)
    if args.json:
        emit_json(result.rows, args.json)
        print(f"wrote JSON mirror to {args.json}")
    return 0


def _cmd_bounds(args) -> int:
    if args.constellation:
        c = ConstellationSpec.parse(args.constellation).build()
        e_intra = avg_intra_sq_distance(c)
        L = c.size
    else:
        if args.L is None:
            raise CsphereError("bounds needs --constellation or --L")
        L = args.L
        e_intra = 2.0
    if args.e_intra is not None:
        e_intra = args.e_intra
    alpha = radius_alpha(args.n, args.epsilon)
    lines = ["snr_db,alpha,e_intra,beta_c,csd_bound,sd_bound"]
    for snr in args.snr:
        rho = 10.0 ** (snr / 10.0)
        params = BoundParams(n=args.n, L=L, alpha=alpha, rho=rho, e_intra=e_intra)
        beta_c, _ = beta_factors(params, args.n)
        lines.append(
            f"{snr!r},{alpha!r},{e_intra!r},{beta_c!r},"
            f"{csd_bound(params)!r},{sd_bound(params)!r}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote bounds to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_oracle(args) -> int:
    with open(args.instance, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    h = _pairs_to_complex(payload["H"])
    r = _pairs_to_complex(payload["r"])
    cdesc = payload["constellation"]
    if isinstance(cdesc, str):
        c = ConstellationSpec.parse(cdesc).build()
    else:
        c = Constellation(points=_pairs_to_complex(cdesc["points"]))
    s_hat = detect_ml_bruteforce(h, r, c)
    result = {
        "s_hat": _complex_to_pairs(s_hat),
        "distance_sq": residual_sq(h, r, s_hat),
    }
    text = json.dumps(result, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote oracle result to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_report(args) -> int:
    rows = load_csv(args.results)
    text = compare_report(rows, args.baseline) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote report to {args.out}")
    else:
        sys.stdout.write(text)
    if not args.no_figures:
        from . import plotting

        fig_dir = Path(args.figures) if args.figures else Path(args.results).resolve().parent
        fig_dir.mkdir(parents=True, exist_ok=True)
        complexity = fig_dir / "complexity.png"
        reduction = fig_dir / "reduction.png"
        ser = fig_dir / "ser.png"
        plotting.save_complexity_figure(rows, complexity)
        plotting.save_reduction_figure(rows, args.baseline, reduction)
        plotting.save_ser_figure(rows, ser)
        print(f"wrote figures to {complexity}, {reduction}, {ser}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csphere",
        description="Sphere-decoding benchmark suite for MIMO ML detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a Monte Carlo benchmark sweep")
    p_run.add_argument("--spec", help="experiment spec file (key = value sections)")
    p_run.add_argument("--m", type=int, help="receive antennas")
    p_run.add_argument("--n", type=int, help="transmit antennas")
    p_run.add_argument("--constellation", help="e.g. qam:64, psk:32, star:8,24,32@2,3, file:path")
    p_run.add_argument("--snr", help="comma-separated SNR grid in dB")
    p_run.add_argument("--trials", type=int, help="Monte Carlo trials per SNR point")
    p_run.add_argument("--seed", type=int, help="master seed")
    p_run.add_argument("--detectors", help="comma-separated detector list")
    p_run.add_argument("--epsilon", type=float, help="radius miss probability")
    p_run.add_argument("--frozen", action="store_true", help="fixed-radius mode (no shrink/restart)")
    p_run.add_argument("--workers", type=int, help="worker processes (default: CSPHERE_WORKERS or 1)")
    p_run.add_argument("--out", default="results.csv", help="output CSV path")
    p_run.add_argument("--json", help="optional JSON mirror path")
    p_run.set_defaults(func=_cmd_run)

    p_bounds = sub.add_parser("bounds", help="evaluate analytic complexity lower bounds")
    p_bounds.add_argument("--n", type=int, required=True, help="system dimension")
    p_bounds.add_argument("--L", type=int, help="constellation size (mean intra distance 2)")
    p_bounds.add_argument("--constellation", help="constellation spec to take L and the intra distance from")
    p_bounds.add_argument("--e-intra", type=float, dest="e_intra", help="override mean intra-constellation squared distance")
    p_bounds.add_argument("--snr", type=lambda s: [float(x) for x in s.split(",")], required=True, help="comma-separated SNR grid in dB")
    p_bounds.add_argument("--epsilon", type=float, default=0.01)
    p_bounds.add_argument("--out", help="output path (default stdout)")
    p_bounds.set_defaults(func=_cmd_bounds)

    p_oracle = sub.add_parser("oracle", help="brute-force one instance from a JSON file")
    p_oracle.add_argument("--instance", required=True, help="instance JSON path")
    p_oracle.add_argument("--out", help="output path (default stdout)")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_report = sub.add_parser("report", help="percent-reduction table and figures")
    p_report.add_argument("--results", required=True, help="CSV produced by run")
    p_report.add_argument("--baseline", required=True, help="baseline detector name")
    p_report.add_argument("--out", help="report text path (default stdout)")
    p_report.add_argument("--figures", help="figure directory (default: next to the CSV)")
    p_report.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p_report.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CsphereError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
