"""Command-line interface.

Subcommands: run-experiment (power sweep -> CSV + manifest + figure),
convergence-trace (single-draw objective trace -> JSON + figure),
calibrate-delta (quantizer step calibration -> JSON), sesd-selftest
(oracle-equivalence sweep).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .alphabets import calibrate_delta
from .harness import (
    ExperimentSpec,
    calibration_samples,
    convergence_trace,
    load_spec,
    paper_scale_spec,
    run_experiment,
    write_outputs,
)
from .sesd import selftest


def _load_or_default(path: str | None) -> ExperimentSpec:
    return load_spec(path) if path else ExperimentSpec()


def _cmd_run_experiment(args) -> int:
    spec = _load_or_default(args.spec)
    if args.full_scale:
        spec = paper_scale_spec(spec)
        print("warning: full-scale scenario selected; expect a long run", file=sys.stderr)
    rows, manifest = run_experiment(spec)
    paths = write_outputs(rows, manifest, args.out, figures=not args.no_figures)
    print(f"wrote {len(rows)} rows -> {paths['csv']}")
    if manifest["failures"]:
        print(f"{len(manifest['failures'])} failed runs recorded in the manifest", file=sys.stderr)
    return 0


def _cmd_convergence_trace(args) -> int:
    spec = _load_or_default(args.spec)
    trace = convergence_trace(spec, args.alg, seed=args.seed)
    text = json.dumps(trace, indent=2, sort_keys=True)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        json_path = os.path.join(args.out, f"trace_alg{args.alg}_seed{trace['seed']}.json")
        with open(json_path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        from .plots import render_trace_figure

        fig_path = json_path.replace(".json", ".png")
        render_trace_figure(trace, fig_path)
        print(f"wrote {json_path} and {fig_path}")
    else:
        print(text)
    return 0


def _cmd_calibrate_delta(args) -> int:
    if args.samples:
        data = np.loadtxt(args.samples, delimiter=",", ndmin=2)
        samples = data[:, 0] + 1j * data[:, 1] if data.shape[1] >= 2 else data[:, 0].astype(complex)
        n = samples.size
    else:
        spec = _load_or_default(args.spec)
        samples = calibration_samples(spec)
        n = samples.size
    delta = calibrate_delta(samples, args.q)
    print(json.dumps({"q": args.q, "delta": delta, "samples": int(n)}, sort_keys=True))
    return 0


def _cmd_sesd_selftest(args) -> int:
    passes, fails = selftest(args.instances, seed=args.seed)
    print(f"sesd selftest: {passes} passed, {fails} failed ({args.instances} instances)")
    return 0 if fails == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridsd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run-experiment", help="power sweep over seeded channel draws")
    p_run.add_argument("--spec", help="experiment spec JSON (defaults to the desk-scale scenario)")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--full-scale", action="store_true", help="use the 64-antenna scenario")
    p_run.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    p_run.set_defaults(func=_cmd_run_experiment)

    p_tr = sub.add_parser("convergence-trace", help="single-draw objective trace")
    p_tr.add_argument("--alg", type=int, choices=(1, 2), required=True,
                      help="1 = unquantized digital stage, 2 = fronthaul-limited")
    p_tr.add_argument("--seed", type=int, default=None)
    p_tr.add_argument("--spec", help="experiment spec JSON")
    p_tr.add_argument("--out", help="directory for JSON + figure (default: print JSON)")
    p_tr.set_defaults(func=_cmd_convergence_trace)

    p_cal = sub.add_parser("calibrate-delta", help="calibrate the quantizer step size")
    p_cal.add_argument("--spec", help="experiment spec JSON for the calibration batch")
    p_cal.add_argument("--q", type=int, required=True, help="label bits per real dimension")
    p_cal.add_argument("--samples", help="CSV of samples (real,imag per line) instead of a spec")
    p_cal.set_defaults(func=_cmd_calibrate_delta)

    p_st = sub.add_parser("sesd-selftest", help="sphere decoder vs brute force sweep")
    p_st.add_argument("--instances", type=int, default=200)
    p_st.add_argument("--seed", type=int, default=0)
    p_st.set_defaults(func=_cmd_sesd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
