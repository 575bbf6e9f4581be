"""Seeded Monte Carlo experiment runner with CSV/JSON emission.

An experiment sweeps transmit power over seeded channel draws, runs a set
of schemes on each draw, and writes one CSV row per
(trial, power, scheme) plus a JSON manifest echoing the full
configuration. Per-trial seeds are master_seed + trial index; calibration
channels use master_seed + CALIBRATION_SEED_OFFSET + draw index. Results
are bit-reproducible for a fixed spec and master seed (wall_ms aside).
"""

from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .alphabets import build_phase_alphabet, build_quant_labels, calibrate_delta
from .altmin import digital_step, init_analog, run_altmin
from .baselines import SCHEMES, run_scheme
from .channel import FadingParams, SystemConfig, gen_channel
from .errors import UnknownScheme
from .fronthaul import run_fronthaul_altmin
from .wmmse import wmmse_solve

CSV_COLUMNS = ("trial", "power_dbm", "scheme", "sum_rate_bits_s_hz", "iterations", "wall_ms", "delta_used", "seed")
CALIBRATION_SEED_OFFSET = 100_000
WORKERS_ENV = "HYBRIDSD_WORKERS"

PAPER_SCALE = dict(n_t=64, m_t=8, k=2, s=16)


@dataclass(frozen=True)
class ExperimentSpec:
    system: SystemConfig = field(default_factory=SystemConfig)
    fading: FadingParams = field(default_factory=FadingParams)
    schemes: tuple = ("fully-digital", "sd-hybrid", "np-both")
    phase_bits: int = 1
    label_bits: int | None = 1
    power_sweep_dbm: tuple = (10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
    trials: int = 200
    master_seed: int = 1
    delta_mode: str = "calibrated"  # or "fixed"
    delta_fixed: float | None = None
    calibration_draws: int = 50
    conv_tol: float = 1e-4
    max_outer: int = 50

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not self.power_sweep_dbm:
            raise ValueError("power sweep is empty")
        for tag in self.schemes:
            if tag not in SCHEMES:
                raise UnknownScheme(f"unknown scheme tag {tag!r}")
        if self.delta_mode not in ("calibrated", "fixed"):
            raise ValueError(f"delta_mode must be 'calibrated' or 'fixed', got {self.delta_mode!r}")
        if self.delta_mode == "fixed" and not (self.delta_fixed and self.delta_fixed > 0):
            raise ValueError("fixed delta_mode needs a positive delta_fixed")


@dataclass(frozen=True)
class ResultRow:
    trial: int
    power_dbm: float
    scheme: str
    sum_rate_bits_s_hz: float
    iterations: int
    wall_ms: float
    delta_used: float | None
    seed: int


def load_spec(path) -> ExperimentSpec:
    """Read an experiment spec from its JSON file (schema in the README)."""
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    return spec_from_dict(raw)


def spec_from_dict(raw: dict) -> ExperimentSpec:
    system = SystemConfig(**raw.get("system", {}))
    fading_kwargs = dict(raw.get("fading", {}))
    for key in ("aod_range", "dist_range_m"):
        if key in fading_kwargs:
            fading_kwargs[key] = tuple(fading_kwargs[key])
    fading = FadingParams(**fading_kwargs)
    delta = raw.get("delta", "calibrated")
    if isinstance(delta, str):
        mode, fixed = delta, None
    else:
        mode, fixed = "fixed", float(delta)
    kwargs = dict(
        system=system,
        fading=fading,
        schemes=tuple(raw.get("schemes", ("fully-digital", "sd-hybrid", "np-both"))),
        phase_bits=int(raw.get("phase_bits", 1)),
        label_bits=None if raw.get("label_bits", 1) is None else int(raw.get("label_bits", 1)),
        power_sweep_dbm=tuple(float(p) for p in raw.get("power_sweep_dbm", (25.0,))),
        trials=int(raw.get("trials", 200)),
        master_seed=int(raw.get("master_seed", 1)),
        delta_mode=mode,
        delta_fixed=fixed,
    )
    for opt in ("calibration_draws", "conv_tol", "max_outer"):
        if opt in raw:
            kwargs[opt] = raw[opt]
    return ExperimentSpec(**kwargs)


def spec_to_dict(spec: ExperimentSpec) -> dict:
    d = asdict(spec)
    d["system"] = asdict(spec.system)
    d["fading"] = asdict(spec.fading)
    return d


def desk_scale_spec(**overrides) -> ExperimentSpec:
    """Default scenario sized for fast runs (N_T=16, M_T=4, K=2, S=4)."""
    return ExperimentSpec(**overrides)


def paper_scale_spec(base: ExperimentSpec | None = None) -> ExperimentSpec:
    """Full-scale scenario (N_T=64, M_T=8, K=2, S=16); hours, not minutes."""
    base = base or ExperimentSpec()
    return replace(base, system=replace(base.system, **PAPER_SCALE))


def calibration_samples(spec: ExperimentSpec, power_dbm: float | None = None) -> np.ndarray:
    """Unquantized digital precoder entries from a batch of channel draws.

    Runs the unconstrained hybrid design on calibration channels at the
    given power (defaults to the scenario's base power) and collects the
    digital entries the quantizer will face. The channel draws are shared
    across powers (fixed calibration seeds).
    """
    cfg = spec.system if power_dbm is None else replace(spec.system, p_total_dbm=power_dbm)
    alphabet = build_phase_alphabet(spec.phase_bits)
    entries = []
    for i in range(spec.calibration_draws):
        rng = np.random.default_rng(spec.master_seed + CALIBRATION_SEED_OFFSET + i)
        h = gen_channel(cfg, spec.fading, rng)
        f_fd = wmmse_solve(h, cfg).precoder
        f_rf = init_analog(f_fd, cfg.m_t, alphabet)
        f_bb = digital_step(f_rf, f_fd)
        entries.append(f_bb.ravel())
    return np.concatenate(entries)


def resolve_delta(spec: ExperimentSpec) -> dict | None:
    """Quantizer step per sweep power, or None when no scheme needs labels.

    The label distribution tracks the precoder scale, which moves with the
    power budget, so calibration runs once per power point (on the shared
    calibration draws). Fixed mode applies one value everywhere.
    """
    if spec.label_bits is None:
        return None
    uses_labels = any(tag == "sd-hybrid" or _needs_labels(tag) for tag in spec.schemes)
    if not uses_labels:
        return None
    if spec.delta_mode == "fixed":
        return {float(p): float(spec.delta_fixed) for p in spec.power_sweep_dbm}
    return {
        float(p): calibrate_delta(calibration_samples(spec, p), spec.label_bits)
        for p in spec.power_sweep_dbm
    }


def _needs_labels(tag: str) -> bool:
    return tag in ("sd-analog-np-digital", "np-analog-sd-digital", "np-both")


def _run_trial(args) -> tuple[list, list]:
    spec, trial, deltas = args
    seed = spec.master_seed + trial
    rng = np.random.default_rng(seed)
    h = gen_channel(spec.system, spec.fading, rng)
    alphabet = build_phase_alphabet(spec.phase_bits)
    rows = []
    failures = []
    for power in spec.power_sweep_dbm:
        cfg = replace(spec.system, p_total_dbm=power)
        delta = None if deltas is None else deltas.get(float(power))
        labels = None
        if delta is not None and spec.label_bits is not None:
            labels = build_quant_labels(spec.label_bits, delta)
        f_fd = wmmse_solve(h, cfg).precoder  # shared across schemes
        for tag in spec.schemes:
            tag_labels = labels if (tag == "sd-hybrid" and spec.label_bits is not None) or _needs_labels(tag) else None
            start = time.perf_counter()
            try:
                run = run_scheme(
                    tag, h, cfg, alphabet, tag_labels,
                    f_fd=f_fd, conv_tol=spec.conv_tol, max_outer=spec.max_outer,
                )
            except Exception as exc:  # failed trials must not abort the sweep
                failures.append({"trial": trial, "power_dbm": power, "scheme": tag, "error": f"{type(exc).__name__}: {exc}"})
                continue
            wall_ms = 1000.0 * (time.perf_counter() - start)
            rows.append(
                ResultRow(
                    trial=trial,
                    power_dbm=power,
                    scheme=tag,
                    sum_rate_bits_s_hz=run.report.sum_rate,
                    iterations=run.iterations,
                    wall_ms=wall_ms,
                    delta_used=delta if tag_labels is not None else None,
                    seed=seed,
                )
            )
    return rows, failures


def run_experiment(spec: ExperimentSpec) -> tuple[list, dict]:
    """Execute the sweep; returns (rows, manifest).

    Rows are sorted by (trial, power, scheme). Worker count comes from the
    HYBRIDSD_WORKERS environment variable (default 1, serial).
    """
    deltas = resolve_delta(spec)
    jobs = [(spec, t, deltas) for t in range(spec.trials)]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    rows: list[ResultRow] = []
    failures: list[dict] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for trial_rows, trial_failures in pool.map(_run_trial, jobs):
                rows.extend(trial_rows)
                failures.extend(trial_failures)
    else:
        for job in jobs:
            trial_rows, trial_failures = _run_trial(job)
            rows.extend(trial_rows)
            failures.extend(trial_failures)
    rows.sort(key=lambda r: (r.trial, r.power_dbm, r.scheme))
    manifest = {
        "spec": spec_to_dict(spec),
        "version": __version__,
        "delta_per_power_dbm": None if deltas is None else {repr(p): d for p, d in sorted(deltas.items())},
        "seed_derivation": "trial seed = master_seed + trial; calibration seed = master_seed + 100000 + draw",
        "rows": len(rows),
        "failures": failures,
        "csv_columns": list(CSV_COLUMNS),
    }
    return rows, manifest


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.trial,
                repr(float(r.power_dbm)),
                r.scheme,
                repr(float(r.sum_rate_bits_s_hz)),
                r.iterations,
                repr(float(r.wall_ms)),
                "" if r.delta_used is None else repr(float(r.delta_used)),
                r.seed,
            ]
        )
    return buf.getvalue()


def write_outputs(rows, manifest, out_dir, *, figures: bool = True) -> dict:
    """Write results.csv + manifest.json (+ figures) into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "csv": os.path.join(out_dir, "results.csv"),
        "manifest": os.path.join(out_dir, "manifest.json"),
    }
    with open(paths["csv"], "w", encoding="utf-8") as f:
        f.write(rows_to_csv(rows))
    with open(paths["manifest"], "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    if figures and rows:
        from .plots import render_rate_figure

        paths["figure"] = os.path.join(out_dir, "sum_rate_vs_power.png")
        render_rate_figure(rows, paths["figure"])
    return paths


def convergence_trace(
    spec: ExperimentSpec,
    which: int,
    *,
    seed: int | None = None,
) -> dict:
    """Objective-per-half-step trace of one design on a single channel draw.

    which = 1 selects the unquantized-digital design, which = 2 the
    fronthaul-limited one. Includes the achieved sum rate after
    convergence.
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    seed = spec.master_seed if seed is None else seed
    rng = np.random.default_rng(seed)
    h = gen_channel(spec.system, spec.fading, rng)
    alphabet = build_phase_alphabet(spec.phase_bits)
    cfg = spec.system
    n0 = cfg.noise_power_mw
    from .rates import sum_rate

    if which == 1:
        hp, trace = run_altmin(h, cfg, alphabet, conv_tol=spec.conv_tol, max_outer=spec.max_outer)
        extra = {}
    else:
        if spec.label_bits is None:
            raise ValueError("fronthaul design needs label_bits / delta")
        if spec.delta_mode == "fixed":
            delta = float(spec.delta_fixed)
        else:
            delta = calibrate_delta(calibration_samples(spec), spec.label_bits)
        labels = build_quant_labels(spec.label_bits, delta)
        hp, trace = run_fronthaul_altmin(
            h, cfg, alphabet, labels, conv_tol=spec.conv_tol, max_outer=spec.max_outer
        )
        extra = {
            "mu_per_iter": [list(map(float, m)) for m in trace.mu_per_iter],
            "power_per_iter": [list(map(float, pw)) for pw in trace.power_per_iter],
            "delta_used": delta,
        }
    report = sum_rate(h, hp.effective(), n0)
    out = {
        "design": which,
        "seed": seed,
        "objective_per_halfstep": [float(v) for v in trace.objectives],
        "iterations": trace.iterations,
        "converged": trace.converged,
        "sum_rate_after_convergence": report.sum_rate,
    }
    out.update(extra)
    return out
