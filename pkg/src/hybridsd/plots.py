"""Figure rendering for the report path.

Figures are derived views of the delimited outputs (CSV rows, JSON
traces); the numbers in those files stay the canonical record.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SCHEME_STYLE = {
    "fully-digital": dict(color="k", marker="o"),
    "sd-hybrid": dict(color="tab:blue", marker="s"),
    "np1-hybrid": dict(color="tab:red", marker="^"),
    "sd-analog-np-digital": dict(color="tab:green", marker="v"),
    "np-analog-sd-digital": dict(color="tab:orange", marker="d"),
    "np-both": dict(color="tab:purple", marker="x"),
}


def render_rate_figure(rows, path) -> None:
    """Mean sum rate vs transmit power, one curve per scheme."""
    by_scheme = {}
    for r in rows:
        by_scheme.setdefault(r.scheme, {}).setdefault(r.power_dbm, []).append(r.sum_rate_bits_s_hz)
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for scheme in sorted(by_scheme):
        pts = sorted(by_scheme[scheme].items())
        powers = [p for p, _ in pts]
        means = [float(np.mean(v)) for _, v in pts]
        ax.plot(powers, means, label=scheme, **_SCHEME_STYLE.get(scheme, {}))
    ax.set_xlabel("Total transmit power [dBm]")
    ax.set_ylabel("Average sum rate [bits/s/Hz]")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_trace_figure(trace: dict, path) -> None:
    """Objective value per half step for one design run."""
    obj = trace["objective_per_halfstep"]
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.semilogy(np.arange(1, len(obj) + 1), obj, marker="o")
    ax.set_xlabel("Half step (digital, analog, ...)")
    ax.set_ylabel("Approximation error")
    ax.set_title(f"design {trace['design']}, seed {trace['seed']}")
    ax.grid(True, which="both", alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
