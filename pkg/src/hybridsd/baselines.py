"""Benchmark precoder schemes and the dispatch used by the experiment runner.

The nearest-point (NP) benchmarks run the alternation with
infinite-resolution values and only snap to the discrete sets after
convergence; the sphere-decoding (SD) schemes keep every iterate
feasible. Mixed schemes apply one discrete mapping post hoc while the
other side is solved exactly for the mapped result.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .alphabets import PhaseAlphabet, QuantLabelSet, snap_labels, snap_phases
from .altmin import digital_step, init_analog, run_altmin
from .channel import ChannelTensor, SystemConfig
from .errors import UnknownScheme
from .fronthaul import bisect_mu, run_fronthaul_altmin, subcarrier_power
from .matrixkit import frobenius_norm, pseudoinverse, svd_topk
from .rates import HybridPrecoder, RateReport, sum_rate
from .wmmse import wmmse_solve

SCHEMES = (
    "fully-digital",
    "sd-hybrid",
    "np1-hybrid",
    "sd-analog-np-digital",
    "np-analog-sd-digital",
    "np-both",
)


class SchemeRun(NamedTuple):
    report: RateReport
    iterations: int


def np1_analog_step(f_bb: np.ndarray, f_fd: np.ndarray, alphabet: PhaseAlphabet) -> np.ndarray:
    """Infinite-resolution analog update exp(i arg(F_fd F_bb^+)).

    Snapping onto the alphabet happens only after the alternation has
    converged; during the iterations the entries stay unconstrained in
    phase (unit modulus).
    """
    return np.exp(1j * np.angle(f_fd @ pseudoinverse(f_bb)))


def _np1_alternation(
    f_fd: np.ndarray,
    cfg: SystemConfig,
    alphabet: PhaseAlphabet,
    *,
    conv_tol: float = 1e-4,
    max_outer: int = 50,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Run the infinite-resolution alternation, snap, refresh the digital
    stage for the snapped analog matrix, normalize. Returns
    (f_rf, f_bb, iterations)."""
    # same starting point as the SD design, but without snapping
    u_k, s_k = svd_topk(f_fd, cfg.m_t)
    f_rf = np.exp(1j * np.angle(u_k @ s_k))
    prev = None
    it = 0
    f_bb = digital_step(f_rf, f_fd)
    for it in range(1, max_outer + 1):
        f_bb = digital_step(f_rf, f_fd)
        f_rf = np1_analog_step(f_bb, f_fd, alphabet)
        cur = frobenius_norm(f_fd - f_rf @ f_bb) ** 2
        if prev is not None and abs(prev - cur) <= conv_tol * max(prev, 1e-300):
            break
        prev = cur
    f_rf = snap_phases(f_rf, alphabet)
    f_bb = digital_step(f_rf, f_fd)
    denom = frobenius_norm(f_rf @ f_bb)
    if denom > 0:
        f_bb = f_bb * (frobenius_norm(f_fd) / denom)
    return f_rf, f_bb, it


def np_digital_quantize(
    f_bb: np.ndarray,
    labels: QuantLabelSet,
    f_rf: np.ndarray,
    p: float,
    s: int,
) -> np.ndarray:
    """Entrywise nearest-label quantization of a range-matched digital stage.

    The pre-image is scaled so the 99th percentile of its real/imag parts
    lands on the largest label; subcarriers whose quantized power exceeds
    the budget are re-quantized once from a sqrt(P/power)-downscaled
    pre-image. Saturation beyond that is allowed. `s` is the subcarrier
    count fixing the column layout (column (k, sub) at k*s + sub).
    """
    max_label = float(labels.real_labels[-1])
    parts = np.abs(np.concatenate([f_bb.real.ravel(), f_bb.imag.ravel()]))
    p99 = float(np.percentile(parts, 99))
    scale = max_label / p99 if p99 > 0 else 1.0
    pre = scale * f_bb
    f_q = snap_labels(pre, labels)
    for sub in range(s):
        cols = slice(sub, None, s)
        power = subcarrier_power(f_rf, f_q[:, cols])
        if power > p:
            retry = np.sqrt(p / power)
            f_q[:, cols] = snap_labels(retry * pre[:, cols], labels)
    return f_q


def run_scheme(
    tag: str,
    h: ChannelTensor,
    cfg: SystemConfig,
    alphabet: PhaseAlphabet | None,
    labels: QuantLabelSet | None,
    *,
    f_fd: np.ndarray | None = None,
    conv_tol: float = 1e-4,
    max_outer: int = 50,
    rng: np.random.Generator | None = None,
) -> SchemeRun:
    """Evaluate one benchmark scheme on a channel draw.

    The fully digital target can be passed in to share one WMMSE solve
    across schemes on the same channel; the dispatch itself is
    deterministic given (channel, config, options).
    """
    if tag not in SCHEMES:
        raise UnknownScheme(f"unknown scheme tag {tag!r}")
    n0 = cfg.noise_power_mw
    p = cfg.subcarrier_power_mw

    if f_fd is None:
        res = wmmse_solve(h, cfg)
        f_fd = res.precoder
        wmmse_iters = res.iterations
    else:
        wmmse_iters = 0

    if tag == "fully-digital":
        return SchemeRun(report=sum_rate(h, f_fd, n0), iterations=wmmse_iters)

    if alphabet is None:
        raise UnknownScheme(f"scheme {tag!r} needs a phase alphabet")

    if tag == "sd-hybrid":
        if labels is None:
            hp, trace = run_altmin(
                h, cfg, alphabet, conv_tol=conv_tol, max_outer=max_outer, rng=rng, f_fd=f_fd
            )
        else:
            hp, trace = run_fronthaul_altmin(
                h, cfg, alphabet, labels, conv_tol=conv_tol, max_outer=max_outer, rng=rng, f_fd=f_fd
            )
        return SchemeRun(report=sum_rate(h, hp.effective(), n0), iterations=trace.iterations)

    if tag == "np1-hybrid":
        f_rf, f_bb, it = _np1_alternation(f_fd, cfg, alphabet, conv_tol=conv_tol, max_outer=max_outer)
        return SchemeRun(report=sum_rate(h, f_rf @ f_bb, n0), iterations=it)

    if labels is None:
        raise UnknownScheme(f"scheme {tag!r} needs a quantizer label set")

    if tag == "sd-analog-np-digital":
        hp, trace = run_altmin(
            h, cfg, alphabet, conv_tol=conv_tol, max_outer=max_outer, rng=rng, f_fd=f_fd
        )
        f_q = np_digital_quantize(hp.f_bb, labels, hp.f_rf, p, h.s)
        return SchemeRun(report=sum_rate(h, hp.f_rf @ f_q, n0), iterations=trace.iterations)

    if tag == "np-analog-sd-digital":
        f_rf, _, it = _np1_alternation(f_fd, cfg, alphabet, conv_tol=conv_tol, max_outer=max_outer)
        f_bb = np.zeros((cfg.m_t, h.k * h.s), dtype=complex)
        for s in range(h.s):
            res = bisect_mu(f_rf, f_fd[:, s :: h.s], labels, p)
            f_bb[:, s :: h.s] = res.columns
        return SchemeRun(report=sum_rate(h, f_rf @ f_bb, n0), iterations=it)

    # np-both
    f_rf, f_bb, it = _np1_alternation(f_fd, cfg, alphabet, conv_tol=conv_tol, max_outer=max_outer)
    f_q = np_digital_quantize(f_bb, labels, f_rf, p, h.s)
    return SchemeRun(report=sum_rate(h, f_rf @ f_q, n0), iterations=it)
