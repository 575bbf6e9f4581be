"""Fully digital sum-rate maximization via the iterative WMMSE updates.

The problem decouples across subcarriers (objective and power constraint
are both per subcarrier), so each subcarrier runs its own block-coordinate
loop: receiver gain step, MSE weight step, precoder step with a bisected
power multiplier. Initialization is a matched filter with an equal power
split, which makes the whole solve deterministic.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .channel import ChannelTensor, SystemConfig
from .errors import Diverged

DEFAULT_MAX_ITER = 200
DEFAULT_TOL = 1e-4
POWER_BISECT_RTOL = 1e-8
_EIG_NULL_RTOL = 1e-12


class WmmseResult(NamedTuple):
    precoder: np.ndarray  # N_T x (K*S), column (k, s) at k*S + s
    sum_rate_traces: list  # per-subcarrier rate after each full sweep
    iterations: int  # max sweep count over subcarriers


def _subcarrier_rate(hs: np.ndarray, f: np.ndarray, n0: float) -> float:
    g = np.abs(hs.T @ f) ** 2  # g[k, i] = |h_k^T f_i|^2
    desired = np.diag(g)
    interference = g.sum(axis=1) - desired
    return float(np.sum(np.log2(1.0 + desired / (interference + n0))))


def _power_profile(sig: np.ndarray, c_abs2: np.ndarray, lam: float) -> float:
    return float(np.sum(c_abs2 / (sig + lam)[:, None] ** 2))


def _precoder_step(hs: np.ndarray, u: np.ndarray, w: np.ndarray, p: float) -> np.ndarray:
    """Minimize the weighted MSE over the precoder columns subject to the
    power budget, multiplier found by bisection on the eigenbasis."""
    scale = w * np.abs(u) ** 2
    a_mat = (hs.conj() * scale) @ hs.T  # Hermitian PSD
    b_mat = hs.conj() * (w * u.conj())
    sig, q_mat = np.linalg.eigh(a_mat)
    sig = np.clip(sig.real, 0.0, None)
    c = q_mat.conj().T @ b_mat
    c_abs2 = np.abs(c) ** 2

    # minimum-norm solution at lambda = 0: drop numerically null modes
    null = sig <= sig.max() * _EIG_NULL_RTOL if sig.size else sig
    c_abs2_eff = c_abs2.copy()
    c_abs2_eff[null] = 0.0
    sig_eff = sig.copy()
    sig_eff[null] = 1.0  # placeholder, the components are zeroed
    if _power_profile(sig_eff, c_abs2_eff, 0.0) <= p:
        coeff = c.copy()
        coeff[null] = 0.0
        return q_mat @ (coeff / sig_eff[:, None])

    hi = 1.0
    while _power_profile(sig, c_abs2, hi) > p:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        pw = _power_profile(sig, c_abs2, mid)
        if pw > p:
            lo = mid
        else:
            hi = mid
            if p - pw <= POWER_BISECT_RTOL * p:
                break
    return q_mat @ (c / (sig + hi)[:, None])


def _solve_subcarrier(
    hs: np.ndarray, p: float, n0: float, max_iter: int, tol: float
) -> tuple[np.ndarray, list, int]:
    n_t, k = hs.shape
    norms = np.linalg.norm(hs, axis=0)
    norms[norms == 0] = 1.0
    f = np.sqrt(p / k) * hs.conj() / norms  # matched filter, equal split

    trace = [_subcarrier_rate(hs, f, n0)]
    drops = 0
    it = 0
    for it in range(1, max_iter + 1):
        g = hs.T @ f
        denom = np.sum(np.abs(g) ** 2, axis=1) + n0
        u = np.diag(g) / denom
        w = 1.0 / (1.0 - np.real(u.conj() * np.diag(g)))
        f = _precoder_step(hs, u, w, p)

        rate = _subcarrier_rate(hs, f, n0)
        if rate < trace[-1] - 1e-6:
            drops += 1
            if drops >= 3:
                raise Diverged("sum rate decreased repeatedly during WMMSE sweeps")
        prev = trace[-1]
        trace.append(rate)
        if abs(rate - prev) <= tol * max(prev, 1e-300):
            break
    return f, trace, it


def wmmse_solve(
    h: ChannelTensor,
    cfg: SystemConfig,
    *,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> WmmseResult:
    """Locally optimal fully digital precoder for every (user, subcarrier).

    Feasible per subcarrier (total column power <= P) and with a
    nondecreasing sum-rate trace on each subcarrier.
    """
    p = cfg.subcarrier_power_mw
    n0 = cfg.noise_power_mw
    f_fd = np.zeros_like(h.matrix)
    traces = []
    worst_iter = 0
    for s in range(h.s):
        hs = h.matrix[:, s :: h.s]  # N_T x K user channels on subcarrier s
        f_s, trace, it = _solve_subcarrier(hs, p, n0, max_iter, tol)
        f_fd[:, s :: h.s] = f_s
        traces.append(trace)
        worst_iter = max(worst_iter, it)
    return WmmseResult(precoder=f_fd, sum_rate_traces=traces, iterations=worst_iter)
