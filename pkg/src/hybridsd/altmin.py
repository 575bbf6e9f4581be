"""Alternating analog/digital decomposition of the fully digital precoder.

Given the fully digital target, alternate between the least-squares
digital step (pseudoinverse) and the exact discrete analog step: each
analog row is the global minimizer of a finite-alphabet least-squares
problem, found by sphere decoding after reducing the shared factor to
triangular form. After convergence the digital precoder is rescaled so
the hybrid product carries the same total Frobenius norm as the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .alphabets import PhaseAlphabet, snap_phases
from .channel import ChannelTensor, SystemConfig
from .matrixkit import cholesky_upper, frobenius_norm, pseudoinverse, svd_topk
from .rates import HybridPrecoder
from .sesd import SesdProblem, sesd_solve
from .wmmse import wmmse_solve

DEFAULT_CONV_TOL = 1e-4
DEFAULT_MAX_OUTER = 50


@dataclass
class AltminTrace:
    """Objective ||F_fd - F_rf F_bb||_F^2 after every half step."""

    objectives: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def _approx_error(f_fd: np.ndarray, f_rf: np.ndarray, f_bb: np.ndarray) -> float:
    return frobenius_norm(f_fd - f_rf @ f_bb) ** 2


def init_analog(
    f_fd: np.ndarray,
    m_t: int,
    alphabet: PhaseAlphabet,
    mode: str = "svd",
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Feasible starting analog precoder.

    svd mode takes the phases of the top-M_T left singular vectors scaled
    by their singular values; random mode draws uniform phases. Either
    way the entries are snapped onto the alphabet so every iterate is
    feasible from the start.
    """
    n_t = f_fd.shape[0]
    if mode == "svd":
        u_k, s_k = svd_topk(f_fd, m_t)
        raw = np.exp(1j * np.angle(u_k @ s_k))
    elif mode == "random":
        if rng is None:
            raise ValueError("random init needs an rng")
        raw = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=(n_t, m_t)))
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    return snap_phases(raw, alphabet)


def digital_step(f_rf: np.ndarray, f_fd: np.ndarray) -> np.ndarray:
    """Unconstrained least-squares digital precoder for a fixed analog one."""
    return pseudoinverse(f_rf) @ f_fd


def analog_step(f_bb: np.ndarray, f_fd: np.ndarray, alphabet: PhaseAlphabet) -> np.ndarray:
    """Exact discrete analog precoder for a fixed digital one.

    The Frobenius objective splits into independent columns of the
    transposed system A = F_fd^T, B = F_bb^T; each column is solved
    exactly by sphere decoding over the phase alphabet, sharing one
    triangular factor of B^H B.
    """
    a_mat = f_fd.T  # (K*S) x N_T
    b_mat = f_bb.T  # (K*S) x M_T
    r = cholesky_upper(b_mat.conj().T @ b_mat)
    d_all = solve_triangular(r, b_mat.conj().T @ a_mat, lower=False, trans="C")
    n_t = a_mat.shape[1]
    rows = np.zeros((n_t, f_bb.shape[0]), dtype=complex)
    for n in range(n_t):
        res = sesd_solve(SesdProblem(r=r, d=d_all[:, n], alphabet=alphabet.symbols))
        rows[n] = res.x_opt
    return rows  # row n of F_rf is the column solution x_n


def run_altmin(
    h: ChannelTensor,
    cfg: SystemConfig,
    alphabet: PhaseAlphabet,
    *,
    conv_tol: float = DEFAULT_CONV_TOL,
    max_outer: int = DEFAULT_MAX_OUTER,
    init_mode: str = "svd",
    rng: np.random.Generator | None = None,
    f_fd: np.ndarray | None = None,
) -> tuple[HybridPrecoder, AltminTrace]:
    """Full design: fully digital target, alternation, final normalization.

    Stops when the relative objective change since the previous half step
    of the same kind drops below conv_tol (checked after each analog
    step), or at max_outer iterations. The returned digital precoder is
    scaled so ||F_rf F_bb||_F equals ||F_fd||_F exactly.
    """
    if f_fd is None:
        f_fd = wmmse_solve(h, cfg).precoder
    f_rf = init_analog(f_fd, cfg.m_t, alphabet, mode=init_mode, rng=rng)
    trace = AltminTrace()
    f_bb = None
    prev = None
    for it in range(1, max_outer + 1):
        f_bb = digital_step(f_rf, f_fd)
        trace.objectives.append(_approx_error(f_fd, f_rf, f_bb))
        f_rf = analog_step(f_bb, f_fd, alphabet)
        cur = _approx_error(f_fd, f_rf, f_bb)
        trace.objectives.append(cur)
        trace.iterations = it
        ref = prev if prev is not None else trace.objectives[-2]
        if abs(ref - cur) <= conv_tol * max(ref, 1e-300) or cur == 0.0:
            trace.converged = True
            break
        prev = cur

    denom = frobenius_norm(f_rf @ f_bb)
    if denom > 0:
        f_bb = f_bb * (frobenius_norm(f_fd) / denom)
    hp = HybridPrecoder(f_rf=f_rf, f_bb=f_bb, k=h.k, s=h.s)
    return hp, trace
