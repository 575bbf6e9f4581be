"""Hybrid design with the digital precoder restricted to quantizer labels.

The digital step minimizes a per-subcarrier Lagrangian: for a fixed
multiplier the problem splits per user into a finite-alphabet least
squares over the complex label grid, rewritten in an equivalent
real-valued form (stacked real/imag parts) and solved exactly by sphere
decoding over the real labels. The multiplier enforcing the subcarrier
power budget is found by bisection. The analog step is shared with the
unquantized design. No final rescaling: scaling would leave the label
grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .alphabets import PhaseAlphabet, QuantLabelSet
from .altmin import AltminTrace, analog_step, init_analog
from .channel import ChannelTensor, SystemConfig
from .errors import InfeasiblePower
from .matrixkit import frobenius_norm
from .rates import HybridPrecoder
from .sesd import SesdProblem, reduce_to_triangular, sesd_solve
from .wmmse import wmmse_solve

DEFAULT_POWER_RTOL = 1e-3
MAX_BISECT_STEPS = 60
MIN_BRACKET_WIDTH = 1e-8
MU_CAP = 1e12


@dataclass(frozen=True)
class RealExpansion:
    """Real-valued form of a complex triangular system.

    First half of the stacked vectors carries real parts, second half
    imaginary parts; the matrix has the block structure
    [[Re R, -Im R], [Im R, Re R]] so distances are preserved exactly.
    """

    d_r: np.ndarray  # 2M
    r_r: np.ndarray  # 2M x 2M

    @property
    def half(self) -> int:
        return self.d_r.size // 2


class MuBisection(NamedTuple):
    mu: float
    columns: np.ndarray  # M_T x K quantized digital columns
    power: float
    probes: list  # (mu, power) pairs in probe order


@dataclass
class FronthaulTrace(AltminTrace):
    """Altmin-shaped trace plus per-iteration multiplier/power diagnostics."""

    mu_per_iter: list = field(default_factory=list)  # list of length-S arrays
    power_per_iter: list = field(default_factory=list)


def build_real_expansion(r_c: np.ndarray, d_c: np.ndarray) -> RealExpansion:
    m = d_c.size
    r_r = np.zeros((2 * m, 2 * m))
    r_r[:m, :m] = r_c.real
    r_r[:m, m:] = -r_c.imag
    r_r[m:, :m] = r_c.imag
    r_r[m:, m:] = r_c.real
    return RealExpansion(d_r=np.concatenate([d_c.real, d_c.imag]), r_r=r_r)


def quantized_digital_step(
    f_rf: np.ndarray,
    a_col: np.ndarray,
    labels: QuantLabelSet,
    mu: float,
) -> np.ndarray:
    """Exact minimizer of ||a - F_rf b||^2 + mu ||F_rf b||^2 over the labels.

    Triangularize (1+mu) F_rf^H F_rf, expand to the real form, sphere
    decode over the real labels, reassemble the complex vector.
    """
    m_t = f_rf.shape[1]
    tri = reduce_to_triangular(f_rf, a_col, mu)
    exp = build_real_expansion(tri.r, tri.d)
    # the expansion is not triangular (imag block below the diagonal), so
    # reduce it once more; distances are preserved up to a constant
    tri_r = reduce_to_triangular(exp.r_r, exp.d_r, 0.0)
    res = sesd_solve(SesdProblem(r=tri_r.r, d=tri_r.d, alphabet=labels.real_labels))
    b_r = res.x_opt
    return b_r[:m_t] + 1j * b_r[m_t:]


def subcarrier_power(f_rf: np.ndarray, columns) -> float:
    """Sum over users of ||F_rf b_k||^2 for one subcarrier."""
    cols = np.asarray(columns)
    if cols.ndim == 1:
        cols = cols[:, None]
    return float(np.sum(np.abs(f_rf @ cols) ** 2))


def bisect_mu(
    f_rf: np.ndarray,
    a_cols: np.ndarray,
    labels: QuantLabelSet,
    p: float,
    *,
    power_rtol: float = DEFAULT_POWER_RTOL,
    mu_hint: float | None = None,
) -> MuBisection:
    """Smallest probed multiplier whose quantized columns meet the budget.

    a_cols holds the per-user target columns (M-ish x K). Probes mu = 0
    first; otherwise brackets by doubling (warm-started from mu_hint when
    given) and bisects until the power is within power_rtol of P, the
    bracket is tiny, or the step cap is reached. Raises InfeasiblePower
    if even an extreme multiplier cannot meet the budget.
    """
    a_cols = np.asarray(a_cols)
    k = a_cols.shape[1]

    probes = []

    def solve_at(mu: float):
        cols = np.column_stack(
            [quantized_digital_step(f_rf, a_cols[:, j], labels, mu) for j in range(k)]
        )
        pw = subcarrier_power(f_rf, cols)
        probes.append((mu, pw))
        return cols, pw

    cols0, pw0 = solve_at(0.0)
    if pw0 <= p:
        return MuBisection(mu=0.0, columns=cols0, power=pw0, probes=probes)

    best = None  # (mu, cols, power), smallest feasible mu probed

    def consider(mu, cols, pw):
        nonlocal best
        if pw <= p and (best is None or mu < best[0]):
            best = (mu, cols, pw)

    hi = 1.0 if mu_hint is None else max(mu_hint, 1e-6)
    lo = 0.0
    cols_hi, pw_hi = solve_at(hi)
    while pw_hi > p:
        lo = hi
        hi *= 2.0
        if hi > MU_CAP:
            raise InfeasiblePower(f"power {pw_hi:.3e} exceeds budget {p:.3e} even at mu={MU_CAP:.0e}")
        cols_hi, pw_hi = solve_at(hi)
    consider(hi, cols_hi, pw_hi)

    for _ in range(MAX_BISECT_STEPS):
        if hi - lo < MIN_BRACKET_WIDTH:
            break
        mid = 0.5 * (lo + hi)
        cols_mid, pw_mid = solve_at(mid)
        if pw_mid <= p:
            consider(mid, cols_mid, pw_mid)
            hi = mid
            if p - pw_mid <= power_rtol * p:
                break
        else:
            lo = mid
    mu_star, cols, pw = best
    return MuBisection(mu=mu_star, columns=cols, power=pw, probes=probes)


def run_fronthaul_altmin(
    h: ChannelTensor,
    cfg: SystemConfig,
    alphabet: PhaseAlphabet,
    labels: QuantLabelSet,
    *,
    conv_tol: float = 1e-4,
    max_outer: int = 50,
    init_mode: str = "svd",
    rng: np.random.Generator | None = None,
    f_fd: np.ndarray | None = None,
    power_rtol: float = DEFAULT_POWER_RTOL,
) -> tuple[HybridPrecoder, FronthaulTrace]:
    """Full design under the fronthaul limit.

    Outer loop: per-subcarrier multiplier bisection filling the quantized
    digital precoder, then the exact analog step. The objective trace is
    not monotone (the digital step minimizes a Lagrangian, not the raw
    distance); the stop rule uses its relative change. Multipliers warm
    start from the previous outer iteration.
    """
    if f_fd is None:
        f_fd = wmmse_solve(h, cfg).precoder
    p = cfg.subcarrier_power_mw
    f_rf = init_analog(f_fd, cfg.m_t, alphabet, mode=init_mode, rng=rng)
    f_bb = np.zeros((cfg.m_t, h.k * h.s), dtype=complex)
    trace = FronthaulTrace()
    mu_prev = [None] * h.s
    prev = None
    def digital_phase() -> tuple[np.ndarray, np.ndarray]:
        mus = np.zeros(h.s)
        powers = np.zeros(h.s)
        for s in range(h.s):
            a_cols = f_fd[:, s :: h.s]
            res = bisect_mu(
                f_rf, a_cols, labels, p, power_rtol=power_rtol, mu_hint=mu_prev[s]
            )
            f_bb[:, s :: h.s] = res.columns
            mus[s] = res.mu
            powers[s] = res.power
            mu_prev[s] = res.mu if res.mu > 0 else None
        return mus, powers

    for it in range(1, max_outer + 1):
        mus, powers = digital_phase()
        trace.mu_per_iter.append(mus)
        trace.power_per_iter.append(powers)
        trace.objectives.append(frobenius_norm(f_fd - f_rf @ f_bb) ** 2)

        f_rf_before = f_rf
        f_rf = analog_step(f_bb, f_fd, alphabet)
        cur = frobenius_norm(f_fd - f_rf @ f_bb) ** 2
        trace.objectives.append(cur)
        trace.iterations = it
        ref = prev if prev is not None else trace.objectives[-2]
        if abs(ref - cur) <= conv_tol * max(ref, 1e-300) or cur == 0.0:
            trace.converged = True
            break
        prev = cur

    # the loop ends on an analog step; if it moved, the digital precoder was
    # budgeted against the old analog matrix, so refresh it once
    if not np.array_equal(f_rf, f_rf_before):
        digital_phase()
        trace.objectives.append(frobenius_norm(f_fd - f_rf @ f_bb) ** 2)
    hp = HybridPrecoder(f_rf=f_rf, f_bb=f_bb.copy(), k=h.k, s=h.s)
    return hp, trace
