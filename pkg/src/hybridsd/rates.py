"""SINR, per-user rates and per-subcarrier transmit power.

The channel enters through its transpose (h^T w), not the conjugate
transpose; this is just a conjugation convention on the channel tensor
and is used consistently everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelTensor
from .errors import ShapeMismatch


@dataclass(frozen=True)
class HybridPrecoder:
    """Analog/digital factor pair; effective precoder is F_RF @ F_BB."""

    f_rf: np.ndarray  # N_T x M_T
    f_bb: np.ndarray  # M_T x (K*S)
    k: int
    s: int

    def column(self, k: int, s: int) -> np.ndarray:
        return self.f_bb[:, k * self.s + s]

    def effective(self) -> np.ndarray:
        return self.f_rf @ self.f_bb


@dataclass(frozen=True)
class RateReport:
    """Achievable rates (bits/s/Hz) and the power spent per subcarrier."""

    per_user_rate: np.ndarray  # K x S
    sum_rate: float
    per_subcarrier_power: np.ndarray  # S


def _check(h: ChannelTensor, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w)
    if w.shape != h.matrix.shape:
        raise ShapeMismatch(f"precoder shape {w.shape} != channel shape {h.matrix.shape}")
    return w


def sinr(h: ChannelTensor, w: np.ndarray, k: int, s: int, n0_mw: float) -> float:
    """SINR of user k on subcarrier s under effective precoder w."""
    w = _check(h, w)
    hk = h.col(k, s)
    gains = np.abs(hk @ w[:, s :: h.s]) ** 2  # over users, transpose product
    desired = gains[k]
    interference = float(np.sum(gains)) - desired
    return float(desired / (interference + n0_mw))


def sum_rate(h: ChannelTensor, w: np.ndarray, n0_mw: float) -> RateReport:
    """Rates log2(1 + SINR) for every (user, subcarrier) plus powers."""
    w = _check(h, w)
    k_users, s_sub = h.k, h.s
    rates = np.zeros((k_users, s_sub))
    power = np.zeros(s_sub)
    for s in range(s_sub):
        cols = w[:, s::s_sub]  # N_T x K, user columns on subcarrier s
        power[s] = float(np.sum(np.abs(cols) ** 2))
        for k in range(k_users):
            g = np.abs(h.col(k, s) @ cols) ** 2
            desired = g[k]
            interference = float(np.sum(g)) - desired
            rates[k, s] = np.log2(1.0 + desired / (interference + n0_mw))
    return RateReport(per_user_rate=rates, sum_rate=float(rates.sum()), per_subcarrier_power=power)


def sum_rate_hybrid(h: ChannelTensor, hp: HybridPrecoder, n0_mw: float) -> RateReport:
    """Same report via the factored path (h^T F_RF, then digital columns)."""
    if hp.f_rf.shape[0] != h.matrix.shape[0] or hp.f_bb.shape[1] != h.matrix.shape[1]:
        raise ShapeMismatch("hybrid precoder dimensions do not match the channel")
    g_rf = h.matrix.T @ hp.f_rf  # (K*S) x M_T rows h^T F_RF
    k_users, s_sub = h.k, h.s
    rates = np.zeros((k_users, s_sub))
    power = np.zeros(s_sub)
    for s in range(s_sub):
        b_cols = hp.f_bb[:, s::s_sub]  # M_T x K
        eff_cols = hp.f_rf @ b_cols
        power[s] = float(np.sum(np.abs(eff_cols) ** 2))
        for k in range(k_users):
            g = np.abs(g_rf[k * s_sub + s] @ b_cols) ** 2
            desired = g[k]
            interference = float(np.sum(g)) - desired
            rates[k, s] = np.log2(1.0 + desired / (interference + n0_mw))
    return RateReport(per_user_rate=rates, sum_rate=float(rates.sum()), per_subcarrier_power=power)
