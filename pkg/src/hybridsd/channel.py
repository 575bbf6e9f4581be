"""Frequency-domain multi-user channel generation.

Rician multi-tap time-domain channels (line-of-sight tap plus i.i.d.
Rayleigh taps), transformed per subcarrier by a DFT over the taps, with a
half-wavelength ULA response and 3GPP-style distance/frequency pathloss.
All powers are handled in linear milliwatts internally; dBm only at the
boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SystemConfig:
    """Array/user/subcarrier dimensions and power levels (dBm at the edges)."""

    n_t: int = 16
    m_t: int = 4
    k: int = 2
    s: int = 4
    p_total_dbm: float = 25.0
    noise_psd_dbm_hz: float = -164.0
    subcarrier_bw_hz: float = 10e6
    f_c_ghz: float = 28.0

    def __post_init__(self):
        if not (self.k <= self.m_t < self.n_t):
            raise ValueError(f"need K <= M_T < N_T, got K={self.k}, M_T={self.m_t}, N_T={self.n_t}")
        if self.s < 1:
            raise ValueError(f"need at least one subcarrier, got {self.s}")
        if self.subcarrier_bw_hz <= 0 or self.f_c_ghz <= 0:
            raise ValueError("bandwidth and carrier frequency must be positive")

    @property
    def total_power_mw(self) -> float:
        return dbm_to_mw(self.p_total_dbm)

    @property
    def subcarrier_power_mw(self) -> float:
        """Total power split equally across the subcarriers."""
        return self.total_power_mw / self.s

    @property
    def noise_power_mw(self) -> float:
        return dbm_to_mw(noise_power_dbm(self))


@dataclass(frozen=True)
class FadingParams:
    """Tap count, Rician factor and user-geometry ranges."""

    taps: int = 4
    rician_kappa_db: float = 10.0
    aod_range: tuple[float, float] = (-np.pi / 3, np.pi / 3)
    dist_range_m: tuple[float, float] = (100.0, 200.0)
    # The per-tap model gives every diffuse tap the full beta/(kappa+1)
    # power; this switch rescales them so their total is beta/(kappa+1).
    normalize_nlos: bool = False

    def __post_init__(self):
        if self.taps < 1:
            raise ValueError(f"need at least one tap, got {self.taps}")


@dataclass(frozen=True)
class ChannelTensor:
    """Per-user per-subcarrier channels, stacked as N_T x (K*S).

    Column (k, s) sits at index k*S + s.
    """

    matrix: np.ndarray
    k: int
    s: int
    aod_rad: np.ndarray = field(default=None, repr=False)
    dist_m: np.ndarray = field(default=None, repr=False)
    pathloss_lin: np.ndarray = field(default=None, repr=False)

    @property
    def n_t(self) -> int:
        return self.matrix.shape[0]

    def col(self, k: int, s: int) -> np.ndarray:
        return self.matrix[:, k * self.s + s]

    def user_block(self, k: int) -> np.ndarray:
        return self.matrix[:, k * self.s : (k + 1) * self.s]


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    return 10.0 * np.log10(mw)


def array_response(phi: float, n_t: int) -> np.ndarray:
    """Half-wavelength ULA response, entry n = exp(i*pi*n*sin(phi))."""
    n = np.arange(n_t)
    return np.exp(1j * np.pi * n * np.sin(phi))


def pathloss_db(d_m: float, f_c_ghz: float) -> float:
    """Distance/frequency pathloss: -22 log10(d/1m) - 28 - 20 log10(f_c/1GHz)."""
    if d_m <= 0 or f_c_ghz <= 0:
        raise ValueError("distance and carrier frequency must be positive")
    return -22.0 * np.log10(d_m) - 28.0 - 20.0 * np.log10(f_c_ghz)


def noise_power_dbm(cfg: SystemConfig) -> float:
    """Noise power over one subcarrier bandwidth, in dBm."""
    return cfg.noise_psd_dbm_hz + 10.0 * np.log10(cfg.subcarrier_bw_hz)


def gen_channel(cfg: SystemConfig, fp: FadingParams, rng: np.random.Generator) -> ChannelTensor:
    """Draw user geometry and taps, return the per-subcarrier channel tensor.

    Per user: angle of departure and distance drawn uniformly; tap 0 is
    the LoS term sqrt(kappa/(kappa+1)) sqrt(beta) a(phi); taps 1..T have
    i.i.d. CN(0, beta/(kappa+1)) entries. Subcarrier s gets
    sum_l tap_l * exp(-i 2 pi l s / S). Deterministic for a fixed rng state.
    """
    kappa = 10.0 ** (fp.rician_kappa_db / 10.0)
    n_nlos = fp.taps - 1
    h = np.zeros((cfg.n_t, cfg.k * cfg.s), dtype=complex)
    aods = np.zeros(cfg.k)
    dists = np.zeros(cfg.k)
    betas = np.zeros(cfg.k)
    for k in range(cfg.k):
        phi = rng.uniform(fp.aod_range[0], fp.aod_range[1])
        d = rng.uniform(fp.dist_range_m[0], fp.dist_range_m[1])
        beta = dbm_to_mw(pathloss_db(d, cfg.f_c_ghz))  # dB -> linear
        aods[k], dists[k], betas[k] = phi, d, beta

        taps = np.zeros((fp.taps, cfg.n_t), dtype=complex)
        taps[0] = np.sqrt(kappa / (kappa + 1.0)) * np.sqrt(beta) * array_response(phi, cfg.n_t)
        if n_nlos > 0:
            w = rng.standard_normal((n_nlos, cfg.n_t)) + 1j * rng.standard_normal((n_nlos, cfg.n_t))
            taps[1:] = np.sqrt(beta / (kappa + 1.0)) * w / np.sqrt(2.0)
            if fp.normalize_nlos:
                taps[1:] /= np.sqrt(n_nlos)

        ell = np.arange(fp.taps)
        ss = np.arange(cfg.s)
        twiddle = np.exp(-2j * np.pi * np.outer(ell, ss) / cfg.s)  # (taps, S)
        h[:, k * cfg.s : (k + 1) * cfg.s] = taps.T @ twiddle
    return ChannelTensor(matrix=h, k=cfg.k, s=cfg.s, aod_rad=aods, dist_m=dists, pathloss_lin=betas)


def save_channel_csv(path, ct: ChannelTensor) -> None:
    """Text dump: header line "n_t,k,s", then one row per antenna with
    interleaved real,imag entries for the K*S columns."""
    m = ct.matrix
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{m.shape[0]},{ct.k},{ct.s}\n")
        for row in m:
            cells = []
            for v in row:
                cells.append(repr(float(v.real)))
                cells.append(repr(float(v.imag)))
            f.write(",".join(cells) + "\n")


def load_channel_csv(path) -> ChannelTensor:
    with open(path, "r", encoding="utf-8") as f:
        n_t, k, s = (int(x) for x in f.readline().strip().split(","))
        m = np.zeros((n_t, k * s), dtype=complex)
        for i in range(n_t):
            vals = [float(x) for x in f.readline().strip().split(",")]
            m[i] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    return ChannelTensor(matrix=m, k=k, s=s)
