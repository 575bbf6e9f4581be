"""Discrete constraint sets for the analog and digital precoder entries.

The analog entries live on a uniformly sampled unit circle (b-bit phase
shifters); the digital entries live on a square grid of complex labels
built from a symmetric uniform real quantizer (q bits per real dimension,
step delta).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySamples, InvalidDelta, InvalidResolution

_MAX_BITS = 8
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class PhaseAlphabet:
    """Unit-modulus symbols exp(i * l * pi / 2^(b-1)), l = 0 .. 2^b - 1."""

    bits: int
    symbols: np.ndarray

    @property
    def size(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class QuantLabelSet:
    """Real quantizer labels and the induced complex label grid.

    real_labels[i] = delta * (i - (L-1)/2), ascending; complex_labels is
    the L^2 grid {p_R + i p_I}.
    """

    bits: int
    delta: float
    real_labels: np.ndarray
    complex_labels: np.ndarray = field(repr=False)

    @property
    def levels(self) -> int:
        return len(self.real_labels)

    @classmethod
    def from_real_labels(cls, labels, bits: int = 0, delta: float = 0.0) -> "QuantLabelSet":
        """Label set with explicitly given real labels (ascending).

        Used for non-power-of-two experiments; the complex grid is
        derived the same way as for the built sets.
        """
        real = np.sort(np.asarray(labels, dtype=float))
        cplx = (real[:, None] + 1j * real[None, :]).ravel()
        return cls(bits=bits, delta=delta, real_labels=real, complex_labels=cplx)


def build_phase_alphabet(bits: int) -> PhaseAlphabet:
    """b-bit phase-shifter alphabet, 2^b points starting at +1."""
    if not 1 <= int(bits) <= _MAX_BITS:
        raise InvalidResolution(f"phase bits must be in [1, {_MAX_BITS}], got {bits}")
    bits = int(bits)
    ell = np.arange(2**bits)
    symbols = np.exp(1j * ell * np.pi / 2 ** (bits - 1))
    return PhaseAlphabet(bits=bits, symbols=symbols)


def build_quant_labels(bits: int, delta: float) -> QuantLabelSet:
    """q-bit symmetric uniform quantizer labels with step delta."""
    if not 1 <= int(bits) <= _MAX_BITS:
        raise InvalidResolution(f"label bits must be in [1, {_MAX_BITS}], got {bits}")
    if not delta > 0.0:
        raise InvalidDelta(f"delta must be positive, got {delta}")
    bits = int(bits)
    levels = 2**bits
    i = np.arange(levels)
    real = float(delta) * (i - (levels - 1) / 2.0)
    cplx = (real[:, None] + 1j * real[None, :]).ravel()
    return QuantLabelSet(bits=bits, delta=float(delta), real_labels=real, complex_labels=cplx)


def nearest_phase(z: complex, alphabet: PhaseAlphabet) -> complex:
    """Closest alphabet symbol to z; ties resolved to the lowest index."""
    d = np.abs(complex(z) - alphabet.symbols)
    m = d.min()
    idx = int(np.flatnonzero(d <= m + _TIE_RTOL * (1.0 + m))[0])
    return complex(alphabet.symbols[idx])


def snap_phases(m, alphabet: PhaseAlphabet) -> np.ndarray:
    """Entrywise nearest_phase over an array."""
    a = np.asarray(m)
    d = np.abs(a[..., None] - alphabet.symbols)
    mins = d.min(axis=-1, keepdims=True)
    # lowest index among ties
    idx = np.argmax(d <= mins + _TIE_RTOL * (1.0 + mins), axis=-1)
    return alphabet.symbols[idx]


def _nearest_real_index(x, labels: QuantLabelSet) -> np.ndarray:
    """Index of the nearest real label; exact midpoints go to the smaller label."""
    t = np.asarray(x, dtype=float) / labels.delta + (labels.levels - 1) / 2.0
    idx = np.ceil(t - 0.5)
    return np.clip(idx, 0, labels.levels - 1).astype(int)


def nearest_label(z: complex, labels: QuantLabelSet) -> complex:
    """Componentwise nearest complex label; ties go to the smaller label."""
    z = complex(z)
    if labels.delta > 0:
        re = labels.real_labels[_nearest_real_index(z.real, labels)]
        im = labels.real_labels[_nearest_real_index(z.imag, labels)]
    else:  # custom label sets without a uniform step
        re = _nearest_by_scan(z.real, labels.real_labels)
        im = _nearest_by_scan(z.imag, labels.real_labels)
    return complex(re + 1j * im)


def _nearest_by_scan(x: float, real_labels: np.ndarray) -> float:
    d = np.abs(x - real_labels)
    m = d.min()
    return float(real_labels[np.flatnonzero(d <= m + _TIE_RTOL * (1.0 + m))[0]])


def snap_labels(m, labels: QuantLabelSet) -> np.ndarray:
    """Entrywise nearest_label over an array."""
    a = np.asarray(m)
    if labels.delta > 0:
        re = labels.real_labels[_nearest_real_index(a.real, labels)]
        im = labels.real_labels[_nearest_real_index(a.imag, labels)]
        return re + 1j * im
    flat = np.array([nearest_label(v, labels) for v in a.ravel()])
    return flat.reshape(a.shape)


def quantization_distortion(samples: np.ndarray, bits: int, delta: float) -> float:
    """Sum of |s - nearest complex label|^2 over the samples."""
    q = build_quant_labels(bits, delta)
    parts = np.concatenate([np.asarray(samples).real.ravel(), np.asarray(samples).imag.ravel()])
    snapped = q.real_labels[_nearest_real_index(parts, q)]
    return float(np.sum((parts - snapped) ** 2))


def calibrate_delta(
    samples,
    bits: int,
    *,
    grid_points: int = 512,
    refine_iters: int = 80,
) -> float:
    """Step size minimizing the total quantization distortion of the samples.

    Coarse grid over (0, delta_hi], then golden-section refinement around
    the best grid point. Deterministic for a fixed sample set.
    """
    s = np.asarray(samples, dtype=complex).ravel()
    if s.size < 100:
        raise EmptySamples(f"need at least 100 samples, got {s.size}")
    if not np.any(s != 0):
        raise EmptySamples("samples are all zero")
    if not 1 <= int(bits) <= _MAX_BITS:
        raise InvalidResolution(f"label bits must be in [1, {_MAX_BITS}], got {bits}")

    parts = np.concatenate([s.real, s.imag])
    levels = 2 ** int(bits)
    offsets = np.arange(levels) - (levels - 1) / 2.0

    def distortion(delta: float) -> float:
        t = parts / delta + (levels - 1) / 2.0
        idx = np.clip(np.ceil(t - 0.5), 0, levels - 1)
        snapped = delta * (idx - (levels - 1) / 2.0)
        return float(np.sum((parts - snapped) ** 2))

    # labels reach +-delta*(L-1)/2; 2*max|part| per unit offset covers the optimum
    delta_hi = 2.0 * float(np.max(np.abs(parts))) / max(float(offsets[-1]), 0.5)
    grid = np.linspace(delta_hi / grid_points, delta_hi, grid_points)
    costs = [distortion(d) for d in grid]
    best = int(np.argmin(costs))

    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid_points - 1)]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = distortion(c), distortion(d)
    for _ in range(refine_iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = distortion(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = distortion(d)
    candidates = [(distortion(grid[best]), grid[best]), (fc, c), (fd, d)]
    return float(min(candidates)[1])
