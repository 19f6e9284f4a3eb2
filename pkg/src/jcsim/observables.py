"""Atomic populations, photon statistics, collapse/revival and Rabi spectra.

All time grids are in units of ``g t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import block_trajectory
from .errors import DimensionError, NormalizationError, RegimeError
from .model import JCParams

SPECTRUM_THRESHOLD = 0.05
DEFAULT_T_MAX = 64.0
DEFAULT_SAMPLES = 4096


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise DimensionError(f"times {times.shape} and values {values.shape} must match")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly ascending")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.times.size

    def window(self, start: float, stop: float) -> np.ndarray:
        """Values with ``start <= t <= stop``."""
        mask = (self.times >= start) & (self.times <= stop)
        return self.values[mask]


@dataclass(frozen=True)
class SpectrumPeaks:
    """Peaks of a Rabi spectrum.

    ``frequencies`` are angular frequencies in units of ``g`` (equivalently
    ordinary frequencies in units of ``g / 2 pi``), so the vacuum Rabi peak
    sits at 2.  ``weights`` are the fitted cosine amplitudes of each component.
    """

    frequencies: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if f.shape != w.shape:
            raise DimensionError("frequencies and weights must have equal length")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise ValueError("frequencies must be ascending")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.frequencies.size

    def normalized_weights(self) -> np.ndarray:
        total = self.weights.sum()
        return self.weights / total if total > 0 else self.weights

    def ratios(self) -> np.ndarray:
        """Frequencies relative to the lowest peak."""
        return self.frequencies / self.frequencies[0]


def time_grid(t_max: float = DEFAULT_T_MAX, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    if not t_max > 0:
        raise ValueError(f"t_max must be > 0, got {t_max}")
    return np.linspace(0.0, t_max, samples)


def atomic_probabilities(rho0, p: JCParams, times) -> tuple[TimeSeries, TimeSeries]:
    """``P_e(t)`` and ``P_g(t)`` for an atom (x) field state (ket or density)."""
    traj = block_trajectory(rho0, p, times)
    pe, pg = traj.atom_populations()
    return TimeSeries(traj.times, pe, "Pe"), TimeSeries(traj.times, pg, "Pg")


def _check_distribution(pn) -> np.ndarray:
    pn = np.asarray(pn, dtype=float)
    if pn.ndim != 1:
        raise DimensionError("photon distribution must be 1-D")
    if np.any(pn < -1e-15):
        raise NormalizationError("photon distribution has negative entries")
    if abs(pn.sum() - 1.0) > 1e-9:
        raise NormalizationError(f"photon distribution sums to {pn.sum():.12g}")
    return pn


def weighted_excitation(pn, p: JCParams, times) -> TimeSeries:
    """Excited-state probability for an excited atom and a diagonal field.

    ``P_e(t) = sum_n P_n [1 - (Omega_n / R_n)^2 sin^2(R_n t / 2)]``, which at
    resonance is ``1/2 [1 + sum_n P_n cos(Omega_n t)]``.  Uses the untruncated
    Rabi frequencies for every ``n`` in ``pn``.
    """
    pn = _check_distribution(pn)
    if p.g <= 0:
        raise RegimeError("weighted_excitation needs g > 0 for g*t time units")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    n = np.arange(pn.size)
    omega_n = 2.0 * np.sqrt(n + 1.0)          # units of g
    delta = p.delta / p.g
    r_n = np.hypot(omega_n, delta)
    if delta == 0:
        terms = 0.5 * (1.0 + np.cos(np.outer(times, omega_n)))
    else:
        contrast = (omega_n / r_n) ** 2
        terms = 1.0 - contrast * np.sin(0.5 * np.outer(times, r_n)) ** 2
    return TimeSeries(times, terms @ pn, "Pe")


def collapse_envelope(alpha_mod: float, g: float, t):
    """Large-amplitude approximation ``1/2 [1 + cos(2 g |alpha| t) exp(-g^2 t^2 / 2)]``.

    ``t`` is absolute time.
    """
    t = np.asarray(t, dtype=float)
    out = 0.5 * (1.0 + np.cos(2.0 * g * alpha_mod * t) * np.exp(-0.5 * (g * t) ** 2))
    return float(out) if out.ndim == 0 else out


class RevivalTimes(NamedTuple):
    approx: np.ndarray
    exact: np.ndarray


def revival_times(alpha_mod: float, g: float, j_max: int) -> RevivalTimes:
    """Revival times ``j 2 pi |alpha| / g`` and the neighbour-rephasing form.

    The second form is ``2 pi j / (2 g (|alpha| - sqrt(|alpha|^2 - 1)))``.
    """
    if alpha_mod < 1:
        raise RegimeError(f"revival estimate needs |alpha| >= 1, got {alpha_mod}")
    if g <= 0:
        raise RegimeError("revival times need g > 0")
    j = np.arange(1, j_max + 1, dtype=float)
    approx = j * 2.0 * np.pi * alpha_mod / g
    exact = 2.0 * np.pi * j / (2.0 * g * (alpha_mod - math.sqrt(alpha_mod**2 - 1.0)))
    return RevivalTimes(approx, exact)


def _rolling_max(x: np.ndarray, width: int) -> np.ndarray:
    if width <= 1:
        return x.copy()
    pad = width // 2
    padded = np.pad(x, pad, mode="edge")
    windows = np.lib.stride_tricks.sliding_window_view(padded, 2 * pad + 1)
    return windows.max(axis=1)


class Revival(NamedTuple):
    time: float
    height: float
    collapse_time: float


def find_first_revival(series: TimeSeries, *, window: float = 2.0,
                       low: float = 0.1, high: float = 0.15) -> Revival:
    """Locate the first revival of ``|P_e - 1/2|`` after the initial collapse.

    The envelope is a rolling maximum over ``window`` (g t units).  Collapse is
    the first time the envelope drops below ``low``; the revival is the first
    later excursion above ``high``, and its peak is the largest ``|P_e - 1/2|``
    before the envelope falls below ``low`` again.
    """
    t, dev = series.times, np.abs(series.values - 0.5)
    dt = np.median(np.diff(t))
    env = _rolling_max(dev, max(1, int(round(window / dt))))
    below = np.nonzero(env < low)[0]
    if below.size == 0:
        raise RegimeError("no collapse found in the series")
    i_collapse = below[0]
    above = np.nonzero(env[i_collapse:] > high)[0]
    if above.size == 0:
        raise RegimeError("no revival found after the collapse")
    i_start = i_collapse + above[0]
    after = np.nonzero(env[i_start:] < low)[0]
    i_stop = i_start + after[0] if after.size else t.size
    k = i_start + int(np.argmax(dev[i_start:i_stop]))
    return Revival(float(t[k]), float(dev[k]), float(t[i_collapse]))


def rabi_spectrum(series: TimeSeries, threshold: float = SPECTRUM_THRESHOLD,
                  pad_factor: int = 16) -> SpectrumPeaks:
    """Frequency comb of a population trace.

    The mean-subtracted, Hann-windowed trace is zero-padded and Fourier
    transformed; local maxima above ``threshold`` times the largest one are
    refined by parabolic interpolation.  The amplitude of each component is
    then obtained by a linear least-squares fit of cosines and sines at the
    peak frequencies, which removes window scalloping and leakage bias.
    """
    t = series.times
    if t.size < 8:
        raise ValueError("series too short for a spectrum")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt.mean())) > 1e-9 * max(1.0, abs(dt.mean())):
        raise ValueError("rabi_spectrum requires a uniform time grid")
    step = dt.mean()
    x = series.values - series.values.mean()
    n_fft = pad_factor * t.size
    mag = np.abs(np.fft.rfft(x * np.hanning(t.size), n=n_fft))
    ang = 2.0 * np.pi * np.fft.rfftfreq(n_fft, d=step)

    interior = (mag[1:-1] > mag[:-2]) & (mag[1:-1] >= mag[2:])
    idx = np.nonzero(interior)[0] + 1
    if idx.size == 0:
        return SpectrumPeaks(np.array([]), np.array([]))
    idx = idx[mag[idx] >= threshold * mag[idx].max()]

    freqs = []
    for i in idx:
        a, b, c = mag[i - 1], mag[i], mag[i + 1]
        denom = a - 2 * b + c
        shift = 0.5 * (a - c) / denom if denom != 0 else 0.0
        freqs.append(ang[i] + shift * (ang[1] - ang[0]))
    freqs = np.asarray(freqs)

    design = np.hstack([np.cos(np.outer(t, freqs)), np.sin(np.outer(t, freqs)),
                        np.ones((t.size, 1))])
    coef, *_ = np.linalg.lstsq(design, series.values, rcond=None)
    k = freqs.size
    weights = np.hypot(coef[:k], coef[k:2 * k])
    return SpectrumPeaks(freqs, weights)


def photon_distribution(rho_f) -> np.ndarray:
    """Fock-basis populations of a field ket or density matrix."""
    rho_f = np.asarray(rho_f, dtype=complex)
    if rho_f.ndim == 1:
        probs = np.abs(rho_f) ** 2
    else:
        if rho_f.shape[0] != rho_f.shape[1]:
            raise DimensionError(f"field operator must be square, got {rho_f.shape}")
        probs = np.real(np.diag(rho_f))
    if abs(probs.sum() - 1.0) > 1e-10:
        raise NormalizationError(f"field state trace {probs.sum():.15g} != 1")
    return probs


def conservation_drift(rho0, p: JCParams, times, h: np.ndarray, n_op: np.ndarray) -> dict:
    """Maximum deviation of ``<N>`` and ``<H>`` from their initial values."""
    traj = block_trajectory(rho0, p, times)
    en = traj.block_expectation(n_op)
    eh = traj.block_expectation(h)
    return {"N_drift": float(np.max(np.abs(en - en[0]))),
            "H_drift": float(np.max(np.abs(eh - eh[0])))}


def density_report(rho) -> dict:
    """Hermiticity, trace and positivity diagnostics for a density matrix."""
    rho = np.asarray(rho, dtype=complex)
    return {
        "hermiticity": float(np.max(np.abs(rho - rho.conj().T))),
        "trace_error": float(abs(np.trace(rho) - 1.0)),
        "min_eigenvalue": float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()),
    }

