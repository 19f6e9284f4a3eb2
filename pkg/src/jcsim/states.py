"""Initial states: Fock, coherent, thermal and atomic superpositions.

Truncated distributions are renormalized; the discarded probability is kept
as ``tail_mass`` on the returned :class:`FieldState`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError, NormalizationError, TruncationError
from .hilbert import basis, projector, tensor

TAIL_TOL = 1e-10
NMAX_ENV = "JCSIM_NMAX_DEFAULT"


@dataclass(frozen=True)
class FieldState:
    """A prepared field state with its truncation bookkeeping.

    ``data`` is a ket (pure states) or a density matrix (thermal).
    """

    data: np.ndarray
    kind: str
    tail_mass: float = 0.0
    params: dict = field(default_factory=dict)

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def field_dim(self) -> int:
        return self.data.shape[0]

    def density(self) -> np.ndarray:
        return projector(self.data) if self.is_pure else self.data

    def photon_probabilities(self) -> np.ndarray:
        if self.is_pure:
            return np.abs(self.data) ** 2
        return np.real(np.diag(self.data))


def fock_state(n: int, n_max: int) -> np.ndarray:
    if not 0 <= n <= n_max:
        raise DimensionError(f"Fock number {n} outside 0..{n_max}")
    return basis(n_max + 1, n)


def poisson_pmf(mean: float, n_max: int) -> np.ndarray:
    """Untruncated Poisson probabilities for ``n = 0..n_max`` (log-space)."""
    n = np.arange(n_max + 1)
    if mean == 0:
        return (n == 0).astype(float)
    log_p = -mean + n * math.log(mean) - np.array([math.lgamma(k + 1) for k in n])
    return np.exp(log_p)


def thermal_pmf(mean_n: float, n_max: int) -> np.ndarray:
    """Untruncated Bose-Einstein probabilities ``<N>^n / (1 + <N>)^(n+1)``."""
    n = np.arange(n_max + 1)
    if mean_n == 0:
        return (n == 0).astype(float)
    q = mean_n / (1.0 + mean_n)
    return (1.0 - q) * q**n


def _tail_guard(kind: str, tail: float, n_max: int, tail_tol: float) -> None:
    if tail > tail_tol:
        raise TruncationError(
            f"{kind} state loses probability {tail:.3g} above n_max={n_max} "
            f"(tolerance {tail_tol:g})"
        )


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    """Untruncated Glauber amplitudes ``exp(-|alpha|^2/2) alpha^n / sqrt(n!)``."""
    n = np.arange(n_max + 1)
    r = abs(alpha)
    if r == 0:
        return (n == 0).astype(complex)
    mag = np.exp(-0.5 * r * r + n * math.log(r)
                 - 0.5 * np.array([math.lgamma(k + 1) for k in n]))
    return mag * np.exp(1j * n * np.angle(alpha))


def coherent_field(alpha: complex, n_max: int, tail_tol: float = TAIL_TOL) -> FieldState:
    amps = coherent_amplitudes(alpha, n_max)
    kept = float(np.sum(np.abs(amps) ** 2))
    tail = max(0.0, 1.0 - kept)
    _tail_guard("coherent", tail, n_max, tail_tol)
    return FieldState(amps / math.sqrt(kept), "coherent", tail, {"alpha": complex(alpha)})


def coherent_state(alpha: complex, n_max: int, tail_tol: float = TAIL_TOL) -> np.ndarray:
    """Truncated, renormalized coherent-state ket."""
    return coherent_field(alpha, n_max, tail_tol).data


def thermal_field(mean_n: float, n_max: int, tail_tol: float = TAIL_TOL) -> FieldState:
    if mean_n < 0:
        raise ValueError(f"mean_n must be >= 0, got {mean_n}")
    probs = thermal_pmf(mean_n, n_max)
    # closed-form tail q^(n_max+1) avoids 1 - sum cancellation
    tail = 0.0 if mean_n == 0 else (mean_n / (1.0 + mean_n)) ** (n_max + 1)
    _tail_guard("thermal", tail, n_max, tail_tol)
    rho = np.diag(probs / probs.sum()).astype(complex)
    return FieldState(rho, "thermal", tail, {"mean_n": float(mean_n)})


def thermal_state(mean_n: float, n_max: int, tail_tol: float = TAIL_TOL) -> np.ndarray:
    """Diagonal thermal density matrix, renormalized after truncation."""
    return thermal_field(mean_n, n_max, tail_tol).data


def atom_state(c_e: complex, c_g: complex) -> np.ndarray:
    """Atomic ket ``c_e |e> + c_g |g>``."""
    v = np.array([c_e, c_g], dtype=complex)
    norm2 = float(np.sum(np.abs(v) ** 2))
    if abs(norm2 - 1.0) > 1e-9:
        raise NormalizationError(f"|c_e|^2 + |c_g|^2 = {norm2:.12g}, expected 1")
    return v


def bloch_atom(theta: float, phi: float = 0.0) -> np.ndarray:
    """``cos(theta/2)|e> + exp(i phi) sin(theta/2)|g>``."""
    return atom_state(math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2))


def from_amplitudes(amplitudes, normalize: bool = True) -> np.ndarray:
    """Raw-amplitude constructor."""
    v = np.asarray(amplitudes, dtype=complex)
    if v.ndim != 1:
        raise DimensionError(f"amplitudes must be 1-D, got shape {v.shape}")
    norm = np.linalg.norm(v)
    if normalize:
        if norm == 0:
            raise NormalizationError("zero amplitude vector")
        return v / norm
    if abs(norm - 1.0) > 1e-9:
        raise NormalizationError(f"amplitude norm {norm:.12g} != 1")
    return v


def product_state(atom: np.ndarray, field_state: np.ndarray) -> np.ndarray:
    """Atom (x) field product; mixed if either factor is a density matrix."""
    atom = np.asarray(atom, dtype=complex)
    field_state = np.asarray(field_state, dtype=complex)
    if atom.ndim == 1 and field_state.ndim == 1:
        return tensor(atom, field_state)
    a = projector(atom) if atom.ndim == 1 else atom
    f = projector(field_state) if field_state.ndim == 1 else field_state
    return tensor(a, f)


def default_n_max_coherent(alpha: complex) -> int:
    r = abs(alpha)
    return int(math.ceil(r * r + 8 * r + 10))


def default_n_max_thermal(mean_n: float, tail_tol: float = TAIL_TOL) -> int:
    if mean_n == 0:
        return 2
    q = mean_n / (1.0 + mean_n)
    return int(math.ceil(math.log(tail_tol) / math.log(q)))


def default_n_max(kind: str, *, n: int = 0, alpha: complex = 0.0, mean_n: float = 0.0) -> int:
    """Default truncation per field kind; ``JCSIM_NMAX_DEFAULT`` overrides it."""
    env = os.environ.get(NMAX_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"{NMAX_ENV} must be an integer, got {env!r}") from None
        if value < 1:
            raise ConfigError(f"{NMAX_ENV} must be >= 1, got {value}")
        return value
    if kind == "fock":
        return max(n + 3, 4)
    if kind == "coherent":
        return default_n_max_coherent(alpha)
    if kind == "thermal":
        return default_n_max_thermal(mean_n)
    raise ValueError(f"unknown field kind {kind!r}")
