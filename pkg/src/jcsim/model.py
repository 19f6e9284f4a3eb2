"""Jaynes-Cummings and Rabi Hamiltonians, per-manifold spectra and dressed states.

Units: hbar = 1.  Each manifold ``n`` is the pair ``{|e,n>, |g,n+1>}``, in that
order, coupled with strength ``g sqrt(n+1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, RegimeError
from .hilbert import ATOM_DIM, atomic_operators, ladder_operators, tensor

RESONANCE_TOL = 1e-12


@dataclass(frozen=True)
class JCParams:
    """Cavity frequency ``omega``, atomic frequency ``omega_a`` and coupling ``g``."""

    omega: float
    omega_a: float
    g: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if not self.omega_a > 0:
            raise ValueError(f"omega_a must be > 0, got {self.omega_a}")
        if not self.g >= 0:
            raise ValueError(f"g must be >= 0, got {self.g}")

    @classmethod
    def from_detuning(cls, g: float, delta: float = 0.0, omega: float = 1.0) -> "JCParams":
        return cls(omega=omega, omega_a=omega + delta, g=g)

    @property
    def delta(self) -> float:
        return self.omega_a - self.omega

    def resonant(self) -> bool:
        return abs(self.delta) < RESONANCE_TOL * self.omega


@dataclass(frozen=True)
class Manifold:
    """Analytic record of the two-level block ``{|e,n>, |g,n+1>}``.

    ``dressed_plus``/``dressed_minus`` are real 2-vectors in that naked basis.
    ``degenerate`` flags ``g = delta = 0``, where the mixing angle is a convention.
    """

    n: int
    g: float
    delta: float
    omega_n: float
    r_n: float
    theta_n: float
    e_plus: float
    e_minus: float
    dressed_plus: np.ndarray
    dressed_minus: np.ndarray
    degenerate: bool = False

    @property
    def sin_theta(self) -> float:
        return float(self.dressed_plus[0])

    @property
    def cos_theta(self) -> float:
        return float(self.dressed_plus[1])


def _check_n_max(n_max: int) -> None:
    if n_max < 1:
        raise DimensionError(f"n_max must be >= 1, got {n_max}")


def free_hamiltonian(p: JCParams, n_max: int) -> np.ndarray:
    """``(omega_a / 2) r3 + omega (a_dag a + 1/2)`` including the zero-point term."""
    _check_n_max(n_max)
    d = n_max + 1
    a, a_dag = ladder_operators(d)
    _, _, r3 = atomic_operators()
    return (0.5 * p.omega_a) * tensor(r3, np.eye(d)) + p.omega * tensor(
        np.eye(ATOM_DIM), a_dag @ a + 0.5 * np.eye(d)
    )


def interaction_hamiltonian(p: JCParams, n_max: int) -> np.ndarray:
    """Rotating-wave coupling ``g (a r_plus + a_dag r_minus)``."""
    _check_n_max(n_max)
    a, a_dag = ladder_operators(n_max + 1)
    r_plus, r_minus, _ = atomic_operators()
    return p.g * (tensor(r_plus, a) + tensor(r_minus, a_dag))


def counter_rotating_hamiltonian(p: JCParams, n_max: int) -> np.ndarray:
    """The terms ``g (r_plus a_dag + r_minus a)`` dropped by the RWA."""
    _check_n_max(n_max)
    a, a_dag = ladder_operators(n_max + 1)
    r_plus, r_minus, _ = atomic_operators()
    return p.g * (tensor(r_plus, a_dag) + tensor(r_minus, a))


def build_jc_hamiltonian(p: JCParams, n_max: int) -> np.ndarray:
    return free_hamiltonian(p, n_max) + interaction_hamiltonian(p, n_max)


def build_rabi_hamiltonian(p: JCParams, n_max: int) -> np.ndarray:
    """Full dipole coupling ``g (r_plus + r_minus)(a + a_dag)`` without the RWA."""
    return build_jc_hamiltonian(p, n_max) + counter_rotating_hamiltonian(p, n_max)


def manifold_block(h: np.ndarray, n: int) -> np.ndarray:
    """Extract the 2x2 block of ``h`` on ``{|e,n>, |g,n+1>}``."""
    d = h.shape[0] // ATOM_DIM
    if not 0 <= n < d - 1:
        raise DimensionError(f"manifold {n} not contained in n_max={d - 1}")
    idx = [n, d + n + 1]
    return h[np.ix_(idx, idx)]


def naked_energies(p: JCParams, n: int) -> tuple[float, float]:
    """Uncoupled energies ``(E_{e,n}, E_{g,n+1})``."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    base = (n + 1) * p.omega
    return base + 0.5 * p.delta, base - 0.5 * p.delta


def manifold(p: JCParams, n: int, n_max: int | None = None) -> Manifold:
    """Eigenvalues, mixing angle and dressed states of manifold ``n``.

    ``sin(theta) = Omega / sqrt((R - delta)^2 + Omega^2)`` and
    ``cos(theta) = (R - delta) / sqrt(...)`` with ``R = sqrt(Omega^2 + delta^2)``.
    For ``delta > 0`` the angle is taken from ``(R + delta) / Omega`` to avoid
    cancellation far off resonance; this also fixes the ``g -> 0`` limits
    (``pi/2`` for ``delta > 0``, ``0`` for ``delta < 0``).
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n_max is not None and n > n_max - 1:
        raise DimensionError(f"manifold {n} needs |g,{n + 1}>, beyond n_max={n_max}")
    delta = p.delta
    omega_n = 2.0 * p.g * math.sqrt(n + 1)
    r_n = math.hypot(omega_n, delta)
    degenerate = False
    if r_n == 0.0:
        # g = 0 and delta = 0: any basis diagonalizes; use the resonant convention
        theta = math.pi / 4
        degenerate = True
    elif delta > 0:
        # tan(theta) = Omega / (R - delta) = (R + delta) / Omega, free of cancellation
        theta = math.atan2(r_n + delta, omega_n)
    else:
        theta = math.atan2(omega_n, r_n - delta)
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    base = (n + 1) * p.omega
    return Manifold(
        n=n,
        g=p.g,
        delta=delta,
        omega_n=omega_n,
        r_n=r_n,
        theta_n=theta,
        e_plus=base + 0.5 * r_n,
        e_minus=base - 0.5 * r_n,
        dressed_plus=np.array([sin_t, cos_t]),
        dressed_minus=np.array([cos_t, -sin_t]),
        degenerate=degenerate,
    )


@dataclass(frozen=True)
class NormalModes:
    freq_plus: float
    freq_minus: float
    mapping: dict

    def __iter__(self):
        return iter((self.freq_plus, self.freq_minus, self.mapping))


def normal_modes(p: JCParams) -> NormalModes:
    """Coupled-oscillator picture of the vacuum manifold at resonance.

    The modes ``c = (a + b)/sqrt2`` and ``d = (a - b)/sqrt2`` oscillate at
    ``omega + g`` and ``omega - g``; their single quanta correspond to the
    dressed states ``|+0>`` and ``|-0>``.
    """
    if not p.resonant():
        raise RegimeError("normal-mode correspondence requires delta = 0")
    mapping = {"|1_c,0_d>": "|+0> = (|e,0> + |g,1>)/sqrt2",
               "|0_c,1_d>": "|-0> = (|e,0> - |g,1>)/sqrt2"}
    return NormalModes(p.omega + p.g, p.omega - p.g, mapping)
