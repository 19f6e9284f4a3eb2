"""Exact time evolution of the Jaynes-Cummings model.

Times are dimensionless ``tau = g t`` unless ``absolute=True`` is passed.

The default output frame strips the free phase ``exp(-i omega N t)`` (``N`` the
total excitation number, which commutes with ``H``), so manifold ``n`` carries
no ``(n+1) omega`` phase.  ``picture="schrodinger"`` multiplies it back and
then agrees with ``exp(-i H t)`` of :func:`jcsim.model.build_jc_hamiltonian`.

Two analytic routes are provided and cross-checked against each other and
against :func:`evolve_numeric_oracle`:

* the manifold route (any detuning) applies the 2x2 coefficient propagator to
  every block ``{|e,n>, |g,n+1>}``.  On the truncated space the orphan states
  ``|g,0>`` and ``|e,n_max>`` only pick up detuning phases, so this route is
  exactly unitary there;
* the operator route (resonance only) assembles ``U_JC`` from the operator
  functions ``cos(g t sqrt(N))`` etc. evaluated on the Fock diagonal.  Its
  ``u_ee`` block is not norm preserving on ``|e,n_max>``, so inputs must keep
  negligible population near the truncation edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NormalizationError, RegimeError, TruncationError
from .hilbert import (
    ATOM_DIM,
    HilbertDims,
    check_density,
    check_normalized,
    edge_population,
    ladder_operators,
)
from .model import JCParams, Manifold

EDGE_TOL = 1e-10
EDGE_DEPTH = 3
PICTURES = ("interaction", "schrodinger")


def absolute_time(p: JCParams, t, absolute: bool = False):
    """Convert ``t`` to absolute time; dimensionless input needs ``g > 0``."""
    if absolute:
        return np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    if p.g <= 0:
        raise RegimeError("dimensionless time g*t is undefined for g = 0; pass absolute=True")
    return np.asarray(t, dtype=float) / p.g if np.ndim(t) else float(t) / p.g


def _half_sinc(r, t):
    """``sin(r t / 2) / r`` with the ``r -> 0`` limit ``t / 2``.

    The sine takes the same argument as the companion ``cos(r t / 2)`` so that
    ``c^2 + r^2 s^2 = 1`` holds to rounding even for large ``r t``.
    """
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    safe = np.where(r == 0, 1.0, r)
    out = np.where(r == 0, 0.5 * t, np.sin(0.5 * r * t) / safe)
    return out if out.ndim else float(out)


def manifold_propagator(m: Manifold, t: float, absolute: bool = False) -> np.ndarray:
    """2x2 propagator on ``(c_{e,n}, c_{g,n+1})`` with the free phase removed."""
    if absolute:
        t_abs = float(t)
    else:
        if m.g <= 0:
            raise RegimeError("dimensionless time g*t is undefined for g = 0; pass absolute=True")
        t_abs = float(t) / m.g
    c = np.cos(0.5 * m.r_n * t_abs)
    s = _half_sinc(m.r_n, t_abs)
    return np.array([[c - 1j * m.delta * s, -1j * m.omega_n * s],
                     [-1j * m.omega_n * s, c + 1j * m.delta * s]])


def propagate_manifold(m: Manifold, c0, t: float, absolute: bool = False) -> np.ndarray:
    """Evolve the naked-basis coefficients ``(c_{e,n}, c_{g,n+1})`` of one manifold."""
    c0 = np.asarray(c0, dtype=complex)
    if c0.shape != (2,):
        raise DimensionError(f"expected 2 coefficients, got shape {c0.shape}")
    check_normalized(c0, tol=1e-9)
    return manifold_propagator(m, t, absolute) @ c0


def _block_arrays(p: JCParams, t_abs: np.ndarray, n_max: int):
    """Vectorized manifold propagators for every time and ``n < n_max``.

    Returns ``(blocks, phase_g0, phase_etop)`` with ``blocks`` of shape
    ``(T, n_max, 2, 2)`` in the interaction frame.
    """
    t_abs = np.atleast_1d(np.asarray(t_abs, dtype=float))
    n = np.arange(n_max)
    omega_n = 2.0 * p.g * np.sqrt(n + 1.0)
    r_n = np.hypot(omega_n, p.delta)
    tt = t_abs[:, None]
    c = np.cos(0.5 * r_n * tt)
    s = _half_sinc(r_n, tt)
    blocks = np.empty((t_abs.size, n_max, 2, 2), dtype=complex)
    blocks[..., 0, 0] = c - 1j * p.delta * s
    blocks[..., 1, 1] = c + 1j * p.delta * s
    blocks[..., 0, 1] = blocks[..., 1, 0] = -1j * omega_n * s
    phase_g0 = np.exp(0.5j * p.delta * t_abs)
    phase_etop = np.exp(-0.5j * p.delta * t_abs)
    return blocks, phase_g0, phase_etop


def _manifold_indices(field_dim: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(field_dim - 1)
    return n, field_dim + n + 1


def propagator(p: JCParams, t: float, n_max: int, *, absolute: bool = False,
               picture: str = "interaction") -> np.ndarray:
    """Full unitary on the truncated space assembled from manifold blocks."""
    if picture not in PICTURES:
        raise ValueError(f"picture must be one of {PICTURES}, got {picture!r}")
    if n_max < 1:
        raise DimensionError(f"n_max must be >= 1, got {n_max}")
    t_abs = absolute_time(p, t, absolute)
    d = n_max + 1
    blocks, ph_g0, ph_top = _block_arrays(p, t_abs, n_max)
    u = np.zeros((2 * d, 2 * d), dtype=complex)
    ie, ig = _manifold_indices(d)
    u[ie, ie] = blocks[0, :, 0, 0]
    u[ie, ig] = blocks[0, :, 0, 1]
    u[ig, ie] = blocks[0, :, 1, 0]
    u[ig, ig] = blocks[0, :, 1, 1]
    u[d, d] = ph_g0[0]
    u[d - 1, d - 1] = ph_top[0]
    if picture == "schrodinger":
        u = free_phases(p, t_abs, n_max)[:, None] * u
    return u


def free_phases(p: JCParams, t_abs: float, n_max: int) -> np.ndarray:
    """Diagonal of ``exp(-i omega N t)`` in the composite basis."""
    d = n_max + 1
    n = np.arange(d)
    quanta = np.concatenate([n + 1, n])
    return np.exp(-1j * p.omega * quanta * t_abs)


@dataclass(frozen=True)
class EvolutionOperator:
    """Closed-form ``U_JC(t) = exp(-i H_AF t)`` split into field-space blocks.

    ``u_ab`` is ``<a|U|b>`` for atomic labels ``a, b``; ``t`` is ``g t``.
    """

    t: float
    u_gg: np.ndarray
    u_ge: np.ndarray
    u_eg: np.ndarray
    u_ee: np.ndarray

    @property
    def field_dim(self) -> int:
        return self.u_ee.shape[0]

    @property
    def dims(self) -> HilbertDims:
        return HilbertDims(self.field_dim)

    @property
    def assembled(self) -> np.ndarray:
        return np.block([[self.u_ee, self.u_eg], [self.u_ge, self.u_gg]])


def evolution_operator(p: JCParams, t: float, n_max: int,
                       absolute: bool = False) -> EvolutionOperator:
    """Operator-function form of ``exp(-i H_AF t)``.

    The functions of ``N = a_dag a`` are applied elementwise on the Fock
    diagonal.  Only the coupling ``H_AF`` is exponentiated, so the result is
    the resonant interaction-picture propagator whatever ``p.delta`` is.
    """
    if n_max < 1:
        raise DimensionError(f"n_max must be >= 1, got {n_max}")
    gt = p.g * float(t) if absolute else float(t)
    d = n_max + 1
    a, a_dag = ladder_operators(d)
    n = np.arange(d, dtype=float)
    root_n1 = np.sqrt(n + 1.0)
    cos_n = np.diag(np.cos(gt * np.sqrt(n))).astype(complex)
    cos_n1 = np.diag(np.cos(gt * root_n1)).astype(complex)
    sin_n1 = np.diag(np.sin(gt * root_n1) / root_n1).astype(complex)
    return EvolutionOperator(
        t=gt,
        u_gg=cos_n,
        u_ge=-1j * a_dag @ sin_n1,
        u_eg=-1j * sin_n1 @ a,
        u_ee=cos_n1,
    )


def check_edge(state: np.ndarray, field_dim: int, atom_dim: int = ATOM_DIM,
               tol: float = EDGE_TOL) -> None:
    """Raise :class:`TruncationError` if ``state`` populates ``n >= n_max - 2``."""
    pop = edge_population(state, field_dim, EDGE_DEPTH, atom_dim)
    if pop > tol:
        raise TruncationError(
            f"population {pop:.3g} on the top {EDGE_DEPTH} Fock levels exceeds {tol:g}; "
            "increase n_max"
        )


def _dims_of(state: np.ndarray) -> HilbertDims:
    return HilbertDims.from_total(state.shape[0])


def evolve_pure(psi0, p: JCParams, t: float, *, absolute: bool = False,
                picture: str = "interaction", method: str = "manifold") -> np.ndarray:
    """Evolve a normalized atom (x) field ket.

    ``method="operator"`` uses :func:`evolution_operator` and is limited to
    resonance and to states away from the truncation edge.
    """
    psi0 = check_normalized(psi0, tol=1e-9)
    dims = _dims_of(psi0)
    if method == "manifold":
        u = propagator(p, t, dims.n_max, absolute=absolute, picture=picture)
        return u @ psi0
    if method == "operator":
        u = _operator_route(psi0, p, t, dims, absolute, picture)
        return u @ psi0
    raise ValueError(f"method must be 'manifold' or 'operator', got {method!r}")


def _operator_route(state, p, t, dims, absolute, picture):
    if not p.resonant():
        raise RegimeError("the closed-form U_JC blocks hold only at resonance")
    check_edge(state, dims.field_dim)
    u = evolution_operator(p, t, dims.n_max, absolute=absolute).assembled
    if picture == "schrodinger":
        u = free_phases(p, absolute_time(p, t, absolute), dims.n_max)[:, None] * u
    elif picture not in PICTURES:
        raise ValueError(f"picture must be one of {PICTURES}, got {picture!r}")
    return u


def evolve_density(rho0, p: JCParams, t: float, *, absolute: bool = False,
                   picture: str = "interaction", method: str = "manifold") -> np.ndarray:
    """``U rho0 U_dag`` for an atom (x) field density operator."""
    rho0 = check_density(rho0)
    dims = _dims_of(rho0)
    if method == "manifold":
        u = propagator(p, t, dims.n_max, absolute=absolute, picture=picture)
    elif method == "operator":
        u = _operator_route(rho0, p, t, dims, absolute, picture)
    else:
        raise ValueError(f"method must be 'manifold' or 'operator', got {method!r}")
    rho = u @ rho0 @ u.conj().T
    return 0.5 * (rho + rho.conj().T)


def evolve_numeric_oracle(h: np.ndarray, state, t: float) -> np.ndarray:
    """Brute-force ``exp(-i H t)`` applied to a ket or density operator.

    ``H`` is diagonalized once with ``eigh``; ``t`` is absolute time.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionError(f"Hamiltonian must be square, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise NormalizationError("Hamiltonian is not Hermitian")
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != h.shape[0]:
        raise DimensionError(f"state size {state.shape[0]} vs Hamiltonian {h.shape[0]}")
    evals, evecs = np.linalg.eigh(h)
    u = (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T
    if state.ndim == 1:
        return u @ state
    return u @ state @ u.conj().T


def oracle_atom_populations(h: np.ndarray, state, t_abs) -> tuple[np.ndarray, np.ndarray]:
    """``P_e`` and ``P_g`` under ``exp(-i H t)`` for any Hermitian ``H``.

    One ``eigh`` serves the whole grid; ``t_abs`` is absolute time.
    """
    h = np.asarray(h, dtype=complex)
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise NormalizationError("Hamiltonian is not Hermitian")
    state = np.asarray(state, dtype=complex)
    if state.shape[0] != h.shape[0]:
        raise DimensionError(f"state size {state.shape[0]} vs Hamiltonian {h.shape[0]}")
    t_abs = np.atleast_1d(np.asarray(t_abs, dtype=float))
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * np.outer(t_abs, evals))
    d = h.shape[0] // ATOM_DIM
    excited = evecs[:d]
    if state.ndim == 1:
        amps = (phases * (evecs.conj().T @ state)) @ excited.T
        pe = np.sum(np.abs(amps) ** 2, axis=1)
    else:
        rho_eig = evecs.conj().T @ state @ evecs
        proj = excited.conj().T @ excited
        pe = np.real(np.einsum("ti,ij,tj,ji->t", phases, rho_eig, phases.conj(), proj))
    return pe, 1.0 - pe


@dataclass(frozen=True)
class BlockTrajectory:
    """Manifold-diagonal part of ``rho(t)`` sampled on a time grid.

    ``blocks[k, n]`` is the evolved 2x2 density block on ``{|e,n>, |g,n+1>}``
    at ``times[k]``; ``p_g0`` and ``p_etop`` are the (stationary) populations
    of the uncoupled states ``|g,0>`` and ``|e,n_max>``.  Coherences between
    different manifolds are not stored; every observable that commutes with
    the excitation number only needs these blocks.
    """

    times: np.ndarray
    blocks: np.ndarray
    p_g0: float
    p_etop: float

    @property
    def field_dim(self) -> int:
        return self.blocks.shape[1] + 1

    def atom_populations(self) -> tuple[np.ndarray, np.ndarray]:
        pe = np.real(self.blocks[..., 0, 0]).sum(axis=1) + self.p_etop
        pg = np.real(self.blocks[..., 1, 1]).sum(axis=1) + self.p_g0
        return pe, pg

    def block_expectation(self, op: np.ndarray) -> np.ndarray:
        """``Tr(rho(t) op)`` for an operator that is block diagonal over manifolds."""
        d = self.field_dim
        ie, ig = _manifold_indices(d)
        op_blocks = np.empty((d - 1, 2, 2), dtype=complex)
        op_blocks[:, 0, 0] = op[ie, ie]
        op_blocks[:, 0, 1] = op[ie, ig]
        op_blocks[:, 1, 0] = op[ig, ie]
        op_blocks[:, 1, 1] = op[ig, ig]
        inside = np.einsum("tnij,nji->t", self.blocks, op_blocks)
        edge = self.p_g0 * op[d, d] + self.p_etop * op[d - 1, d - 1]
        return np.real(inside + edge)


def block_trajectory(rho0, p: JCParams, times, *, absolute: bool = False) -> BlockTrajectory:
    """Evolve the manifold blocks of ``rho0`` (or a ket) over ``times``."""
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim == 1:
        check_normalized(rho0, tol=1e-9)
        rho0 = np.outer(rho0, rho0.conj())
    else:
        check_density(rho0)
    dims = _dims_of(rho0)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    t_abs = absolute_time(p, times, absolute)
    blocks, _, _ = _block_arrays(p, t_abs, dims.n_max)
    ie, ig = _manifold_indices(dims.field_dim)
    rho_blocks = np.empty((dims.n_max, 2, 2), dtype=complex)
    rho_blocks[:, 0, 0] = rho0[ie, ie]
    rho_blocks[:, 0, 1] = rho0[ie, ig]
    rho_blocks[:, 1, 0] = rho0[ig, ie]
    rho_blocks[:, 1, 1] = rho0[ig, ig]
    evolved = np.einsum("tnij,njk,tnlk->tnil", blocks, rho_blocks, blocks.conj())
    d = dims.field_dim
    return BlockTrajectory(
        times=times,
        blocks=evolved,
        p_g0=float(np.real(rho0[d, d])),
        p_etop=float(np.real(rho0[d - 1, d - 1])),
    )
