"""Atoms crossing a shared cavity mode one after another.

The joint register is ``atom_1 (x) ... (x) atom_k (x) field``, atoms in
injection order, each with ``|e>`` before ``|g>``.  A step injects a fresh
atom and lets it interact resonantly with the field for a pulse area
``Omega_0 t = 2 g t``; earlier atoms are spectators.

Two phase conventions are available for the single-atom propagator:

``"standard"``
    ``|e,n> -> cos |e,n> - i sin |g,n+1>``
``"real"``
    ``|e,n> -> cos |e,n> + sin |g,n+1>`` and ``|g,n+1> -> cos |g,n+1> - sin |e,n>``.
    This is the standard propagator conjugated by the local phase
    ``diag(1, -i)`` on the interacting atom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import propagator
from .errors import DimensionError, ProtocolError, TruncationError
from .hilbert import basis, fidelity_pure, normalize, partial_trace_subsystems, purity
from .model import JCParams
from .states import atom_state

MAX_ATOMS = 4
MAX_N_MAX = 8
CONVENTIONS = ("standard", "real")
EDGE_TOL = 1e-10

_UNIT = JCParams.from_detuning(g=1.0)


@dataclass(frozen=True)
class SequenceStep:
    """Inject an atom in ``atom_init`` and apply a pulse of area ``Omega_0 t``.

    ``wait_after`` is the idle time before the next atom; it has no effect on
    the (dissipation-free) dynamics.
    """

    atom_init: object = "g"
    pulse_area: float = math.pi
    wait_after: float = 0.0

    def __post_init__(self):
        if self.pulse_area < 0:
            raise ProtocolError(f"pulse_area must be >= 0, got {self.pulse_area}")
        if self.wait_after < 0:
            raise ProtocolError(f"wait_after must be >= 0, got {self.wait_after}")

    def atom_vector(self) -> np.ndarray:
        init = self.atom_init
        if isinstance(init, str):
            if init == "e":
                return atom_state(1, 0)
            if init == "g":
                return atom_state(0, 1)
            raise ProtocolError(f"atom_init must be 'e', 'g' or two amplitudes, got {init!r}")
        vec = np.asarray(init, dtype=complex)
        if vec.shape != (2,):
            raise ProtocolError(f"atom_init must have two amplitudes, got shape {vec.shape}")
        return atom_state(*vec)


@dataclass(frozen=True)
class MultiAtomState:
    n_atoms: int
    field_dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        expected = 2**self.n_atoms * self.field_dim
        if amps.shape != (expected,):
            raise DimensionError(f"expected {expected} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def vacuum(cls, n_max: int) -> "MultiAtomState":
        return cls(0, n_max + 1, basis(n_max + 1, 0))

    @property
    def n_max(self) -> int:
        return self.field_dim - 1

    @property
    def dims(self) -> tuple[int, ...]:
        return (2,) * self.n_atoms + (self.field_dim,)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def reduced(self, atoms=(), field: bool = False) -> np.ndarray:
        """Reduced density matrix on the listed atoms (0-based) and optionally the field."""
        keep = list(atoms) + ([self.n_atoms] if field else [])
        if any(not 0 <= a < self.n_atoms for a in atoms):
            raise ProtocolError(f"atom indices {list(atoms)} out of range for {self.n_atoms} atoms")
        return partial_trace_subsystems(self.amplitudes, self.dims, keep)

    def field_populations(self) -> np.ndarray:
        return np.real(np.diag(self.reduced(field=True)))

    def with_atom(self, atom: np.ndarray) -> "MultiAtomState":
        if self.n_atoms >= MAX_ATOMS:
            raise ProtocolError(f"at most {MAX_ATOMS} atoms are supported")
        amps = self.amplitudes.reshape(2**self.n_atoms, self.field_dim)
        joint = np.einsum("kf,a->kaf", amps, np.asarray(atom, dtype=complex))
        return MultiAtomState(self.n_atoms + 1, self.field_dim, joint.reshape(-1))


def step_unitary(pulse_area: float, n_max: int, convention: str = "standard") -> np.ndarray:
    """Resonant atom (x) field propagator for a pulse of area ``2 g t``."""
    if convention not in CONVENTIONS:
        raise ProtocolError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    u = propagator(_UNIT, 0.5 * pulse_area, n_max)
    if convention == "real":
        d = n_max + 1
        phase = np.concatenate([np.ones(d), np.full(d, -1j)])
        u = phase.conj()[:, None] * u * phase[None, :]
    return u


def interact(state: MultiAtomState, atom: int, pulse_area: float,
             convention: str = "standard") -> MultiAtomState:
    """Couple atom ``atom`` to the field; all other atoms are untouched."""
    if not 0 <= atom < state.n_atoms:
        raise ProtocolError(f"no atom {atom} in a register of {state.n_atoms}")
    top = state.field_populations()[-1]
    if top > EDGE_TOL:
        raise TruncationError(f"population {top:.3g} at n_max={state.n_max}; increase n_max")
    u = step_unitary(pulse_area, state.n_max, convention)
    d = state.field_dim
    # axes: (atoms before, this atom, atoms after, field); u acts on (atom, field)
    t = state.amplitudes.reshape(2**atom, 2, 2 ** (state.n_atoms - atom - 1), d)
    t = np.einsum("afbg,pbqg->paqf", u.reshape(2, d, 2, d), t)
    return MultiAtomState(state.n_atoms, d, t.reshape(-1))


def _check_limits(n_max: int) -> None:
    if not 1 <= n_max <= MAX_N_MAX:
        raise ProtocolError(f"protocol n_max must be in 1..{MAX_N_MAX}, got {n_max}")


def run_sequence(steps, n_max: int, convention: str = "standard",
                 initial: MultiAtomState | None = None) -> MultiAtomState:
    """Inject one atom per step and apply its pulse; returns the joint state."""
    _check_limits(n_max)
    state = MultiAtomState.vacuum(n_max) if initial is None else initial
    if state.field_dim != n_max + 1:
        raise ProtocolError("initial state does not match n_max")
    steps = list(steps)
    if state.n_atoms + len(steps) > MAX_ATOMS:
        raise ProtocolError(f"at most {MAX_ATOMS} atoms are supported")
    for step in steps:
        state = state.with_atom(step.atom_vector())
        state = interact(state, state.n_atoms - 1, step.pulse_area, convention)
    return state


def swap_excitation(atom, n_max: int = 2) -> tuple[np.ndarray, float]:
    """Pi pulse of an atom on the vacuum: ``(c_e|e> + c_g|g>)|0> -> |g>(-i c_e|1> + c_g|0>)``.

    Returns the final atom (x) field ket and its fidelity to that target.
    """
    atom = atom_state(*np.asarray(atom, dtype=complex))
    final = run_sequence([SequenceStep(atom, math.pi)], n_max).amplitudes
    c_e, c_g = atom
    field = np.zeros(n_max + 1, dtype=complex)
    field[0], field[1] = c_g, -1j * c_e
    target = np.kron(np.array([0, 1]), field)
    return final, fidelity_pure(final, target)


def double_swap(atom, n_max: int = 2) -> tuple[np.ndarray, float]:
    """Write an atomic state into the cavity and read it out with a second atom.

    Returns the second atom's reduced state and its fidelity to ``(-c_e, c_g)``.
    """
    atom = atom_state(*np.asarray(atom, dtype=complex))
    state = run_sequence([SequenceStep(atom, math.pi), SequenceStep("g", math.pi)], n_max)
    rho2 = state.reduced(atoms=[1])
    target = np.array([-atom[0], atom[1]])
    return rho2, float(np.real(target.conj() @ rho2 @ target))


EPR_STEPS = (SequenceStep("e", math.pi / 2), SequenceStep("g", math.pi))


def epr_sequence(n_max: int = 3, convention: str = "real") -> MultiAtomState:
    """Entangle two atoms through the cavity vacuum (pi/2 then pi pulse)."""
    return run_sequence(EPR_STEPS, n_max, convention)


def bell_state(relative_phase: float) -> np.ndarray:
    """``(|e1 g2> + exp(i phase) |g1 e2>) / sqrt2`` on two atoms."""
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0
    v[2] = np.exp(1j * relative_phase)
    return normalize(v)


def bell_report(state: MultiAtomState) -> dict:
    """Diagnostics of the first two atoms of a register.

    ``bell_fidelity`` is maximized over the relative phase of
    ``|e1 g2> + e^{i phi} |g1 e2>``, i.e. up to a local phase on one atom;
    ``bell_phase`` is the optimal ``phi`` in ``(-pi, pi]``.
    """
    if state.n_atoms < 2:
        raise ProtocolError("need at least two atoms")
    rho = state.reduced(atoms=[0, 1])
    coh = rho[2, 1]   # <g1 e2| rho |e1 g2>
    fid = 0.5 * float(np.real(rho[1, 1] + rho[2, 2])) + float(abs(coh))
    phase = float(np.angle(coh))
    single = [state.reduced(atoms=[k]) for k in (0, 1)]
    return {
        "bell_fidelity": min(fid, 1.0),
        "bell_phase": phase,
        "singlet_fidelity": float(np.real(bell_state(np.pi).conj() @ rho @ bell_state(np.pi))),
        "pair_purity": purity(rho),
        "field_vacuum": float(state.field_populations()[0]),
        "single_atom_deviation": max(float(np.max(np.abs(r - 0.5 * np.eye(2)))) for r in single),
    }
