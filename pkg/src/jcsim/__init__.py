"""Exact Jaynes-Cummings dynamics on a truncated atom (x) field space.

Basis: atom-major, ``|e>`` before ``|g>``; ``index(|e,n>) = n`` and
``index(|g,n>) = n_max + 1 + n``.  ``hbar = 1`` and times are ``g t`` unless
``absolute=True``.
"""

from .dynamics import (
    block_trajectory,
    evolution_operator,
    evolve_density,
    evolve_numeric_oracle,
    evolve_pure,
    propagator,
)
from .errors import (
    ConfigError,
    DimensionError,
    ImpossibleOutcomeError,
    JCSimError,
    NormalizationError,
    ProtocolError,
    RegimeError,
    TruncationError,
)
from .hilbert import HilbertDims, ket, partial_trace
from .measurement import kraus_pair, nonselective_map, selective_update
from .model import JCParams, build_jc_hamiltonian, build_rabi_hamiltonian, manifold, normal_modes
from .observables import atomic_probabilities, rabi_spectrum, weighted_excitation
from .protocols import SequenceStep, epr_sequence, run_sequence, swap_excitation
from .states import atom_state, coherent_state, fock_state, product_state, thermal_state

__version__ = "0.1.0"
