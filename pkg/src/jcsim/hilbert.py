"""Dense linear algebra on the truncated atom (x) field space.

States are plain numpy arrays: kets are 1-D complex vectors, density
operators and observables are 2-D complex matrices.  The composite basis is
atom-major with the excited level first::

    index(|e,n>) = n
    index(|g,n>) = field_dim + n

so ``tensor(atom, field)`` is an ordinary Kronecker product with the atom
factor on the left.  Truncation keeps Fock states ``n = 0 .. n_max`` and
``field_dim = n_max + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, NormalizationError

ATOM_DIM = 2
EXCITED = 0
GROUND = 1

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True)
class HilbertDims:
    field_dim: int
    atom_dim: int = ATOM_DIM

    def __post_init__(self):
        if self.atom_dim != ATOM_DIM:
            raise DimensionError(f"atom_dim must be 2, got {self.atom_dim}")
        if self.field_dim < 2:
            raise DimensionError(f"field_dim must be >= 2, got {self.field_dim}")

    @classmethod
    def from_n_max(cls, n_max: int) -> "HilbertDims":
        return cls(field_dim=n_max + 1)

    @classmethod
    def from_total(cls, total: int) -> "HilbertDims":
        if total % ATOM_DIM:
            raise DimensionError(f"dimension {total} is not 2 x field_dim")
        return cls(field_dim=total // ATOM_DIM)

    @property
    def n_max(self) -> int:
        return self.field_dim - 1

    @property
    def total(self) -> int:
        return self.atom_dim * self.field_dim

    def index(self, atom: str, n: int) -> int:
        """Composite index of ``|atom, n>``; ``atom`` is ``'e'`` or ``'g'``."""
        if not 0 <= n < self.field_dim:
            raise DimensionError(f"Fock index {n} outside 0..{self.n_max}")
        return _atom_index(atom) * self.field_dim + n


def _atom_index(atom: str) -> int:
    try:
        return {"e": EXCITED, "g": GROUND}[atom]
    except KeyError:
        raise ValueError(f"atom label must be 'e' or 'g', got {atom!r}") from None


def ladder_operators(field_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated annihilation and creation operators ``(a, a_dag)``.

    ``a_dag`` annihilates the top Fock state, so ``[a, a_dag]`` equals the
    identity everywhere except the last diagonal entry.
    """
    if field_dim < 2:
        raise DimensionError(f"field_dim must be >= 2, got {field_dim}")
    a = np.diag(np.sqrt(np.arange(1, field_dim, dtype=float)), k=1).astype(complex)
    return a, a.conj().T.copy()


def number_operator(field_dim: int) -> np.ndarray:
    return np.diag(np.arange(field_dim, dtype=float)).astype(complex)


def atomic_operators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(r_plus, r_minus, r3)`` in the ``(|e>, |g>)`` basis."""
    r_plus = np.array([[0, 1], [0, 0]], dtype=complex)
    r_minus = r_plus.conj().T.copy()
    r3 = np.diag([1.0, -1.0]).astype(complex)
    return r_plus, r_minus, r3


def excitation_number(field_dim: int) -> np.ndarray:
    """Total excitation number ``N = a_dag a + r_plus r_minus`` on the composite space."""
    r_plus, r_minus, _ = atomic_operators()
    return tensor(np.eye(ATOM_DIM), number_operator(field_dim)) + tensor(
        r_plus @ r_minus, np.eye(field_dim)
    )


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, left factor most significant."""
    return np.kron(np.asarray(a), np.asarray(b))


def basis(dim: int, k: int) -> np.ndarray:
    if not 0 <= k < dim:
        raise DimensionError(f"basis index {k} outside 0..{dim - 1}")
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def ket(atom: str, n: int, field_dim: int) -> np.ndarray:
    """Product basis state ``|atom, n>``."""
    return basis(ATOM_DIM * field_dim, HilbertDims(field_dim).index(atom, n))


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise NormalizationError("cannot normalize the zero vector")
    return psi / norm


def check_normalized(psi: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise DimensionError(f"expected a state vector, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise NormalizationError(f"state norm {norm:.12g} differs from 1 by more than {tol:g}")
    return psi


def check_density(rho: np.ndarray, *, herm_tol: float = HERMITIAN_TOL,
                  trace_tol: float = TRACE_TOL, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Return ``rho`` as a complex array after checking it is a density operator."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density operator must be square, got shape {rho.shape}")
    scale = max(1.0, np.max(np.abs(rho)))
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol * scale:
        raise NormalizationError("density operator is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise NormalizationError(f"density operator trace {tr.real:.15g} != 1")
    if np.linalg.eigvalsh(rho).min() < -psd_tol:
        raise NormalizationError("density operator has negative eigenvalues")
    return rho


def is_density(rho: np.ndarray, **tols) -> bool:
    try:
        check_density(rho, **tols)
    except (NormalizationError, DimensionError):
        return False
    return True


def partial_trace_subsystems(rho: np.ndarray, dims: Sequence[int],
                             keep: Sequence[int]) -> np.ndarray:
    """Reduce ``rho`` (or a ket) on ``dims`` to the subsystems listed in ``keep``.

    Kept subsystems appear in ascending index order.
    """
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        if rho.shape[0] != total:
            raise DimensionError(f"state of length {rho.shape[0]} is not on dims {dims}")
        rho = projector(rho)
    if rho.shape != (total, total):
        raise DimensionError(f"operator of shape {rho.shape} is not on dims {dims}")
    keep = sorted(set(keep))
    if any(not 0 <= k < len(dims) for k in keep):
        raise DimensionError(f"keep={keep} out of range for {len(dims)} subsystems")
    drop = [k for k in range(len(dims)) if k not in keep]
    t = rho.reshape(dims + dims)
    # contract each dropped subsystem's row and column index, highest first
    for k in sorted(drop, reverse=True):
        t = np.trace(t, axis1=k, axis2=k + t.ndim // 2)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def partial_trace(rho: np.ndarray, keep: str, field_dim: int | None = None) -> np.ndarray:
    """Reduced state on ``'atom'`` or ``'field'`` for an atom (x) field operator."""
    rho = np.asarray(rho, dtype=complex)
    size = rho.shape[0]
    if field_dim is None:
        field_dim = HilbertDims.from_total(size).field_dim
    elif size != ATOM_DIM * field_dim:
        raise DimensionError(f"operator of size {size} is not on 2 x {field_dim}")
    which = {"atom": 0, "field": 1}
    if keep not in which:
        raise ValueError(f"keep must be 'atom' or 'field', got {keep!r}")
    return partial_trace_subsystems(rho, (ATOM_DIM, field_dim), [which[keep]])


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """``Tr(rho op)``; a ket is accepted in place of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    op = np.asarray(op, dtype=complex)
    if rho.ndim == 1:
        if op.shape != (rho.shape[0], rho.shape[0]):
            raise DimensionError(f"operator shape {op.shape} vs state length {rho.shape[0]}")
        return complex(np.vdot(rho, op @ rho))
    if rho.shape != op.shape:
        raise DimensionError(f"operator shape {op.shape} vs density shape {rho.shape}")
    return complex(np.einsum("ij,ji->", rho, op))


def fidelity_pure(psi: np.ndarray, phi: np.ndarray) -> float:
    """``|<psi|phi>|^2`` for normalized kets."""
    psi = np.asarray(psi, dtype=complex)
    phi = np.asarray(phi, dtype=complex)
    if psi.shape != phi.shape:
        raise DimensionError(f"shape mismatch {psi.shape} vs {phi.shape}")
    return float(min(1.0, abs(np.vdot(psi, phi)) ** 2))


def fidelity_with_pure(rho: np.ndarray, phi: np.ndarray) -> float:
    """``<phi|rho|phi>`` for a mixed state and a pure target."""
    return float(np.real(expectation(rho, projector(phi))))


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.einsum("ij,ji->", rho, rho)))


def edge_population(state: np.ndarray, field_dim: int, depth: int = 3,
                    atom_dim: int = ATOM_DIM) -> float:
    """Population on the top ``depth`` Fock levels (``n >= n_max - depth + 1``).

    Works for kets or density operators on ``atom_dim (x) field_dim``; pass
    ``atom_dim=1`` for a field-only state.
    """
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        probs = np.abs(state) ** 2
    else:
        probs = np.real(np.diag(state))
    if probs.shape[0] != atom_dim * field_dim:
        raise DimensionError(f"state size {probs.shape[0]} is not {atom_dim} x {field_dim}")
    per_n = probs.reshape(atom_dim, field_dim).sum(axis=0)
    return float(per_n[max(0, field_dim - depth):].sum())
