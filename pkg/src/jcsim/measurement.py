"""Field-mode channels induced by one resonant atom passing through the cavity.

For an atom entering in ``|e>`` the Kraus operators on the field are
``u_ee(t)`` (atom found in ``e``) and ``u_ge(t)`` (atom found in ``g``).
The family for an atom entering in ``|g>`` uses ``u_gg`` and ``u_eg``.

``u_ee = cos(g t sqrt(N+1))`` has no partner at the top Fock level, so the
``e`` family is only complete on ``n < n_max``; field states handed to it must
keep negligible population near the truncation edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import check_edge, evolution_operator
from .errors import ImpossibleOutcomeError, RegimeError
from .hilbert import check_density
from .model import JCParams

PROB_FLOOR = 1e-12
OUTCOMES = ("e", "g")


@dataclass(frozen=True)
class ChannelPair:
    """Kraus operators keyed by measured atomic outcome.

    ``atom`` is the initial atomic level; ``t`` is ``g t``.
    """

    atom: str
    t: float
    kraus: dict

    @property
    def field_dim(self) -> int:
        return self.kraus["e"].shape[0]

    @property
    def k_ee(self) -> np.ndarray:
        self._require_excited()
        return self.kraus["e"]

    @property
    def k_ge(self) -> np.ndarray:
        self._require_excited()
        return self.kraus["g"]

    def _require_excited(self):
        if self.atom != "e":
            raise RegimeError("k_ee/k_ge belong to the excited-atom channel")

    def povm(self, outcome: str) -> np.ndarray:
        k = self.kraus[outcome]
        return k.conj().T @ k

    def completeness_error(self) -> float:
        """``max |F_e + F_g - I|`` on the complete support.

        For the ``e`` family the top Fock level is excluded.
        """
        total = self.povm("e") + self.povm("g") - np.eye(self.field_dim)
        if self.atom == "e":
            total = total[:-1, :-1]
        return float(np.max(np.abs(total)))


def kraus_pair(p: JCParams, t: float, n_max: int, atom: str = "e") -> ChannelPair:
    if not p.resonant():
        raise RegimeError("the Kraus decomposition is defined at resonance only")
    if atom not in OUTCOMES:
        raise ValueError(f"atom must be 'e' or 'g', got {atom!r}")
    u = evolution_operator(p, t, n_max)
    if atom == "e":
        kraus = {"e": u.u_ee, "g": u.u_ge}
    else:
        kraus = {"g": u.u_gg, "e": u.u_eg}
    return ChannelPair(atom=atom, t=u.t, kraus=kraus)


def _prepare(rho_f, p, t, atom):
    rho_f = check_density(rho_f)
    d = rho_f.shape[0]
    if atom == "e":
        check_edge(rho_f, d, atom_dim=1)
    return rho_f, kraus_pair(p, t, d - 1, atom)


def outcome_probabilities(rho_f, p: JCParams, t: float, atom: str = "e") -> dict:
    rho_f, ch = _prepare(rho_f, p, t, atom)
    return {o: float(np.real(np.trace(ch.povm(o) @ rho_f))) for o in OUTCOMES}


def selective_update(rho_f, p: JCParams, t: float, outcome: str,
                     atom: str = "e") -> tuple[np.ndarray, float]:
    """Field state conditioned on finding the atom in ``outcome``, and its probability."""
    if outcome not in OUTCOMES:
        raise ValueError(f"outcome must be 'e' or 'g', got {outcome!r}")
    rho_f, ch = _prepare(rho_f, p, t, atom)
    k = ch.kraus[outcome]
    unnorm = k @ rho_f @ k.conj().T
    prob = float(np.real(np.trace(unnorm)))
    if prob < PROB_FLOOR:
        raise ImpossibleOutcomeError(f"outcome {outcome!r} has probability {prob:.3g}")
    out = unnorm / prob
    return 0.5 * (out + out.conj().T), min(prob, 1.0)


def nonselective_map(rho_f, p: JCParams, t: float, atom: str = "e") -> np.ndarray:
    """Field state when the atomic outcome is discarded (Kraus sum)."""
    rho_f, ch = _prepare(rho_f, p, t, atom)
    out = sum(k @ rho_f @ k.conj().T for k in ch.kraus.values())
    return 0.5 * (out + out.conj().T)
