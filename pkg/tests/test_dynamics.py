import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from jcsim.dynamics import (
    block_trajectory,
    evolution_operator,
    evolve_density,
    evolve_numeric_oracle,
    evolve_pure,
    manifold_propagator,
    oracle_atom_populations,
    propagate_manifold,
    propagator,
)
from jcsim.errors import NormalizationError, RegimeError, TruncationError
from jcsim.hilbert import excitation_number, fidelity_pure, ket, partial_trace, projector
from jcsim.model import JCParams, build_jc_hamiltonian, build_rabi_hamiltonian, manifold
from jcsim.states import atom_state, fock_state, product_state, thermal_state

from conftest import low_photon_ket, random_density, random_ket

G = 0.05
RES = JCParams.from_detuning(G, 0.0, omega=1.0)


def detuned(delta_over_g, g=G, omega=1.0):
    return JCParams.from_detuning(g, delta_over_g * g, omega=omega)


class TestManifoldPropagator:
    def test_full_transfer(self):
        m = manifold(RES, 2)
        gt = math.pi / (2 * math.sqrt(3))        # Omega_2 t = pi
        np.testing.assert_allclose(propagate_manifold(m, [1, 0], gt), [0, -1j], atol=1e-12)

    def test_midpoint(self):
        m = manifold(RES, 0)
        out = propagate_manifold(m, [1, 0], math.pi / 4)   # Omega_0 t = pi/2
        np.testing.assert_allclose(out, np.array([1, -1j]) / math.sqrt(2), atol=1e-12)

    def test_unitary_random(self, rng):
        for _ in range(100):
            p = detuned(rng.uniform(-5, 5))
            m = manifold(p, int(rng.integers(0, 10)))
            u = manifold_propagator(m, rng.uniform(0, 100))
            assert np.max(np.abs(u.conj().T @ u - np.eye(2))) < 1e-12
            assert abs(abs(np.linalg.det(u)) - 1) < 1e-12
            c = u @ np.array([1, 0])
            assert np.sum(np.abs(c) ** 2) == pytest.approx(1, abs=1e-12)

    def test_offresonant_contrast(self):
        p = detuned(1.5)
        m = manifold(p, 1)
        t = np.linspace(0, 4 * math.pi / m.r_n * G, 4001)
        pg = [abs(propagate_manifold(m, [1, 0], tt)[1]) ** 2 for tt in t]
        assert max(pg) == pytest.approx(m.omega_n**2 / m.r_n**2, abs=1e-6)

    def test_rejects_unnormalized(self):
        with pytest.raises(NormalizationError):
            propagate_manifold(manifold(RES, 0), [1, 1], 0.3)

    def test_zero_coupling_needs_absolute_time(self):
        m = manifold(JCParams.from_detuning(0.0, 0.1), 0)
        with pytest.raises(RegimeError):
            manifold_propagator(m, 1.0)
        u = manifold_propagator(m, 2.0, absolute=True)
        np.testing.assert_allclose(np.diag(u), np.exp([-0.1j, 0.1j]), atol=1e-14)


class TestEvolutionOperator:
    def test_identity_at_zero(self):
        u = evolution_operator(RES, 0.0, 6).assembled
        np.testing.assert_allclose(u, np.eye(14), atol=1e-15)

    def test_vacuum_swap(self):
        u = evolution_operator(RES, math.pi / 2, 4).assembled
        np.testing.assert_allclose(u @ ket("e", 0, 5), -1j * ket("g", 1, 5), atol=1e-12)

    def test_group_property_interior(self):
        n_max = 12
        u = evolution_operator(RES, 3.7, n_max).assembled
        v = evolution_operator(RES, -3.7, n_max).assembled
        prod = u @ v
        # drop |e,n_max>, the state with no partner in the truncated space
        keep = [i for i in range(2 * (n_max + 1)) if i != n_max]
        np.testing.assert_allclose(prod[np.ix_(keep, keep)], np.eye(len(keep)), atol=1e-10)

    def test_agrees_with_manifold_route(self):
        n_max = 10
        u_op = evolution_operator(RES, 2.3, n_max).assembled
        u_mf = propagator(RES, 2.3, n_max)
        keep = [i for i in range(2 * (n_max + 1)) if i != n_max]
        np.testing.assert_allclose(u_op[:, keep], u_mf[:, keep], atol=1e-14)

    def test_blocks_are_operator_functions(self):
        op = evolution_operator(RES, 1.1, 5)
        n = np.arange(6)
        np.testing.assert_allclose(np.diag(op.u_ee), np.cos(1.1 * np.sqrt(n + 1)))
        np.testing.assert_allclose(np.diag(op.u_gg), np.cos(1.1 * np.sqrt(n)))
        # u_ge maps |n> to |n+1>
        for k in range(5):
            assert op.u_ge[k + 1, k] == pytest.approx(-1j * math.sin(1.1 * math.sqrt(k + 1)))
            assert op.u_eg[k, k + 1] == pytest.approx(-1j * math.sin(1.1 * math.sqrt(k + 1)))


class TestPropagator:
    @pytest.mark.parametrize("delta", [0.0, 0.5, 2.0])
    def test_schrodinger_matches_expm(self, delta):
        p = detuned(delta)
        n_max = 8
        u = propagator(p, 7.3, n_max, picture="schrodinger")
        ref = expm(-1j * build_jc_hamiltonian(p, n_max) * 7.3 / p.g)
        np.testing.assert_allclose(u, ref, atol=1e-11)

    def test_exactly_unitary(self):
        u = propagator(detuned(1.3), 40.0, 15)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(32), atol=1e-13)

    def test_block_structure(self):
        n_max = 7
        u = propagator(detuned(0.7), 5.0, n_max)
        n_op = np.diag(excitation_number(n_max + 1)).real
        cross = n_op[:, None] != n_op[None, :]
        assert np.max(np.abs(u[cross])) < 1e-12

    def test_bad_picture(self):
        with pytest.raises(ValueError):
            propagator(RES, 1.0, 3, picture="heisenberg")


class TestEvolvePure:
    def test_ground_vacuum_stationary(self):
        psi = ket("g", 0, 5)
        for t in (0.3, 5.0, 40.0):
            assert fidelity_pure(evolve_pure(psi, RES, t), psi) == pytest.approx(1, abs=1e-14)

    def test_swap(self, rng):
        c = random_ket(rng, 2)
        psi = product_state(c, fock_state(0, 3))
        target = np.kron([0, 1], np.array([c[1], -1j * c[0], 0, 0]))
        for method in ("manifold", "operator"):
            out = evolve_pure(psi, RES, math.pi / 2, method=method)
            assert fidelity_pure(out, target) > 1 - 1e-12

    def test_norm_preserved(self, rng):
        psi = random_ket(rng, 24)
        out = evolve_pure(psi, detuned(2.0), 17.0)
        assert np.linalg.norm(out) == pytest.approx(1, abs=1e-12)

    def test_composition(self, rng):
        psi = random_ket(rng, 20)
        p = detuned(0.5)
        two = evolve_pure(evolve_pure(psi, p, 3.1), p, 4.2)
        one = evolve_pure(psi, p, 7.3)
        assert fidelity_pure(one, two) > 1 - 1e-9

    def test_operator_route_guard(self):
        psi = ket("e", 8, 10)
        with pytest.raises(TruncationError):
            evolve_pure(psi, RES, 1.0, method="operator")

    def test_operator_route_requires_resonance(self):
        with pytest.raises(RegimeError):
            evolve_pure(ket("e", 0, 6), detuned(1.0), 1.0, method="operator")

    def test_operator_route_schrodinger(self, rng):
        psi = low_photon_ket(rng, 12, 6)
        a = evolve_pure(psi, RES, 4.0, method="operator", picture="schrodinger")
        b = evolve_pure(psi, RES, 4.0, picture="schrodinger")
        np.testing.assert_allclose(a, b, atol=1e-13)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            evolve_pure(ket("e", 0, 3), RES, 1.0, method="rk4")

    def test_resonant_fock_populations(self):
        for n in range(4):
            psi = ket("e", n, 8)
            omega_n = 2 * math.sqrt(n + 1)
            for t in np.linspace(0, 20, 37):
                pe = np.sum(np.abs(evolve_pure(psi, RES, t)[:8]) ** 2)
                assert abs(pe - math.cos(omega_n * t / 2) ** 2) < 1e-10

    def test_matches_oracle_random(self, rng):
        n_max = 30
        for delta in (0.0, 0.5, 2.0):
            p = detuned(delta)
            h = build_jc_hamiltonian(p, n_max)
            for _ in range(3):
                psi = random_ket(rng, 2 * (n_max + 1))
                t = rng.uniform(0, 50)
                a = evolve_pure(psi, p, t, picture="schrodinger")
                b = evolve_numeric_oracle(h, psi, t / p.g)
                assert fidelity_pure(a, b) > 1 - 1e-8
                np.testing.assert_allclose(a, b, atol=1e-9)


class TestEvolveDensity:
    def test_pure_consistency(self, rng):
        psi = random_ket(rng, 14)
        p = detuned(0.8)
        rho = evolve_density(projector(psi), p, 6.0)
        np.testing.assert_allclose(rho, projector(evolve_pure(psi, p, 6.0)), atol=1e-10)

    def test_swap_limit(self):
        rho0 = product_state(atom_state(1, 0), projector(fock_state(0, 4)))
        rho = evolve_density(rho0, RES, math.pi / 2)
        np.testing.assert_allclose(partial_trace(rho, "field"), projector(fock_state(1, 4)), atol=1e-12)
        np.testing.assert_allclose(partial_trace(rho, "atom"), np.diag([0, 1]), atol=1e-12)

    def test_trace_along_trajectory(self, rng):
        rho = random_density(rng, 16)
        p = detuned(1.0)
        step = evolve_density(rho, p, 0.1)
        traces = []
        cur = rho
        for _ in range(200):
            cur = evolve_density(cur, p, 0.1)
            traces.append(np.trace(cur).real)
        assert np.max(np.abs(np.array(traces) - 1)) < 1e-10
        assert np.max(np.abs(step - step.conj().T)) == 0
        assert np.linalg.eigvalsh(cur).min() > -1e-10

    def test_thermal_matches_oracle(self):
        p = detuned(0.5)
        rho0 = product_state(atom_state(1, 0), thermal_state(1.0, 30, tail_tol=1e-5))
        h = build_jc_hamiltonian(p, 30)
        a = evolve_density(rho0, p, 9.0, picture="schrodinger")
        b = evolve_numeric_oracle(h, rho0, 9.0 / p.g)
        np.testing.assert_allclose(a, b, atol=1e-10)


class TestOracle:
    def test_diagonal_phases(self):
        energies = np.array([0.3, -1.2, 2.5])
        psi = np.ones(3) / math.sqrt(3)
        out = evolve_numeric_oracle(np.diag(energies), psi, 1.7)
        np.testing.assert_allclose(out, np.exp(-1j * energies * 1.7) / math.sqrt(3), atol=1e-15)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NormalizationError):
            evolve_numeric_oracle(np.array([[0, 1], [0, 0]]), np.array([1, 0]), 1.0)

    def test_rwa_regimes(self):
        t = np.linspace(0, 20, 401)
        psi = ket("e", 0, 21)
        devs = []
        for ratio in (1e-3, 0.3):
            p = JCParams.from_detuning(1.0, 0.0, omega=1 / ratio)
            pe_rabi, _ = oracle_atom_populations(build_rabi_hamiltonian(p, 20), psi, t)
            pe_jc, _ = block_trajectory(psi, p, t).atom_populations()
            devs.append(np.max(np.abs(pe_rabi - pe_jc)))
        assert devs[0] < 1e-2
        assert devs[1] > 0.05

    def test_populations_helper_density(self, rng):
        p = detuned(1.0, omega=3.0)
        rho = random_density(rng, 12)
        t = np.linspace(0, 10, 11)
        pe, pg = oracle_atom_populations(build_jc_hamiltonian(p, 5), rho, t / p.g)
        ref, _ = block_trajectory(rho, p, t).atom_populations()
        np.testing.assert_allclose(pe, ref, atol=1e-10)
        np.testing.assert_allclose(pe + pg, 1, atol=1e-12)


class TestBlockTrajectory:
    def test_conservation(self, rng):
        n_max = 20
        p = detuned(0.5, omega=2.0)
        psi = low_photon_ket(rng, n_max, 12)
        traj = block_trajectory(psi, p, np.linspace(0, 50, 300))
        en = traj.block_expectation(excitation_number(n_max + 1))
        eh = traj.block_expectation(build_jc_hamiltonian(p, n_max))
        assert np.ptp(en) < 1e-10
        assert np.ptp(eh) < 1e-10

    def test_populations_match_full_evolution(self, rng):
        p = detuned(2.0)
        psi = random_ket(rng, 12)
        times = np.linspace(0, 12, 25)
        pe, pg = block_trajectory(psi, p, times).atom_populations()
        for t, a in zip(times, pe):
            assert a == pytest.approx(np.sum(np.abs(evolve_pure(psi, p, t)[:6]) ** 2), abs=1e-12)
        np.testing.assert_allclose(pe + pg, 1, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(delta=st.sampled_from([0.0, 0.5, 2.0]), gt=st.floats(0, 50),
       seed=st.integers(0, 2**32 - 1))
def test_manifold_route_matches_expm(delta, gt, seed):
    rng = np.random.default_rng(seed)
    p = detuned(delta)
    n_max = 6
    psi = random_ket(rng, 2 * (n_max + 1))
    ref = expm(-1j * build_jc_hamiltonian(p, n_max) * gt / p.g) @ psi
    assert fidelity_pure(evolve_pure(psi, p, gt, picture="schrodinger"), ref) > 1 - 1e-10
