import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from jcsim.errors import ConfigError, DimensionError, NormalizationError, TruncationError
from jcsim.hilbert import atomic_operators, expectation, number_operator, partial_trace, projector
from jcsim.states import (
    NMAX_ENV,
    atom_state,
    bloch_atom,
    coherent_field,
    coherent_state,
    default_n_max,
    default_n_max_coherent,
    fock_state,
    from_amplitudes,
    poisson_pmf,
    product_state,
    thermal_field,
    thermal_pmf,
    thermal_state,
)


class TestFock:
    def test_vacuum(self):
        np.testing.assert_array_equal(fock_state(0, 3), [1, 0, 0, 0])

    def test_photon_number(self):
        for n in range(6):
            assert expectation(fock_state(n, 5), number_operator(6)) == pytest.approx(n)

    def test_orthonormal(self):
        vecs = np.array([fock_state(n, 4) for n in range(5)])
        np.testing.assert_array_equal(vecs @ vecs.conj().T, np.eye(5))

    def test_out_of_range(self):
        with pytest.raises(DimensionError):
            fock_state(4, 3)


class TestCoherent:
    def test_zero_is_vacuum(self):
        np.testing.assert_array_equal(coherent_state(0, 5), fock_state(0, 5))

    def test_mean_photon_default_truncation(self):
        n_max = default_n_max_coherent(5)
        psi = coherent_state(5, n_max)
        assert expectation(psi, number_operator(n_max + 1)).real == pytest.approx(25, abs=1e-8)

    def test_poisson_statistics(self):
        alpha = 3.0 * np.exp(0.4j)
        n_max = default_n_max_coherent(alpha)
        probs = np.abs(coherent_state(alpha, n_max)) ** 2
        n = np.arange(int(9 + 8 * 3) + 1)
        np.testing.assert_allclose(probs[n], stats.poisson.pmf(n, 9.0), atol=1e-12)

    def test_glauber_phase(self):
        alpha = 0.8 * np.exp(1.1j)
        psi = coherent_state(alpha, 20)
        np.testing.assert_allclose(np.angle(psi[1:4]), np.angle(alpha ** np.arange(1, 4)), atol=1e-12)

    def test_truncation_error(self):
        with pytest.raises(TruncationError):
            coherent_state(5, 20)

    def test_tail_mass_metadata(self):
        fs = coherent_field(2.0, 12, tail_tol=1e-3)
        retained = np.sum(stats.poisson.pmf(np.arange(13), 4.0))
        assert fs.tail_mass == pytest.approx(1 - retained, abs=1e-14)
        assert np.linalg.norm(fs.data) == pytest.approx(1, abs=1e-14)


class TestThermal:
    def test_zero_mean(self):
        np.testing.assert_array_equal(thermal_state(0, 3), projector(fock_state(0, 3)))

    def test_vacuum_weight(self):
        assert thermal_pmf(10, 50)[0] == pytest.approx(1 / 11)

    def test_geometric(self):
        np.testing.assert_allclose(thermal_pmf(2.5, 30), stats.geom.pmf(np.arange(31) + 1, 1 / 3.5),
                                   rtol=1e-12)

    def test_mean_recovered(self):
        # at n_max = 10 * mean_n the truncation bias is ~7e-3; 1e-6 needs n_max ~ 300
        rho = thermal_state(10, 300, tail_tol=1e-10)
        assert expectation(rho, number_operator(301)).real == pytest.approx(10, abs=1e-6)

    def test_tail_mass(self):
        fs = thermal_field(3.0, 40, tail_tol=1e-4)
        retained = thermal_pmf(3.0, 40).sum()
        assert fs.tail_mass == pytest.approx(1 - retained, abs=1e-14)
        assert np.trace(fs.data).real == pytest.approx(1, abs=1e-14)

    def test_truncation_error(self):
        with pytest.raises(TruncationError):
            thermal_state(10, 120)

    def test_negative_mean(self):
        with pytest.raises(ValueError):
            thermal_state(-1, 5)


class TestAtom:
    def test_basis(self):
        np.testing.assert_array_equal(atom_state(1, 0), [1, 0])

    def test_equal_superposition(self):
        psi = atom_state(1 / math.sqrt(2), 1 / math.sqrt(2))
        _, _, r3 = atomic_operators()
        assert expectation(psi, r3) == pytest.approx(0, abs=1e-15)

    def test_unnormalized(self):
        with pytest.raises(NormalizationError):
            atom_state(1, 1)

    def test_bloch(self):
        np.testing.assert_allclose(bloch_atom(math.pi / 2, math.pi / 2),
                                   np.array([1, 1j]) / math.sqrt(2), atol=1e-15)


class TestProduct:
    def test_pure_and_mixed(self):
        a = atom_state(0.6, 0.8)
        f = fock_state(1, 3)
        assert product_state(a, f).shape == (8,)
        mixed = product_state(a, thermal_state(0.5, 8, tail_tol=1e-3))
        assert mixed.shape == (18, 18)
        assert np.trace(mixed).real == pytest.approx(1)

    def test_from_amplitudes(self):
        np.testing.assert_allclose(from_amplitudes([3, 4]), [0.6, 0.8])
        with pytest.raises(NormalizationError):
            from_amplitudes([3, 4], normalize=False)
        with pytest.raises(DimensionError):
            from_amplitudes(np.eye(2))


class TestDefaults:
    def test_kinds(self, monkeypatch):
        monkeypatch.delenv(NMAX_ENV, raising=False)
        assert default_n_max("fock", n=3) == 6
        assert default_n_max("coherent", alpha=5) == 75
        assert default_n_max("thermal", mean_n=0) == 2
        with pytest.raises(ValueError):
            default_n_max("squeezed")

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(NMAX_ENV, "17")
        assert default_n_max("coherent", alpha=5) == 17
        monkeypatch.setenv(NMAX_ENV, "many")
        with pytest.raises(ConfigError):
            default_n_max("fock")

    def test_poisson_pmf_log_space(self):
        np.testing.assert_allclose(poisson_pmf(400.0, 800)[380:420],
                                   stats.poisson.pmf(np.arange(380, 420), 400.0), rtol=1e-10)


@settings(max_examples=50, deadline=None)
@given(theta=st.floats(0, math.pi), phi=st.floats(-math.pi, math.pi), n=st.integers(0, 4))
def test_atom_round_trips_through_product(theta, phi, n):
    a = bloch_atom(theta, phi)
    rho = projector(product_state(a, fock_state(n, 5)))
    np.testing.assert_allclose(partial_trace(rho, "atom"), projector(a), atol=1e-12)
