import numpy as np
import pytest

from conftest import random_valid_omega
from gateverify.errors import ValidationError
from gateverify.linalg import dagger, kron
from gateverify.strategies import spectral_gap, VerificationOperator
from gateverify.weylbell import (
    BellSpectrum,
    WeylIndex,
    bell_basis,
    bell_spectrum_of,
    bell_state,
    bell_twirl,
    max_entangled_state,
    weyl,
)

DIMS = [2, 3, 5]


class TestWeyl:
    def test_x_qubit(self):
        assert np.allclose(weyl(WeylIndex(1, 0, 2)), [[0, 1], [1, 0]])

    def test_z_qubit(self):
        assert np.allclose(weyl(WeylIndex(0, 1, 2)), np.diag([1, -1]))

    def test_identity(self):
        assert np.allclose(weyl(WeylIndex(0, 0, 5)), np.eye(5))

    @pytest.mark.parametrize("d", DIMS)
    def test_unitary(self, d):
        for u in range(d):
            for v in range(d):
                w = weyl(WeylIndex(u, v, d))
                assert np.max(np.abs(dagger(w) @ w - np.eye(d))) < 1e-10

    @pytest.mark.parametrize("d", DIMS)
    def test_xd_zd_identity(self, d):
        x = weyl(WeylIndex(1, 0, d))
        z = weyl(WeylIndex(0, 1, d))
        assert np.max(np.abs(np.linalg.matrix_power(x, d) - np.eye(d))) < 1e-10
        assert np.max(np.abs(np.linalg.matrix_power(z, d) - np.eye(d))) < 1e-10

    @pytest.mark.parametrize("d", DIMS)
    def test_commutation_relations(self, d):
        ws = {(u, v): weyl(WeylIndex(u, v, d)) for u in range(d) for v in range(d)}
        for (u, v), w1 in ws.items():
            for (up, vp), w2 in ws.items():
                phase = np.exp(-2j * np.pi * (u * vp - v * up) / d)
                assert np.max(np.abs(w1 @ w2 - phase * (w2 @ w1))) < 1e-10

    def test_invalid_index(self):
        with pytest.raises(ValidationError):
            WeylIndex(2, 0, 2)


class TestBellStates:
    def test_phi_plus(self):
        assert np.allclose(bell_state(WeylIndex(0, 0, 2)),
                           np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_shifted(self):
        # (I ⊗ X) Phi+ = (|01> + |10>)/sqrt(2)
        assert np.allclose(bell_state(WeylIndex(1, 0, 2)),
                           np.array([0, 1, 1, 0]) / np.sqrt(2))

    @pytest.mark.parametrize("d", DIMS)
    def test_orthonormal(self, d):
        basis = bell_basis(d)
        gram = dagger(basis) @ basis
        assert np.max(np.abs(gram - np.eye(d * d))) < 1e-10

    @pytest.mark.parametrize("d", DIMS)
    def test_completeness(self, d):
        basis = bell_basis(d)
        total = basis @ dagger(basis)
        assert np.max(np.abs(total - np.eye(d * d))) < 1e-10


def _projection_twirl(omega, d):
    """Oracle: explicit projection sum_uv Phi_uv omega Phi_uv."""
    out = np.zeros_like(omega)
    for u in range(d):
        for v in range(d):
            vec = bell_state(WeylIndex(u, v, d))
            pr = np.outer(vec, vec.conj())
            out += pr @ omega @ pr
    return out


class TestBellTwirl:
    def test_phi_plus_invariant(self):
        for d in DIMS:
            phi = max_entangled_state(d)
            rho = np.outer(phi, phi.conj())
            assert np.max(np.abs(bell_twirl(rho, d) - rho)) < 1e-10

    def test_identity_invariant(self):
        for d in DIMS:
            eye = np.eye(d * d)
            assert np.max(np.abs(bell_twirl(eye, d) - eye)) < 1e-10

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_projection_oracle(self, seed):
        omega = random_valid_omega(2, seed).matrix
        tw = bell_twirl(omega, 2)
        assert np.max(np.abs(tw - _projection_twirl(omega, 2))) < 1e-10
        basis = bell_basis(2)
        in_bell = dagger(basis) @ tw @ basis
        off = in_bell - np.diag(np.diagonal(in_bell))
        assert np.max(np.abs(off)) < 1e-10

    @pytest.mark.parametrize("d,seed", [(2, 1), (2, 2), (3, 3), (3, 4)])
    def test_idempotent(self, d, seed):
        omega = random_valid_omega(d, seed).matrix
        once = bell_twirl(omega, d)
        assert np.max(np.abs(bell_twirl(once, d) - once)) < 1e-10

    @pytest.mark.parametrize("d,seed", [(2, 11), (2, 12), (3, 13), (3, 14)])
    def test_gap_never_decreases(self, d, seed):
        om = random_valid_omega(d, seed)
        gap_before = spectral_gap(om)
        gap_after = spectral_gap(VerificationOperator(d=d, matrix=bell_twirl(om.matrix, d)))
        assert gap_after >= gap_before - 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            bell_twirl(np.eye(4), 3)


class TestBellSpectrum:
    def test_optimal_operator(self):
        phi = max_entangled_state(2)
        omega = (np.eye(4) + 2 * np.outer(phi, phi.conj())) / 3
        spec = bell_spectrum_of(omega, 2)
        assert spec.lam[0, 0] == pytest.approx(1.0, abs=1e-12)
        others = [spec.lam[u, v] for u in range(2) for v in range(2) if (u, v) != (0, 0)]
        assert np.allclose(others, 1 / 3)

    def test_phi_plus(self):
        phi = max_entangled_state(3)
        spec = bell_spectrum_of(np.outer(phi, phi.conj()), 3)
        assert spec.lam[0, 0] == pytest.approx(1.0)
        assert np.max(np.abs(spec.lam.ravel()[1:])) < 1e-12

    def test_scaled_identity(self):
        spec = bell_spectrum_of(0.4 * np.eye(9), 3)
        assert np.allclose(spec.lam, 0.4)

    def test_rejects_non_diagonal(self):
        rng = np.random.default_rng(5)
        m = rng.standard_normal((4, 4))
        m = (m + m.T) / 8 + np.eye(4) / 2
        with pytest.raises(ValidationError):
            bell_spectrum_of(m, 2)

    def test_spectrum_range_validation(self):
        with pytest.raises(ValidationError):
            BellSpectrum(d=2, lam=np.array([[1.5, 0], [0, 0]]))
