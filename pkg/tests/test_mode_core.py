import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import unitary_group

from conftest import random_active, random_passive, random_transform
from photonic.errors import BranchCutError, StructuralError, ValidationError
from photonic.gaussian_engine import quadrature_symplectic
from photonic.mode_core import (
    AmplifierParams,
    BeamSplitterParams,
    EffectiveHamiltonianMatrix,
    ModeTransform,
    amplifier_block,
    amplifier_factorization,
    amplifier_matrix,
    beam_splitter,
    beam_splitter_matrix,
    check_quasi_unitary,
    compose,
    decompose_amplifier,
    decompose_beam_splitter,
    effective_hamiltonian,
    embed,
    exponentiate,
    metric,
    phase_shift,
    quasi_unitarity_defect,
    rotation,
    two_mode_squeezer,
)

angles = st.floats(-math.pi, math.pi, allow_nan=False)
seeds = st.integers(0, 2**32 - 1)


def close(S1, S2, tol=1e-12):
    return np.max(np.abs(S1.full() - S2.full())) <= tol


class TestModeTransform:
    def test_identity_is_quasi_unitary(self):
        assert check_quasi_unitary(ModeTransform.identity(3))

    def test_full_matrix_layout(self):
        B = np.array([[2.0, 0], [0, 1]])
        C = np.array([[0, math.sqrt(3)], [0, 0]])
        full = ModeTransform(B, C).full()
        assert np.allclose(full[:2, 2:], C)
        assert np.allclose(full[2:, :2], C.conj())
        assert np.allclose(full[2:, 2:], B.conj())

    def test_from_full_rejects_wrong_structure(self):
        full = ModeTransform.identity(2).full()
        full[2, 0] = 0.5
        with pytest.raises(StructuralError):
            ModeTransform.from_full(full)

    def test_json_round_trip(self):
        S = two_mode_squeezer(0.3)
        assert close(ModeTransform.from_json(S.to_json()), S, 0)

    def test_passive_flag(self):
        assert rotation(0.2).is_passive
        assert not two_mode_squeezer(0.2).is_passive

    def test_inverse(self):
        S = random_active(np.random.default_rng(1), 3)
        assert close(compose(S, S.inverse()), ModeTransform.identity(3), 1e-12)

    def test_non_quasi_unitary_is_reported(self):
        S = ModeTransform(np.array([[2.0]]))
        assert not check_quasi_unitary(S)
        assert quasi_unitarity_defect(S) == pytest.approx(3.0)


class TestCompose:
    def test_identity_is_neutral(self):
        S = random_transform(np.random.default_rng(2), 2)
        assert close(compose(S, ModeTransform.identity(2)), S, 0)

    def test_inverse_rotation(self):
        assert close(compose(rotation(0.7), rotation(-0.7)), ModeTransform.identity(2))

    def test_squeezers_add(self):
        assert close(compose(two_mode_squeezer(0.3), two_mode_squeezer(0.45)), two_mode_squeezer(0.75))

    def test_matches_matrix_product(self):
        rng = np.random.default_rng(3)
        S1, S2 = random_active(rng, 3), random_active(rng, 3)
        assert np.allclose(compose(S1, S2).full(), S1.full() @ S2.full(), atol=1e-13)

    def test_mode_count_mismatch(self):
        with pytest.raises(StructuralError):
            compose(rotation(0.1), ModeTransform.identity(3))

    @given(seeds, st.integers(1, 4))
    def test_composition_stays_quasi_unitary(self, seed, M):
        rng = np.random.default_rng(seed)
        S = compose(random_transform(rng, M), random_transform(rng, M))
        assert quasi_unitarity_defect(S) < 1e-10
        assert abs(abs(np.linalg.det(S.full())) - 1) < 1e-10


class TestBeamSplitter:
    def test_fifty_fifty(self):
        s = 1 / math.sqrt(2)
        B = beam_splitter_matrix(BeamSplitterParams(Theta=math.pi / 2))
        assert np.allclose(B, [[s, s], [-s, s]], atol=1e-15)

    def test_zero_angle_is_identity(self):
        assert close(beam_splitter(BeamSplitterParams()), ModeTransform.identity(2), 0)

    def test_transmission_probability(self, oracles):
        params = BeamSplitterParams(Theta=math.pi / 3)
        tau_sq = abs(beam_splitter_matrix(params)[0, 0]) ** 2
        assert tau_sq == pytest.approx(oracles["tau_sq_pi_3"], abs=1e-15)

    def test_rotation_special_case(self):
        phi = 0.4
        R = rotation(phi).block_B
        assert np.allclose(R, [[math.cos(phi), math.sin(phi)], [-math.sin(phi), math.cos(phi)]], atol=1e-15)
        assert rotation(phi).block_C is None or np.all(rotation(phi).block_C == 0)

    @given(angles, angles, st.floats(0, 2 * math.pi), angles)
    def test_unitary(self, lam, psi, theta, phi):
        B = beam_splitter_matrix(BeamSplitterParams(lam, psi, theta, phi))
        assert np.max(np.abs(B @ B.conj().T - np.eye(2))) < 1e-14


class TestDecomposition:
    def test_identity(self):
        p = decompose_beam_splitter(np.eye(2))
        assert (p.Lambda, p.Psi, p.Theta, p.Phi) == (0, 0, 0, 0)

    def test_rotation(self):
        p = decompose_beam_splitter(rotation(0.3).block_B)
        assert p.Theta == pytest.approx(0.6, abs=1e-14)
        assert abs(p.Lambda) + abs(p.Psi) + abs(p.Phi) < 1e-14

    @given(seeds)
    def test_haar_reconstruction(self, seed):
        U = unitary_group.rvs(2, random_state=np.random.default_rng(seed))
        p = decompose_beam_splitter(U)
        assert np.max(np.abs(beam_splitter_matrix(p) - U)) < 1e-10
        assert 0 <= p.Theta < 2 * math.pi
        assert -math.pi < p.Lambda <= math.pi

    def test_non_unitary_rejected(self):
        with pytest.raises(ValidationError):
            decompose_beam_splitter(np.array([[1.0, 0.1], [0, 1]]))

    def test_amplifier_identity(self):
        p = decompose_amplifier(np.eye(2))
        assert abs(p.Theta) + abs(p.Lambda) + abs(p.Psi) + abs(p.Phi) < 1e-14

    def test_amplifier_theta_one(self):
        B = np.array([[math.cosh(0.5), math.sinh(0.5)], [math.sinh(0.5), math.cosh(0.5)]])
        assert decompose_amplifier(B).Theta == pytest.approx(1.0, abs=1e-13)

    def test_squeezer_zeta_recovered(self):
        assert decompose_amplifier(amplifier_block(two_mode_squeezer(0.3))).zeta == pytest.approx(0.3, abs=1e-14)

    @given(angles, angles, st.floats(0, 4), angles)
    def test_amplifier_reconstruction(self, lam, psi, theta, phi):
        B = amplifier_matrix(AmplifierParams(lam, psi, theta, phi))
        assert np.max(np.abs(amplifier_matrix(decompose_amplifier(B)) - B)) < 1e-9 * max(1, np.abs(B).max())

    def test_amplifier_normalization_violated(self):
        with pytest.raises(ValidationError):
            decompose_amplifier(np.array([[1.0, 0.5], [0.5, 1.0]]))


class TestSqueezer:
    def test_zero_is_identity(self):
        assert close(two_mode_squeezer(0.0), ModeTransform.identity(2), 0)

    def test_layout(self):
        S = two_mode_squeezer(0.5)
        assert S.block_B[0, 0] == pytest.approx(math.cosh(0.5))
        assert S.block_C[0, 1] == pytest.approx(math.sinh(0.5))

    def test_factorization_theta_zero(self):
        Ri, D, R = amplifier_factorization(0.0)
        assert close(compose(compose(Ri, D), R), ModeTransform.identity(2))

    def test_factorization_theta_one(self):
        Ri, D, R = amplifier_factorization(1.0)
        assert close(compose(compose(Ri, D), R), two_mode_squeezer(0.5), 1e-12)

    def test_factor_stretches_first_quadrature(self):
        _, D, _ = amplifier_factorization(1.0)
        M = quadrature_symplectic(D)
        assert M[0, 0] == pytest.approx(math.exp(0.5), abs=1e-14)
        assert M[1, 1] == pytest.approx(math.exp(-0.5), abs=1e-14)


class TestEffectiveHamiltonian:
    def test_identity_gives_zero(self):
        assert np.max(np.abs(effective_hamiltonian(ModeTransform.identity(2)).matrix_H)) < 1e-15

    def test_zero_exponentiates_to_identity(self):
        assert close(exponentiate(EffectiveHamiltonianMatrix(np.zeros((4, 4)))), ModeTransform.identity(2), 0)

    def test_rotation_is_mode_exchange(self):
        phi = 0.4
        form = effective_hamiltonian(rotation(phi)).quadratic_form()
        assert np.max(np.abs(form.number - np.array([[0, 1j * phi], [-1j * phi, 0]]))) < 1e-10
        assert np.max(np.abs(form.pairing)) < 1e-10

    def test_squeezer_is_pair_creation(self):
        zeta = 0.25
        form = effective_hamiltonian(two_mode_squeezer(zeta)).quadratic_form()
        assert np.max(np.abs(form.pairing - np.array([[0, 1j * zeta], [1j * zeta, 0]]))) < 1e-10
        assert np.max(np.abs(form.number)) < 1e-10

    def test_single_mode_phase(self):
        form = effective_hamiltonian(phase_shift(0.3)).quadratic_form()
        assert form.number[0, 0] == pytest.approx(-0.3, abs=1e-12)

    def test_branch_cut_rejected(self):
        with pytest.raises(BranchCutError, match="negative real axis"):
            effective_hamiltonian(rotation(math.pi / 2 * 2))

    def test_non_quasi_unitary_rejected(self):
        with pytest.raises(ValidationError):
            effective_hamiltonian(ModeTransform(np.array([[2.0]])))

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValidationError):
            exponentiate(EffectiveHamiltonianMatrix(np.array([[0, 1.0], [0, 0]])))

    @given(seeds, st.integers(1, 4))
    def test_passive_round_trip(self, seed, M):
        S = random_passive(np.random.default_rng(seed), M)
        try:
            H = effective_hamiltonian(S)
        except BranchCutError:
            return
        assert H.hermiticity_defect() < 1e-12
        assert np.max(np.abs(exponentiate(H).full() - S.full())) < 1e-8

    @given(st.floats(-2, 2), st.integers(2, 4))
    def test_squeezer_round_trip(self, zeta, M):
        S = embed(two_mode_squeezer(zeta), (0, M - 1), M)
        assert np.max(np.abs(exponentiate(effective_hamiltonian(S)).full() - S.full())) < 1e-8

    def test_metric(self):
        assert np.array_equal(metric(2), np.diag([1, 1, -1, -1]))
