import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.sparse.linalg import expm_multiply
from scipy.special import comb
from scipy.stats import unitary_group

from photonic.errors import EmptyPostselectionError, TruncationError, ValidationError
from photonic.fock_engine import (
    FockState,
    apply_beam_splitter,
    apply_phase,
    apply_two_mode_squeezer,
    downconversion_state,
    hamiltonian_operator,
    k_casimir,
    k_expectations,
    mean_photon_numbers,
    photon_distribution,
    postselect_single_pairs,
    split_fock_distribution,
    stokes_casimir,
    stokes_expectations,
)
from photonic.bell import singlet_vector
from photonic.mode_core import BeamSplitterParams, beam_splitter_matrix, effective_hamiltonian, two_mode_squeezer

S2 = 1 / math.sqrt(2)
FIFTY = beam_splitter_matrix(BeamSplitterParams(Theta=math.pi / 2))
seeds = st.integers(0, 2**32 - 1)


def random_state(rng, M, cutoff, occupied):
    amp = np.zeros((cutoff + 1,) * M, dtype=complex)
    sl = (slice(0, occupied + 1),) * M
    amp[sl] = rng.normal(size=amp[sl].shape) + 1j * rng.normal(size=amp[sl].shape)
    return FockState(amp / np.linalg.norm(amp))


class TestFockState:
    def test_normalization_required(self):
        with pytest.raises(ValidationError):
            FockState(np.ones((2, 2)))

    def test_basis_and_vacuum(self):
        assert FockState.basis((2, 1), 3).amplitude((2, 1)) == 1
        assert FockState.vacuum(3, 2).amplitudes.shape == (3, 3, 3)

    def test_json_round_trip(self):
        s = FockState.from_dict({(1, 0): 1, (0, 1): 1j}, 2)
        data = s.to_json()
        assert {"occ": [1, 0], "re": S2, "im": 0.0} in data
        back = FockState.from_json(data, 2)
        assert np.allclose(back.amplitudes, s.amplitudes, atol=1e-15)


class TestBeamSplitter:
    def test_single_photon(self):
        out = apply_beam_splitter(FockState.basis((1, 0), 1), (0, 1), FIFTY)
        assert out.amplitude((1, 0)) == pytest.approx(S2)
        assert out.amplitude((0, 1)) == pytest.approx(-S2)

    def test_hong_ou_mandel(self):
        out = apply_beam_splitter(FockState.basis((1, 1), 2), (0, 1), FIFTY)
        assert abs(out.amplitude((1, 1))) < 1e-15
        assert out.amplitude((2, 0)) == pytest.approx(S2, abs=1e-15)
        assert out.amplitude((0, 2)) == pytest.approx(-S2, abs=1e-15)

    def test_identity_leaves_state(self):
        s = random_state(np.random.default_rng(0), 3, 3, 2)
        assert np.allclose(apply_beam_splitter(s, (0, 2), np.eye(2)).amplitudes, s.amplitudes, atol=1e-15)

    def test_non_unitary_rejected(self):
        with pytest.raises(ValidationError):
            apply_beam_splitter(FockState.vacuum(2, 1), (0, 1), np.array([[1, 1], [0, 1]]))

    @pytest.mark.parametrize("modes", [(0, 0), (0, 2)])
    def test_bad_modes(self, modes):
        with pytest.raises(ValidationError):
            apply_beam_splitter(FockState.vacuum(2, 1), modes, np.eye(2))

    @given(seeds)
    def test_homomorphism(self, seed):
        rng = np.random.default_rng(seed)
        s = random_state(rng, 2, 8, 4)
        B1, B2 = unitary_group.rvs(2, random_state=rng), unitary_group.rvs(2, random_state=rng)
        two_step = apply_beam_splitter(apply_beam_splitter(s, (0, 1), B1), (0, 1), B2)
        one_step = apply_beam_splitter(s, (0, 1), B2 @ B1)
        assert np.max(np.abs(two_step.amplitudes - one_step.amplitudes)) < 1e-10

    @given(seeds)
    def test_conserves_norm_and_number(self, seed):
        rng = np.random.default_rng(seed)
        s = random_state(rng, 3, 4, 2)
        out = apply_beam_splitter(s, (2, 0), unitary_group.rvs(2, random_state=rng))
        assert abs(out.norm - 1) < 1e-12
        assert mean_photon_numbers(out).sum() == pytest.approx(mean_photon_numbers(s).sum(), abs=1e-10)

    def test_phase(self):
        out = apply_phase(FockState.from_dict({(0,): 1, (2,): 1}, 2), 0, 0.3)
        assert out.amplitude((2,)) == pytest.approx(S2 * np.exp(0.6j))


class TestSplitting:
    def test_single_photon(self):
        d = split_fock_distribution(1, 0.5).as_dict()
        assert d == pytest.approx({(1, 0): 0.5, (0, 1): 0.5})

    def test_two_photons_against_beam_splitter(self):
        expected = split_fock_distribution(2, 0.5).as_dict(floor=1e-15)
        assert expected == pytest.approx({(2, 0): 0.25, (1, 1): 0.5, (0, 2): 0.25})
        measured = photon_distribution(apply_beam_splitter(FockState.basis((2, 0), 2), (0, 1), FIFTY))
        assert measured.as_dict(floor=1e-15) == pytest.approx(expected, abs=1e-15)

    def test_transparent(self):
        assert split_fock_distribution(3, 1.0).as_dict(floor=0) == {(3, 0): 1.0}

    @pytest.mark.parametrize("tau_sq", [-0.1, 1.5])
    def test_out_of_range(self, tau_sq):
        with pytest.raises(ValidationError):
            split_fock_distribution(2, tau_sq)

    @given(st.integers(0, 12), st.floats(0, 1))
    def test_binomial(self, n, tau_sq):
        P = split_fock_distribution(n, tau_sq).probabilities
        for k in range(n + 1):
            assert P[k, n - k] == pytest.approx(comb(n, k) * tau_sq ** k * (1 - tau_sq) ** (n - k), abs=1e-12)
        assert P.sum() == pytest.approx(1, abs=1e-12)


class TestSqueezer:
    def test_tanh_half(self, oracles):
        zeta = oracles["zeta_tanh_half"]
        out = apply_two_mode_squeezer(FockState.vacuum(2, 32), (0, 1), zeta)
        for n in range(10):
            assert out.amplitude((n, n)) == pytest.approx(math.sqrt(3) / 2 * 0.5 ** n, abs=1e-12)

    def test_matches_dense_exponential(self):
        zeta, cutoff = 0.4, 30
        psi = np.zeros((cutoff + 1) ** 2, dtype=complex)
        psi[0] = 1
        op = hamiltonian_operator(effective_hamiltonian(two_mode_squeezer(zeta)), cutoff)
        dense = expm_multiply(-1j * op, psi).reshape(cutoff + 1, cutoff + 1)
        ours = apply_two_mode_squeezer(FockState.vacuum(2, cutoff), (0, 1), zeta).amplitudes
        assert np.max(np.abs(dense[:12, :12] - ours[:12, :12])) < 1e-12

    def test_zero_is_identity(self):
        s = random_state(np.random.default_rng(1), 2, 3, 3)
        assert np.allclose(apply_two_mode_squeezer(s, (0, 1), 0.0).amplitudes, s.amplitudes, atol=1e-15)

    def test_only_pairs_from_vacuum(self):
        amp = apply_two_mode_squeezer(FockState.vacuum(2, 24), (0, 1), 0.5).amplitudes
        assert np.max(np.abs(amp - np.diag(np.diag(amp)))) == 0

    def test_truncation_error_suggests_cutoff(self):
        with pytest.raises(TruncationError, match="cutoff >="):
            apply_two_mode_squeezer(FockState.vacuum(2, 4), (0, 1), 0.6)

    def test_renormalize_opt_in(self):
        out = apply_two_mode_squeezer(FockState.vacuum(2, 4), (0, 1), 0.6, renormalize=True)
        assert out.norm == pytest.approx(1)
        assert out.leakage > 1e-8

    @given(seeds, st.floats(-0.4, 0.4))
    def test_conserves_number_difference(self, seed, zeta):
        s = random_state(np.random.default_rng(seed), 2, 32, 2)
        out = apply_two_mode_squeezer(s, (0, 1), zeta, leakage_bound=1e-11)
        before, after = mean_photon_numbers(s), mean_photon_numbers(out)
        assert after[0] - after[1] == pytest.approx(before[0] - before[1], abs=1e-10)

    def test_reduced_distribution_is_thermal(self):
        zeta = 0.5
        p = photon_distribution(apply_two_mode_squeezer(FockState.vacuum(2, 32), (0, 1), zeta)).marginal([0])
        N = math.sinh(zeta) ** 2
        for n in range(10):
            assert p.probabilities[n] == pytest.approx(N ** n / (N + 1) ** (n + 1), abs=1e-12)


class TestStokes:
    def test_single_photon(self):
        assert stokes_expectations(FockState.basis((1, 0), 1), (0, 1)) == pytest.approx((0.5, 0, 0, 0.5))

    def test_vacuum(self):
        assert stokes_expectations(FockState.vacuum(2, 2), (0, 1)) == pytest.approx((0, 0, 0, 0))

    def test_casimir_on_number_eigenstate(self):
        lhs, rhs = stokes_casimir(FockState.from_dict({(3, 0): 1, (1, 2): 1j, (0, 3): 2}, 3), (0, 1))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    @given(seeds)
    def test_fifty_fifty_rotates_sphere(self, seed):
        s = random_state(np.random.default_rng(seed), 2, 6, 3)
        Lt, Lx, Ly, Lz = stokes_expectations(s, (0, 1))
        Lt2, Lx2, Ly2, Lz2 = stokes_expectations(apply_beam_splitter(s, (0, 1), FIFTY), (0, 1))
        assert (Lt2, Lx2, Ly2, Lz2) == pytest.approx((Lt, -Lz, Ly, Lx), abs=1e-10)


class TestK:
    def test_vacuum(self):
        assert k_expectations(FockState.vacuum(2, 1), (0, 1)) == pytest.approx((0.5, 0, 0, -0.5))

    def test_pair_state(self):
        assert k_expectations(FockState.basis((1, 1), 2), (0, 1))[3] == pytest.approx(-0.5)

    def test_casimir_on_difference_eigenstate(self):
        lhs, rhs = k_casimir(FockState.from_dict({(2, 0): 1, (3, 1): 1, (4, 2): 1j}, 5), (0, 1))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    @given(seeds, st.floats(-0.3, 0.3))
    def test_squeezer_is_a_boost(self, seed, zeta):
        s = random_state(np.random.default_rng(seed), 2, 32, 2)
        Kt, Kx, Ky, Kz = k_expectations(s, (0, 1))
        out = k_expectations(apply_two_mode_squeezer(s, (0, 1), zeta, leakage_bound=1e-11), (0, 1))
        ch, sh = math.cosh(2 * zeta), math.sinh(2 * zeta)
        assert out == pytest.approx((ch * Kt + sh * Kx, sh * Kt + ch * Kx, Ky, Kz), abs=1e-9)


class TestDownconversion:
    def test_zero_is_vacuum(self):
        s = downconversion_state(0.0, 0.3, 2)
        assert s.amplitude((0, 0, 0, 0)) == pytest.approx(1)

    def test_postselects_singlet(self):
        pol, weight = postselect_single_pairs(downconversion_state(0.2, 0.7, 12))
        assert pol.fidelity(singlet_vector()) == pytest.approx(1, abs=1e-10)
        assert weight == pytest.approx(2 * math.tanh(0.2) ** 2 / math.cosh(0.2) ** 4, abs=1e-12)

    def test_small_zeta_weight(self, oracles):
        _, weight = postselect_single_pairs(downconversion_state(0.05, 0.0, 8))
        assert weight == pytest.approx(oracles["pair_weight_zeta_0.05"], abs=1e-12)
        assert weight == pytest.approx(2 * 0.05 ** 2, rel=0.01)

    def test_dominant_pair_is_singlet_like(self):
        s = downconversion_state(0.01, 0.0, 4)
        assert s.amplitude((1, 0, 0, 1)) == pytest.approx(-s.amplitude((0, 1, 1, 0)), abs=1e-15)

    def test_product_state_postselection(self):
        pol, weight = postselect_single_pairs(FockState.basis((1, 0, 1, 0), 1))
        assert pol.fidelity(np.array([1, 0, 0, 0])) == pytest.approx(1)
        assert weight == pytest.approx(1)

    def test_empty_postselection(self):
        with pytest.raises(EmptyPostselectionError):
            postselect_single_pairs(FockState.vacuum(4, 1))
