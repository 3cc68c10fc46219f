import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonic.dielectric import (
    Layer,
    LayeredProfile,
    SampledProfile,
    ScatteringMatrix2,
    SpectrumPoint,
    TransferMatrix,
    coupling_matrix,
    load_profile,
    profile_from_csv,
    profile_from_json,
    quarter_wave_stack,
    scattering_from_transfer,
    spectrum_sweep,
    sweep_to_csv,
    transfer_matrix,
)
from photonic.errors import NumericalError, SingularTransferError, ValidationError


def steep_step(width=1e-3, eps2=2.25, points=2001):
    return SampledProfile.from_function(
        lambda x: 1 + (eps2 - 1) * 0.5 * (1 + np.tanh(x / width)),
        lambda x: np.ones_like(x), -0.05, 0.05, points)


def irregular(oracle):
    return LayeredProfile(tuple(Layer(*l) for l in oracle["layers"]),
                          left=tuple(oracle["left"]), right=tuple(oracle["right"]))


layer_st = st.tuples(st.floats(0.05, 1.5), st.floats(1.0, 6.0), st.floats(0.5, 2.0))


class TestProfiles:
    def test_layer_impedance_and_index(self):
        L = Layer(1.0, 4.0, 1.0)
        assert L.impedance == pytest.approx(0.5)
        assert L.index == pytest.approx(2.0)

    @pytest.mark.parametrize("bad", [dict(d=-1, eps=1), dict(d=1, eps=0), dict(d=1, eps=1, mu=-2)])
    def test_invalid_layer(self, bad):
        with pytest.raises(ValidationError):
            Layer(**bad)

    def test_sampled_requires_flat_ends(self):
        x = np.linspace(0, 1, 11)
        with pytest.raises(ValidationError, match="constant"):
            SampledProfile(x, 1 + x, np.ones_like(x))

    def test_coupling_matrix_is_twice_idempotent(self):
        M = coupling_matrix(0.37)
        assert np.allclose(M @ M, 2 * M, atol=1e-15)


class TestTransferMatrix:
    def test_determinant_validation(self):
        with pytest.raises(NumericalError, match="z_ratio"):
            TransferMatrix(1.0, 0.5, 1.0)

    def test_from_matrix_requires_conjugate_structure(self):
        with pytest.raises(NumericalError, match="structure"):
            TransferMatrix.from_matrix(np.array([[1, 0.1], [0.2, 1]]), 0.99)

    def test_uniform_medium_is_identity(self):
        T = transfer_matrix(LayeredProfile((Layer(3.7, 2.0, 1.3),), left=(2.0, 1.3), right=(2.0, 1.3)), 1.9)
        assert abs(abs(T.a) - 1) < 1e-14 and abs(T.b) < 1e-14

    def test_uniform_sampled_medium(self):
        x = np.linspace(0, 2, 50)
        T = transfer_matrix(SampledProfile(x, np.full(50, 2.0), np.ones(50)), 3.0)
        assert abs(abs(T.a) - 1) < 1e-12 and abs(T.b) < 1e-12

    def test_quarter_wave_stack_reflects(self, oracles):
        stack = quarter_wave_stack(1.5, 1.0, 8, 1.0)
        for method in ("exact", "ode"):
            R = transfer_matrix(stack, 1.0, method).reflectance
            assert R > 0.9
            assert R == pytest.approx(oracles["quarter_wave_R"], abs=1e-8)

    def test_irregular_stack_against_frozen_oracle(self, oracles):
        o = oracles["irregular_stack"]
        T = transfer_matrix(irregular(o), o["omega"], "exact")
        assert T.a == pytest.approx(complex(*o["a"]), abs=1e-12)
        assert T.b == pytest.approx(complex(*o["b"]), abs=1e-12)
        assert T.reflectance == pytest.approx(o["R"], abs=1e-12)

    def test_determinant_is_impedance_ratio(self, oracles):
        profile = irregular(oracles["irregular_stack"])
        T = transfer_matrix(profile, 1.1, "ode")
        assert T.determinant == pytest.approx(profile.z_right / profile.z_left, abs=1e-8)

    @settings(max_examples=25)
    @given(st.lists(layer_st, min_size=1, max_size=4), st.floats(0.2, 4.0))
    def test_ode_matches_exact_layers(self, layers, omega):
        profile = LayeredProfile(tuple(Layer(*l) for l in layers), left=(1.0, 1.0), right=(2.0, 1.0))
        ex = transfer_matrix(profile, omega, "exact")
        od = transfer_matrix(profile, omega, "ode")
        assert abs(ex.a - od.a) < 1e-8 and abs(ex.b - od.b) < 1e-8
        assert np.max(np.abs(ex.matrix()[1] - ex.matrix()[0][::-1].conj())) < 1e-10

    def test_steep_step_matches_fresnel(self, oracles):
        T = transfer_matrix(steep_step(), 1.0)
        assert T.reflectance == pytest.approx(oracles["fresnel_R"], abs=1e-6)
        assert T.determinant == pytest.approx(2 / 3, abs=1e-8)

    def test_invalid_frequency(self):
        with pytest.raises(ValidationError):
            transfer_matrix(quarter_wave_stack(1.5, 1, 1, 1), -1.0)

    def test_unknown_method(self):
        with pytest.raises(ValidationError):
            transfer_matrix(quarter_wave_stack(1.5, 1, 1, 1), 1.0, "magic")

    def test_integrator_failure_reports_steps(self, monkeypatch):
        import photonic.dielectric as mod
        monkeypatch.setattr(mod, "DETERMINANT_TOL", -1.0)
        with pytest.raises(NumericalError, match="step"):
            transfer_matrix(steep_step(points=201, width=2e-3), 1.0)


class TestScattering:
    def test_identity(self):
        S = scattering_from_transfer(TransferMatrix.identity())
        assert np.allclose(S.matrix, np.eye(2), atol=1e-15)

    def test_singular(self):
        T = TransferMatrix.identity()
        object.__setattr__(T, "a", 0j)  # unreachable through the validated constructor
        with pytest.raises(SingularTransferError):
            scattering_from_transfer(T)

    def test_step_reflection_magnitude(self):
        T = transfer_matrix(LayeredProfile((), left=(1.0, 1.0), right=(2.25, 1.0)), 1.0)
        S = scattering_from_transfer(T)
        assert abs(S.reflection) == pytest.approx(0.2, abs=1e-14)

    @given(st.floats(-3, 3), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.floats(0.1, 10))
    def test_unitary_for_random_valid_transfer(self, r, pa, pb, zr):
        # |a|^2 - |b|^2 = zr with |b| = sqrt(zr) sinh r
        a = math.sqrt(zr) * math.cosh(r) * np.exp(1j * pa)
        b = math.sqrt(zr) * math.sinh(r) * np.exp(1j * pb)
        S = scattering_from_transfer(TransferMatrix(a, b, zr))
        assert np.max(np.abs(S.matrix @ S.matrix.conj().T - np.eye(2))) < 1e-10

    def test_non_unitary_rejected(self):
        with pytest.raises(NumericalError, match="unitary"):
            ScatteringMatrix2(np.array([[1, 1], [0, 1]]))


class TestSweep:
    def test_uniform_profile_has_no_reflection(self):
        points = spectrum_sweep(LayeredProfile((Layer(1.0, 1.0),)), [0.5, 1.0, 2.0])
        assert all(p.reflectance < 1e-28 for p in points)

    def test_bragg_peak_at_design_frequency(self):
        stack = quarter_wave_stack(1.5, 1.0, 8, 1.0)
        omegas = np.linspace(0.8, 1.2, 41)
        R = [p.reflectance for p in spectrum_sweep(stack, omegas)]
        assert omegas[int(np.argmax(R))] == pytest.approx(1.0)

    def test_energy_conservation(self):
        stack = quarter_wave_stack(2.0, 1.2, 5, 1.0)
        for p in spectrum_sweep(stack, np.linspace(0.1, 3, 60)):
            assert p.reflectance + p.transmittance == pytest.approx(1, abs=1e-8)

    def test_error_names_frequency(self):
        with pytest.raises(ValidationError, match="omega=-2"):
            spectrum_sweep(LayeredProfile((Layer(1.0, 2.0),)), [1.0, -2.0])

    def test_empty_sweep(self):
        with pytest.raises(ValidationError):
            spectrum_sweep(LayeredProfile((Layer(1.0, 2.0),)), [])


class TestIO:
    def test_json_layers(self):
        p = profile_from_json([{"d": 0.5, "eps": 2.0}, {"d": 1.0, "eps": 3.0, "mu": 1.5}])
        assert p.layers[1] == Layer(1.0, 3.0, 1.5)

    def test_json_with_ends(self):
        p = profile_from_json({"layers": [{"d": 0.5, "eps": 2.0}], "left": {"eps": 1.5}, "right": {"eps": 2.0, "mu": 2.0}})
        assert p.z_left == pytest.approx(math.sqrt(1 / 1.5))
        assert p.z_right == pytest.approx(1.0)

    def test_json_malformed(self):
        with pytest.raises(ValidationError):
            profile_from_json([{"thickness": 1}])

    def test_csv_grid(self):
        text = "x,eps,mu\n0,1,1\n1,1,1\n2,2,1\n3,2,1\n"
        p = profile_from_csv(text)
        assert p.z_right == pytest.approx(math.sqrt(0.5))

    def test_load_profile_dispatches_on_suffix(self, tmp_path):
        f = tmp_path / "stack.json"
        f.write_text(json.dumps([{"d": 1.0, "eps": 2.0}]))
        assert isinstance(load_profile(f), LayeredProfile)
        g = tmp_path / "grid.csv"
        g.write_text("x,eps,mu\n0,1,1\n1,1,1\n2,1,1\n3,1,1\n")
        assert isinstance(load_profile(g), SampledProfile)

    def test_sweep_csv(self):
        text = sweep_to_csv([SpectrumPoint(1.0, 0.25, 0.75)])
        assert text.splitlines() == ["omega,R,T", "1.0,0.25,0.75"]
