import json
import math

import numpy as np
import pytest

from clickgbs import gaussian
from clickgbs.errors import (
    DimensionMismatch,
    InvalidMatrix,
    InvalidOrdering,
    InvalidState,
    NegativeMeanPhotons,
)

from conftest import make_state


class TestPreparations:
    def test_thermal_zero_is_vacuum(self):
        np.testing.assert_array_equal(gaussian.thermal(0.0).cov, gaussian.vacuum(1).cov)

    def test_thermal_one(self):
        np.testing.assert_allclose(gaussian.thermal(1.0).cov, 3.0 * np.eye(2))

    def test_coherent_conventions(self):
        st = gaussian.coherent(1.0 + 0.0j)
        np.testing.assert_array_equal(st.mean, [1.0, 0.0])
        np.testing.assert_array_equal(st.cov, np.eye(2))

    def test_pure_preparations_have_unit_determinant(self):
        for st in (gaussian.vacuum(2), gaussian.coherent(0.3 - 1j), gaussian.squeezed(0.8)):
            assert np.linalg.det(st.cov) == pytest.approx(1.0, abs=1e-9)

    def test_negative_nbar_rejected(self):
        with pytest.raises(NegativeMeanPhotons):
            gaussian.thermal(-0.1)

    def test_unphysical_covariance_rejected(self):
        with pytest.raises(InvalidState):
            gaussian.GaussianState(0.5 * np.eye(2), np.zeros(2))


class TestTensor:
    def test_vacuum_product(self):
        out = gaussian.tensor(gaussian.vacuum(1), gaussian.vacuum(1))
        np.testing.assert_array_equal(out.cov, gaussian.vacuum(2).cov)

    def test_direct_sum(self):
        out = gaussian.tensor(gaussian.thermal(1.0), gaussian.coherent(1.0))
        np.testing.assert_allclose(out.cov, np.diag([3.0, 3.0, 1.0, 1.0]))
        np.testing.assert_array_equal(out.mean, [0.0, 0.0, 1.0, 0.0])

    def test_modes_additive(self):
        out = gaussian.tensor(gaussian.vacuum(2), gaussian.thermal(0.5))
        assert out.modes == 3


class TestApplyUnitary:
    def test_identity_unitary(self):
        st = make_state(0, 2)
        out = gaussian.apply_unitary(st, np.eye(2))
        np.testing.assert_allclose(out.cov, st.cov, atol=1e-14)

    def test_single_mode_phase_preserves_vacuum(self):
        u = np.array([[np.exp(0.7j)]])
        out = gaussian.apply_unitary(gaussian.vacuum(1), u)
        np.testing.assert_allclose(out.cov, np.eye(2), atol=1e-12)

    def test_beamsplitter_keeps_symplectic_determinant(self):
        bs = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
        st = gaussian.tensor(gaussian.squeezed(0.9), gaussian.vacuum(1))
        out = gaussian.apply_unitary(st, bs)
        assert np.linalg.det(out.cov) == pytest.approx(1.0, abs=1e-9)

    def test_embedding_is_symplectic(self):
        for seed in range(3):
            u = gaussian.haar_unitary(3, seed)
            s = gaussian.real_embedding(u)
            omega = gaussian.symplectic_form(3)
            np.testing.assert_allclose(s @ omega @ s.T, omega, atol=1e-9)

    def test_composition(self):
        u = gaussian.haar_unitary(3, 11)
        v = gaussian.haar_unitary(3, 12)
        left = gaussian.real_embedding(u @ v)
        right = gaussian.real_embedding(u) @ gaussian.real_embedding(v)
        np.testing.assert_allclose(left, right, atol=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            gaussian.apply_unitary(gaussian.vacuum(1), np.eye(2))

    def test_non_unitary_rejected(self):
        with pytest.raises(InvalidMatrix):
            gaussian.apply_unitary(gaussian.vacuum(2), np.ones((2, 2)))


class TestHaarUnitary:
    def test_unitarity(self):
        for seed in (0, 5, 9):
            u = gaussian.haar_unitary(4, seed)
            np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-9)

    def test_determinism(self):
        np.testing.assert_array_equal(gaussian.haar_unitary(3, 7), gaussian.haar_unitary(3, 7))

    def test_single_mode_is_pure_phase(self):
        u = gaussian.haar_unitary(1, 3)
        assert abs(abs(u[0, 0]) - 1.0) < 1e-12


class TestChannels:
    def test_loss_eta_one_is_identity(self):
        st = make_state(1, 2)
        out = gaussian.loss_channel(st, 1.0)
        np.testing.assert_allclose(out.cov, st.cov, atol=1e-14)

    def test_loss_eta_zero_gives_vacuum(self):
        out = gaussian.loss_channel(make_state(2, 2), 0.0)
        np.testing.assert_allclose(out.cov, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(out.mean, 0.0, atol=1e-12)

    def test_loss_on_thermal_scales_occupation(self):
        out = gaussian.loss_channel(gaussian.thermal(2.0), 0.4)
        np.testing.assert_allclose(out.cov, gaussian.thermal(0.8).cov, atol=1e-12)

    def test_reduce_keep_all(self):
        st = make_state(3, 3)
        out = gaussian.reduce(st, (1, 2, 3))
        np.testing.assert_array_equal(out.cov, st.cov)

    def test_reduce_product_state(self):
        a, b = gaussian.thermal(1.0), gaussian.squeezed(0.5)
        out = gaussian.reduce(gaussian.tensor(a, b), (1,))
        np.testing.assert_array_equal(out.cov, a.cov)

    def test_reduce_stays_physical(self):
        bs = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
        st = gaussian.apply_unitary(
            gaussian.tensor(gaussian.squeezed(0.8), gaussian.vacuum(1)), bs
        )
        out = gaussian.reduce(st, (1,))  # construction re-checks physicality
        assert out.modes == 1


class TestMultiplexExpand:
    def test_single_split_is_identity(self):
        st = make_state(4, 2)
        assert gaussian.multiplex_expand(st, 1) is st

    def test_coherent_split_amplitudes(self):
        g = 0.9 + 0.5j
        out = gaussian.multiplex_expand(gaussian.coherent(g), 2)
        amp1 = math.hypot(out.mean[0], out.mean[1])
        amp2 = math.hypot(out.mean[2], out.mean[3])
        assert amp1 == pytest.approx(abs(g) / math.sqrt(2.0), abs=1e-12)
        assert amp2 == pytest.approx(abs(g) / math.sqrt(2.0), abs=1e-12)

    def test_energy_conserved(self):
        def energy(state):
            return (
                float(np.sum(np.diagonal(state.cov) - 1.0)) / 2.0
                + float(state.mean @ state.mean) / 2.0
            )

        st = make_state(5, 2, displaced=True)
        for n in (2, 3, 4):
            assert energy(gaussian.multiplex_expand(st, n)) == pytest.approx(
                energy(st), abs=1e-9
            )

    def test_physicality_closed_under_operations(self):
        st = make_state(6, 2, displaced=True)
        # each constructor re-validates physicality
        gaussian.multiplex_expand(st, 3)
        gaussian.loss_channel(st, 0.6)
        gaussian.apply_unitary(st, gaussian.haar_unitary(2, 1))
        gaussian.tensor(st, gaussian.thermal(0.2))
        gaussian.reduce(st, (2,))


class TestPhaseSpace:
    def test_vacuum_kernel(self):
        v = gaussian.vacuum(1)
        np.testing.assert_array_equal(gaussian.husimi_sigma(v), np.eye(2))
        np.testing.assert_allclose(gaussian.kernel_O(v), np.zeros((2, 2)), atol=1e-14)

    def test_thermal_kernel(self):
        t = gaussian.thermal(1.0)
        np.testing.assert_allclose(gaussian.husimi_sigma(t), 2.0 * np.eye(2))
        np.testing.assert_allclose(gaussian.kernel_O(t), 0.5 * np.eye(2), atol=1e-12)

    def test_kernel_spectrum_below_one(self):
        for seed in range(6):
            st = make_state(seed + 30, 2, displaced=bool(seed % 2))
            eigs = np.linalg.eigvalsh(gaussian.kernel_O(st))
            assert eigs.max() < 1.0 + 1e-9

    def test_husimi_at_origin(self):
        val = gaussian.s_pqd_eval(gaussian.vacuum(1), [-1.0], [0.0, 0.0])
        assert val == pytest.approx(1.0 / math.pi, abs=1e-12)

    def test_coherent_peak(self):
        st = gaussian.coherent(0.7 + 0.3j)
        val = gaussian.s_pqd_eval(st, [-1.0], st.mean)
        assert val == pytest.approx(1.0 / math.pi, abs=1e-12)

    def test_p_function_of_vacuum_invalid(self):
        with pytest.raises(InvalidOrdering):
            gaussian.s_pqd_eval(gaussian.vacuum(1), [1.0], [0.0, 0.0])

    def test_quadrature_normalization(self):
        # coarse grid integral of the Q-function of a single-mode state
        st = gaussian.loss_channel(gaussian.squeezed(0.5), 0.9)
        xs = np.linspace(-4.5, 4.5, 121)
        step = xs[1] - xs[0]
        total = sum(
            gaussian.s_pqd_eval(st, [-1.0], [x, y]) for x in xs for y in xs
        ) * step ** 2
        assert total == pytest.approx(1.0, abs=1e-3)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        st = make_state(9, 2, displaced=True)
        path = tmp_path / "state.json"
        gaussian.save_state(st, path)
        back = gaussian.load_state(path)
        np.testing.assert_array_equal(back.cov, st.cov)
        np.testing.assert_array_equal(back.mean, st.mean)

    def test_wrong_ordering_rejected(self, tmp_path):
        st = gaussian.vacuum(1)
        doc = gaussian.state_to_dict(st)
        doc["ordering"] = "q1,...,qM,p1,...,pM"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(InvalidState):
            gaussian.load_state(path)

    def test_missing_key_rejected(self):
        with pytest.raises(InvalidState):
            gaussian.state_from_dict({"modes": 1})

    def test_wrong_lengths_rejected(self):
        doc = gaussian.state_to_dict(gaussian.vacuum(2))
        doc["mean"] = [0.0]
        with pytest.raises(InvalidState):
            gaussian.state_from_dict(doc)

    def test_asymmetric_covariance_rejected(self):
        doc = gaussian.state_to_dict(gaussian.vacuum(1))
        doc["cov"] = [1.0, 0.5, 0.0, 1.0]
        with pytest.raises(InvalidState):
            gaussian.state_from_dict(doc)
