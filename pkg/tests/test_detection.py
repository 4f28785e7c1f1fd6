import math

import numpy as np
import pytest

from clickgbs import detection
from clickgbs.detection import DetectorModel
from clickgbs.errors import NegativeMeanPhotons, OutOfRange, TailTooHeavy


class TestStirling2:
    def test_recurrence_value(self):
        assert detection.stirling2(3, 2) == 3

    @pytest.mark.parametrize("n", [0, 1, 5, 20, 64])
    def test_diagonal(self, n):
        assert detection.stirling2(n, n) == 1

    @pytest.mark.parametrize("n", [1, 7, 30])
    def test_zero_column(self, n):
        assert detection.stirling2(n, 0) == 0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            detection.stirling2(65, 2)
        with pytest.raises(OutOfRange):
            detection.stirling2(3, 4)


class TestClickCoeff:
    @pytest.mark.parametrize("n_det", [1, 2, 4, 8, 16])
    def test_first_diagonals_are_one(self, n_det):
        assert detection.click_coeff(n_det, 0, 0) == 1.0
        assert detection.click_coeff(n_det, 1, 1) == 1.0

    def test_hand_value(self):
        assert detection.click_coeff(4, 2, 2) == 0.75

    def test_zero_below_diagonal(self):
        assert detection.click_coeff(4, 3, 2) == 0.0

    def test_completeness(self):
        for n_det in (1, 2, 4, 8, 16):
            for n in range(21):
                total = math.fsum(detection.click_coeff(n_det, k, n) for k in range(n_det + 1))
                assert abs(total - 1.0) < 1e-10

    def test_diagonal_law(self):
        for n_det in (1, 2, 4, 8, 16):
            for k in range(n_det + 1):
                expected = math.factorial(n_det) / (
                    math.factorial(n_det - k) * n_det ** k
                )
                assert abs(detection.click_coeff(n_det, k, k) - expected) < 1e-12

    def test_matches_stirling_route(self):
        for n_det in (3, 5):
            for k in range(n_det + 1):
                for n in range(k, 40, 3):
                    via_stirling = (
                        math.comb(n_det, k)
                        * math.factorial(k)
                        * detection.stirling2(n, k)
                        / n_det ** n
                    )
                    assert detection.click_coeff(n_det, k, n) == pytest.approx(
                        via_stirling, rel=1e-12
                    )


class TestPnr:
    def test_thermal_pnr_geometric(self):
        pnr = detection.thermal_pnr(1.0, 10)
        np.testing.assert_allclose(pnr.probs, [2.0 ** -(n + 1) for n in range(11)])

    def test_vacuum_pnr(self):
        pnr = detection.thermal_pnr(0.0, 5)
        np.testing.assert_array_equal(pnr.probs, [1.0, 0, 0, 0, 0, 0])
        assert pnr.tail == 0.0

    def test_mass_plus_tail_is_one(self):
        for nbar in (0.3, 1.0, 2.0):
            pnr = detection.thermal_pnr(nbar, 45)
            assert math.fsum(list(pnr.probs) + [pnr.tail]) == 1.0

    def test_tail_matches_geometric_formula(self):
        pnr = detection.thermal_pnr(1.0, 30)
        assert pnr.tail == pytest.approx(0.5 ** 31, rel=1e-9)

    def test_negative_nbar(self):
        with pytest.raises(NegativeMeanPhotons):
            detection.thermal_pnr(-1.0, 5)


class TestClickFromPnr:
    def test_vacuum_input(self):
        pnr = detection.PnrDistribution(np.array([1.0, 0.0]), 0.0)
        out = detection.click_from_pnr(pnr, 4)
        np.testing.assert_array_equal(out, [1.0, 0, 0, 0, 0])

    def test_single_photon_input(self):
        pnr = detection.PnrDistribution(np.array([0.0, 1.0]), 0.0)
        out = detection.click_from_pnr(pnr, 3)
        np.testing.assert_allclose(out, [0.0, 1.0, 0.0, 0.0], atol=1e-15)

    def test_thermal_matches_closed_form(self):
        out = detection.click_from_pnr(detection.thermal_pnr(1.0, 45), 2)
        np.testing.assert_allclose(out, [0.5, 1.0 / 3.0, 1.0 / 6.0], atol=1e-12)

    def test_two_routes_agree(self):
        for nbar in (0.2, 0.8, 1.5):
            for n_det in (1, 2, 4):
                model = DetectorModel(n_det)
                pnr = detection.thermal_pnr(nbar, 70)
                via_povm = detection.click_from_pnr(pnr, n_det)
                closed = [
                    detection.thermal_click_closed(nbar, model, k)
                    for k in range(n_det + 1)
                ]
                np.testing.assert_allclose(via_povm, closed, atol=1e-9)

    def test_heavy_tail_rejected(self):
        with pytest.raises(TailTooHeavy):
            detection.click_from_pnr(detection.thermal_pnr(1.0, 4), 2)


class TestClosedForms:
    def test_thermal_hand_values(self):
        model = DetectorModel(2)
        probs = [detection.thermal_click_closed(1.0, model, k) for k in range(3)]
        np.testing.assert_allclose(probs, [0.5, 1.0 / 3.0, 1.0 / 6.0], atol=1e-14)

    def test_vacuum_never_clicks(self):
        model = DetectorModel(4)
        assert detection.thermal_click_closed(0.0, model, 0) == 1.0

    def test_threshold_thermal(self):
        for nbar in (0.3, 1.0, 2.5):
            p1 = detection.thermal_click_closed(nbar, DetectorModel(1), 1)
            assert p1 == pytest.approx(nbar / (1.0 + nbar), rel=1e-12)

    @pytest.mark.parametrize("nu", [0.0, 1e-3, 0.05])
    def test_thermal_normalization(self, nu):
        model = DetectorModel(4, eta=0.8, nu=nu)
        total = math.fsum(
            detection.thermal_click_closed(0.9, model, k) for k in range(5)
        )
        assert abs(total - 1.0) < 1e-12

    def test_coherent_hand_values(self):
        intensity = 2.0 * math.log(2.0)
        model = DetectorModel(2)
        probs = [detection.coherent_click_closed(intensity, model, k) for k in range(3)]
        np.testing.assert_allclose(probs, [0.25, 0.5, 0.25], atol=1e-14)

    def test_coherent_dark_input(self):
        assert detection.coherent_click_closed(0.0, DetectorModel(3), 0) == 1.0

    def test_threshold_coherent(self):
        for intensity in (0.1, 1.0, 3.0):
            p1 = detection.coherent_click_closed(intensity, DetectorModel(1), 1)
            assert p1 == pytest.approx(1.0 - math.exp(-intensity), rel=1e-12)


class TestConvergenceGap:
    def test_hand_value(self):
        assert detection.povm_convergence_gap(1.0, 2) == pytest.approx(0.125, abs=1e-12)

    def test_large_n_converges(self):
        assert detection.povm_convergence_gap(1.0, 64) < 1e-2

    @pytest.mark.parametrize("n_det", [1, 2, 4, 8])
    def test_vacuum_gap_is_zero(self, n_det):
        assert detection.povm_convergence_gap(0.0, n_det) == 0.0

    def test_non_increasing_in_n(self):
        for nbar in (0.2, 0.5, 1.0):
            gaps = [detection.povm_convergence_gap(nbar, n) for n in (1, 2, 4, 8, 16, 32)]
            assert all(a >= b - 1e-15 for a, b in zip(gaps, gaps[1:]))

    def test_tvd_below_collision_mass_bound(self):
        # TVD(click, PNR) <= total PNR mass at two or more photons
        for nbar in (0.1, 0.5, 1.0, 2.0):
            bound = (nbar / (1.0 + nbar)) ** 2
            for n_det in (1, 2, 4, 8):
                assert detection.povm_convergence_gap(nbar, n_det) <= bound + 1e-12


class TestDetectorModel:
    def test_validation(self):
        with pytest.raises(OutOfRange):
            DetectorModel(0)
        with pytest.raises(OutOfRange):
            DetectorModel(2, eta=1.5)
        with pytest.raises(OutOfRange):
            DetectorModel(2, nu=-0.1)

    def test_ideal_flag(self):
        assert DetectorModel(3).ideal
        assert not DetectorModel(3, eta=0.9).ideal
        assert not DetectorModel(3, nu=1e-4).ideal
