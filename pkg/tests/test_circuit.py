import math

import numpy as np
import pytest

from netctl.circuit import RcLadder, build_circuit, circuit_report, dissipated_energy, inject_current
from netctl.errors import DimensionError, ParameterError


class TestBuild:
    def test_three_stage(self):
        a, b = build_circuit(3, 1.0, 1.0)
        np.testing.assert_array_equal(a, [[-2, 1, 0], [1, -2, 1], [0, 1, -1]])
        np.testing.assert_array_equal(b.dense(), [[1], [0], [0]])

    def test_single_stage(self):
        a, b = build_circuit(1)
        np.testing.assert_array_equal(a, [[-1]])
        np.testing.assert_array_equal(b.dense(), [[1]])

    def test_scaling(self):
        a1, _ = build_circuit(3, 1.0, 1.0)
        a2, b2 = build_circuit(3, 2.0, 1.0)
        np.testing.assert_array_equal(a2, a1 / 2)
        assert b2.dense()[0, 0] == 0.5

    @pytest.mark.parametrize("r,c", [(0.0, 1.0), (1.0, -1.0)])
    def test_bad_parameters(self, r, c):
        with pytest.raises(ParameterError):
            build_circuit(3, r, c)

    def test_symmetric_real_spectrum(self):
        a, _ = build_circuit(7)
        np.testing.assert_array_equal(a, a.T)
        assert np.all(np.linalg.eigvalsh(a) < 0)


class TestInjection:
    def test_second_stage(self):
        cm = inject_current(RcLadder(3), 2)
        np.testing.assert_array_equal(cm.dense(), [[1, 0], [0, 1], [0, 0]])

    def test_duplicate_flagged(self):
        assert inject_current(RcLadder(3), 1).duplicates == [0]

    def test_range(self):
        with pytest.raises(ParameterError):
            inject_current(RcLadder(3), 4)

    def test_capacitance_gain(self):
        assert inject_current(RcLadder(3, 1.0, 4.0), 3).gains[1] == 0.25


class TestDissipation:
    def test_zero(self):
        assert dissipated_energy(RcLadder(3), np.zeros(11), np.zeros((11, 3))) == 0.0

    def test_no_current(self):
        x = np.zeros((11, 3))
        x[:, 0] = 1.0
        assert dissipated_energy(RcLadder(3), np.ones(11), x, np.linspace(0, 1, 11)) == 0.0

    def test_constant_current(self):
        t = np.linspace(0, 2, 21)
        e = dissipated_energy(RcLadder(2, r=2.0), np.full(21, 3.0), np.ones((21, 2)), t)
        assert e == pytest.approx(3.0 * 1.0 * 2)

    def test_grid_mismatch(self):
        with pytest.raises(DimensionError):
            dissipated_energy(RcLadder(3), np.zeros(10), np.zeros((11, 3)))


class TestReport:
    @staticmethod
    @pytest.fixture(scope="class")
    def report():
        return circuit_report(7, seed=0)

    def test_keys(self, report):
        assert {"L", "R", "C", "E_control", "E_real", "E_chain_equiv", "injections", "ratios"} <= set(report)

    def test_real_energy_not_below_control(self, report):
        assert report["E_real"] >= 0.95 * report["E_control"]

    def test_energies_same_scale(self, report):
        logs = [math.log10(report[k]) for k in ("E_control", "E_real", "E_chain_equiv")]
        assert max(logs) - min(logs) < 3

    def test_mid_injection(self, report):
        assert report["injections"] == [4]
        assert report["ratios"]["4"] <= 1e-6

    @pytest.mark.parametrize("l", range(2, 7))
    def test_scale_small_ladders(self, l):
        rep = circuit_report(l, seed=l)
        logs = [math.log10(rep[k]) for k in ("E_control", "E_real", "E_chain_equiv")]
        assert max(logs) - min(logs) < 3

    def test_steps_floor(self):
        with pytest.raises(ParameterError):
            circuit_report(3, steps=100)
