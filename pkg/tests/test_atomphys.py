"""
Unit tests for the ac Stark and phase-matching models.
"""
import math

import numpy as np
import pytest
from scipy.constants import c, epsilon_0

from components import atomphys, grating
from components.atomphys import EnsembleGeometry, StarkParams
from components.grating import SinePattern
from utils.config import STARK_DETUNING_RAD_PER_S, STARK_INTENSITY_MW_PER_CM2
from utils.errors import DomainError, EvanescentError, PoleProximityError

TWO_PI = 2 * math.pi


def stark(detuning=STARK_DETUNING_RAD_PER_S, convention='rms'):
    return StarkParams(detuning, STARK_INTENSITY_MW_PER_CM2, field_convention=convention)


class TestStarkShift:

    def test_operating_point(self):
        s = stark()
        assert atomphys.rad_per_s_to_hz(atomphys.differential_shift(s)) == pytest.approx(-38.4e3, abs=100)
        assert atomphys.stark_phase(s) == pytest.approx(-0.483, abs=2e-3)

    def test_default_field_is_not_the_peak_amplitude(self):
        intensity = STARK_INTENSITY_MW_PER_CM2 * 10.0
        peak = math.sqrt(2 * intensity / (epsilon_0 * c))
        assert StarkParams(0.0, STARK_INTENSITY_MW_PER_CM2).field_convention == 'rms'
        assert atomphys.field_amplitude(stark()) == pytest.approx(peak / math.sqrt(2), rel=1e-12)
        assert atomphys.field_amplitude(stark(convention='peak')) == pytest.approx(peak, rel=1e-12)

    def test_peak_convention_doubles_the_shift(self):
        rms = atomphys.differential_shift(stark())
        peak = atomphys.differential_shift(stark(convention='peak'))
        assert peak == pytest.approx(2 * rms, rel=1e-12)

    @pytest.mark.parametrize("f_hz", [1e13, 1e14, 1e15])
    def test_far_detuned_limits(self, f_hz):
        s = stark(TWO_PI * f_hz)
        omega2 = atomphys.rabi_frequency(s) ** 2
        delta = s.detuning
        assert atomphys.stark_shift_g(s) * delta == pytest.approx(omega2 / 12, rel=1e-3)
        assert atomphys.stark_shift_h(s) * delta == pytest.approx(omega2 / 12, rel=1e-3)
        expected = omega2 / 4 * (2 / 3 * s.a_half - 59 / 48 * s.a_three_half)
        assert atomphys.differential_shift(s) * delta ** 2 == pytest.approx(expected, rel=1e-3)

    def test_differential_shift_vanishes_far_away(self):
        near = abs(atomphys.differential_shift(stark(TWO_PI * 1e11)))
        far = abs(atomphys.differential_shift(stark(TWO_PI * 1e13)))
        assert far < near * 1e-3

    def test_pole_positions(self):
        poles_ghz = [atomphys.rad_per_s_to_hz(p) / 1e9 for p in atomphys.pole_detunings(stark())]
        for expected in (-4.21125, -4.04125, 2.37375, 2.58625, 2.62875):
            assert min(abs(p - expected) for p in poles_ghz) < 1e-9

    def test_pole_guard(self):
        with pytest.raises(PoleProximityError):
            atomphys.differential_shift(stark(TWO_PI * (2.37375e9 + 0.5e6)))

    def test_sweep_skips_poles(self):
        detunings = [STARK_DETUNING_RAD_PER_S, TWO_PI * 2.58625e9, TWO_PI * 5e9]
        rows = atomphys.stark_sweep(detunings, stark())
        assert [r[0] for r in rows] == [detunings[0], detunings[2]]
        delta, g, h, diff = rows[0]
        assert diff == pytest.approx(h - g)

    def test_zero_intensity_has_no_shift(self):
        s = StarkParams(STARK_DETUNING_RAD_PER_S, 0.0)
        assert atomphys.stark_phase(s) == 0.0

    def test_invalid_parameters(self):
        with pytest.raises(DomainError):
            stark(convention='average')
        with pytest.raises(DomainError):
            StarkParams(STARK_DETUNING_RAD_PER_S, -1.0)


class TestPhaseMatching:

    GEOMETRY = EnsembleGeometry()

    def test_no_transverse_wavevector(self):
        assert atomphys.phasematch_efficiency(0.0, self.GEOMETRY) == 1.0

    def test_reference_wavevector(self):
        assert atomphys.phasematch_efficiency(44.0, self.GEOMETRY) == pytest.approx(0.8868, abs=5e-4)

    @pytest.mark.parametrize("k_y", [0.0, 20.0, 44.0, 90.0, 150.0])
    def test_quadrature_agrees(self, k_y):
        closed = atomphys.phasematch_efficiency(k_y, self.GEOMETRY)
        assert atomphys.phasematch_quadrature(k_y, self.GEOMETRY) == pytest.approx(closed, abs=1e-8)

    def test_paraxial_limit(self):
        exact = atomphys.phase_mismatch(44.0, self.GEOMETRY)
        assert atomphys.paraxial_mismatch(44.0, self.GEOMETRY.k_r) == pytest.approx(exact, rel=1e-4)

    def test_evanescent_rejected(self):
        with pytest.raises(EvanescentError):
            atomphys.phasematch_efficiency(8000.0, self.GEOMETRY)

    def test_efficiency_map(self):
        spectrum = grating.decompose(SinePattern(grating.balanced_chi(), 0.0, 90.0))
        k_w = np.linspace(-150, 150, 31)
        k_r = np.linspace(-200, 200, 41)
        table = atomphys.efficiency_map(k_w, k_r, spectrum, 90.0, 10.3, self.GEOMETRY)
        assert table.shape == (41, 31)
        assert table.max() == pytest.approx(1.0)
        assert table.min() >= 0

    def test_geometry_validated(self):
        with pytest.raises(DomainError):
            EnsembleGeometry(sigma_z=0.0)


class TestNoise:

    def test_mode_count_and_probability(self):
        estimate = atomphys.noise_mode_estimate(EnsembleGeometry(), 1e8, 1e-3, 2e-6)
        assert estimate.modes == pytest.approx(7.165e8, rel=1e-3)
        assert estimate.probability_per_mode == pytest.approx(2.79e-10, rel=2e-3)

    def test_negative_inputs_rejected(self):
        with pytest.raises(DomainError):
            atomphys.noise_mode_estimate(EnsembleGeometry(), -1.0, 1e-3)
