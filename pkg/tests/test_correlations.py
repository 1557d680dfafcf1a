"""
Unit tests for the heralded correlation functions and the coincidence camera emulation.
"""
import numpy as np
import pytest

from components import correlations, grating
from components.correlations import CameraGrid, CountingModel, FitForm, G2Result
from components.grating import DiffractionSpectrum, SinePattern
from components.networks import hbt_network, hom_network, tau_from_shift
from utils.errors import DomainError, NumericalError, UndefinedResultError

# (p, tau, d, expected g2_{rc,rd|wa,wb})
HOM_REFERENCE = [
    (0.05, 1.0, 0.017, 0.172388),
    (0.05, 1.0, 0.0, 0.134667),
    (0.05, 0.8, 0.017, 0.24258),
]


def _random_hom_cases(n=100, seed=2019):
    rng = np.random.default_rng(seed)
    return [(float(rng.uniform(0.001, 0.1)), float(rng.uniform(0, 1)), float(rng.uniform(0, 0.05)))
            for _ in range(n)]


RANDOM_HOM = _random_hom_cases()


class TestHomClosedForm:

    @pytest.mark.parametrize("p, tau, d, expected", HOM_REFERENCE)
    def test_reference_values(self, p, tau, d, expected):
        assert correlations.g2_hom_closed(p, tau, d).value == pytest.approx(expected, abs=1e-5)

    def test_dip_inside_measured_window(self, counting):
        g2 = correlations.g2_hom_closed(0.05, 1.0, counting)
        assert 0.20 - 0.06 <= g2.value <= 0.20 + 0.06
        assert g2.heralded

    @pytest.mark.parametrize("tau", [0.8, 0.9, 1.0])
    def test_visibility_above_classical_bound(self, tau):
        v = correlations.visibility(correlations.g2_hom_closed(0.05, tau, 0.017))
        assert v.nonclassical

    def test_distinguishable_modes_lose_the_dip(self):
        values = [correlations.g2_hom_closed(0.05, t, 0.017).value for t in np.linspace(0, 1, 11)]
        assert all(b < a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("c", [0.1, 0.5, 2.0])
    def test_depends_on_dark_ratio_only(self, c):
        reference = correlations.g2_hom_closed(0.05, 0.9, CountingModel(0.4, 0.004)).value
        scaled = correlations.g2_hom_closed(0.05, 0.9, CountingModel(0.4 * c, 0.004 * c)).value
        assert scaled == pytest.approx(reference, rel=1e-12)
        assert scaled == pytest.approx(correlations.g2_hom_closed(0.05, 0.9, 0.01).value, rel=1e-12)

    def test_dark_counts_fill_the_dip(self):
        values = [correlations.g2_hom_closed(0.05, 1.0, d).value for d in np.linspace(0, 0.1, 21)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            correlations.g2_hom_closed(1.0, 1.0)
        with pytest.raises(DomainError):
            correlations.g2_hom_closed(0.05, 1.1)


class TestNetworkAgreement:

    @pytest.mark.parametrize("p, tau, d", RANDOM_HOM)
    def test_closed_form_wick_and_oracle(self, p, tau, d):
        network = hom_network(p, tau)
        counting = CountingModel.from_ratio(d)
        closed = correlations.g2_hom_closed(p, tau, d).value
        wick = correlations.g2_from_moments(network, counting, ('wa', 'wb'), ('rc', 'rd')).value
        fock = correlations.g2_from_moments(network, counting, ('wa', 'wb'), ('rc', 'rd'), backend='fock',
                                            cutoff=12).value
        assert wick == pytest.approx(closed, rel=1e-6)
        assert fock == pytest.approx(closed, rel=1e-6)

    @pytest.mark.parametrize("theta", [0.0, 0.7, 2.0])
    def test_grating_phase_does_not_change_the_dip(self, theta, counting):
        g2 = correlations.g2_from_moments(hom_network(0.05, 1.0, theta), counting, ('wa', 'wb'), ('rc', 'rd'))
        assert g2.value == pytest.approx(0.172388, abs=1e-5)

    def test_unknown_backend(self, counting):
        with pytest.raises(DomainError):
            correlations.g2_from_moments(hom_network(0.05, 1.0), counting, ('wa',), ('rc', 'rd'), backend='x')

    def test_no_flux(self, counting):
        with pytest.raises(UndefinedResultError):
            correlations.g2_from_moments(hom_network(0.0, 1.0), CountingModel(), ('wa', 'wb'), ('rc', 'rd'))


class TestHbt:

    def test_cross_correlation_in_measured_window(self, counting):
        network = hbt_network(0.05, 1.0, 0.1, 0.1)
        g2 = correlations.g2_from_moments(network, counting, ('wa',), ('rc', 'rd'), backend='fock', cutoff=8)
        assert 0.34 - 0.03 <= g2.value <= 0.34 + 0.03
        wick = correlations.g2_from_moments(network, counting, ('wa',), ('rc', 'rd'))
        assert g2.value == pytest.approx(wick.value, rel=1e-6)

    def test_decoupled_auto_correlations(self, counting):
        network = hbt_network(0.05, 0.0, 0.1, 0.1)
        heralded = correlations.g2_auto(network, counting, ('wa',), 'rc', backend='fock', cutoff=8)
        thermal = correlations.g2_auto(network, counting, ('wa',), 'rd', backend='fock', cutoff=8)
        assert heralded.kind == 'auto'
        assert heralded.sub_poissonian
        assert 1 < thermal.value < 2


class TestCrossCorrelations:

    def test_write_read_cross_correlation(self, counting):
        network = hom_network(0.05, 1.0)
        nbar = 0.05 / 0.95
        d = counting.d
        expected = (nbar + (nbar + 1) / 3 + d) / (nbar + d)
        g_rc = correlations.g2_cross(network, counting, 'wa', 'rc')
        assert g_rc.value == pytest.approx(expected, rel=1e-10)
        assert g_rc.value == pytest.approx(6.04, abs=0.01)
        assert g_rc.nonclassical

    def test_misalignment_lowers_correlation(self, counting):
        network = hom_network(0.05, tau_from_shift(20.0, 10.3))
        coupling = correlations.misalignment_coupling(20.0, 10.3)
        assert 0 < coupling < 1
        aligned = correlations.g2_cross(network, counting, 'wa', 'rc')
        misaligned = correlations.g2_cross(network, counting, 'wa', 'rc', coupling)
        assert misaligned.value < aligned.value
        assert correlations.misalignment_coupling(0.0, 10.3) == pytest.approx(1.0, abs=1e-15)

    def test_fit_forms(self):
        rc, rd = correlations.g2_fit_forms(FitForm(), 0.0)
        assert rc == pytest.approx(24.1)
        assert rd == pytest.approx(1.0)
        rc, rd = correlations.g2_fit_forms(FitForm(), grating.balanced_chi())
        assert rc == pytest.approx(rd, rel=1e-12)

    def test_cauchy_schwarz(self):
        assert correlations.cauchy_schwarz(6.0, 2.0, 2.0).nonclassical
        assert not correlations.cauchy_schwarz(1.5, 2.0, 2.0).nonclassical


class TestClassicalHom:

    def test_phase_averaged_inputs_give_one_half(self):
        assert correlations.classical_hom(1.0, 0.1).value == pytest.approx(0.5, abs=1e-9)

    def test_monte_carlo_phase_average(self):
        g2 = correlations.classical_hom(1.0, 0.1, phase_samples=20000, seed=11)
        assert g2.value == pytest.approx(0.5, abs=0.02)

    def test_no_interference_without_overlap(self):
        assert correlations.classical_hom(0.0, 0.1).value > 0.5


class TestG2Result:

    def test_small_negative_rounding_is_clipped(self):
        assert G2Result(-1e-12).value == 0.0

    def test_negative_value_rejected(self):
        with pytest.raises(NumericalError):
            G2Result(-0.1)


class TestCoincidenceMap:

    GRID = CameraGrid(5, 13, 15.0)
    COUNTING = CountingModel(0.5, 1e-5)

    def _map(self, spectrum, shots=20000, seed=5):
        return correlations.coincidence_map(self.GRID, spectrum, 90.0, 0.01, self.COUNTING, shots, seed)

    def test_unmodulated_single_peak(self):
        result = self._map(DiffractionSpectrum({0: 1 + 0j}, 0))
        assert result.at(0.0, 0.0).value > 5
        assert result.at(0.0, 90.0).value < 2
        assert result.at(0.0, -90.0).value < 2

    def test_balanced_grating_three_peaks(self):
        spectrum = grating.decompose(SinePattern(grating.balanced_chi(), 0.0, 90.0))
        result = self._map(spectrum)
        for ky in (-90.0, 0.0, 90.0):
            assert result.at(0.0, ky).value > 5
        assert result.at(0.0, 45.0).value < 2

    def test_balanced_peaks_have_equal_heights(self):
        spectrum = grating.decompose(SinePattern(grating.balanced_chi(), 0.0, 90.0))
        result = self._map(spectrum, shots=10 ** 6, seed=11)
        peaks = [result.at(0.0, ky) for ky in (-90.0, 0.0, 90.0)]
        for a, b in ((peaks[0], peaks[1]), (peaks[1], peaks[2]), (peaks[0], peaks[2])):
            assert abs(a.value - b.value) < 3 * np.hypot(a.sigma, b.sigma)

    def test_dark_counts_alone_give_flat_map(self):
        result = correlations.coincidence_map(self.GRID, DiffractionSpectrum({0: 1 + 0j}, 0), 90.0, 0.0,
                                              CountingModel(0.5, 0.01), 20000, 3)
        populated = result.accidentals >= 50
        assert populated.sum() > 20
        assert result.coincidences.sum() / result.accidentals.sum() == pytest.approx(1.0, abs=0.02)
        deviation = np.abs(result.g2[populated] - 1) * np.sqrt(result.accidentals[populated])
        assert np.all(deviation < 5)

    def test_deterministic_for_fixed_seed(self):
        a = self._map(DiffractionSpectrum({0: 1 + 0j}, 0), shots=2000, seed=9)
        b = self._map(DiffractionSpectrum({0: 1 + 0j}, 0), shots=2000, seed=9)
        assert np.array_equal(a.coincidences, b.coincidences)

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            CameraGrid(4, 13, 15.0)
        with pytest.raises(DomainError):
            correlations.coincidence_map(CameraGrid(5, 13, 40.0), DiffractionSpectrum({0: 1 + 0j}, 0), 90.0,
                                         0.01, self.COUNTING, 100, 1)
