"""Scenario runner for the spin-wave memory simulator.

Every scenario regenerates the data behind one experiment or estimate of the
wavevector-multiplexed memory study and writes it as CSV tables plus a JSON
manifest. The physics lives in `components`; this module only sweeps
parameters, runs the self-checks and writes artifacts.

Scenarios:
diffraction-orders   |c_m|^2 of a sine grating versus modulation RMS
steered-diffraction  one-sided diffraction with a two-tone grating
coincidence-map      camera coincidence Monte Carlo with and without modulation
hom-dip              two-excitation interference dip versus mode displacement
hbt                  intensity correlations with a thermal second input
splitter-validation  write/read cross-correlations through the splitter
classical-hom        interference of phase-averaged coherent inputs
fit-forms            heuristic cross-correlation envelopes versus amplitude
blazed               first-order transfer of a blazed ramp
rates                multiplexed l-photon source rates
stark-sweep          analytic ac Stark shifts versus detuning
phasematch-map       read-out phase matching profile and efficiency map
repeater             ENG / ENC / purification Monte Carlo
"""
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from components import atomphys, correlations, grating, multiplex, networks
from utils import config as cfg
from utils.errors import NumericalError
from utils.export import write_csv, write_gnuplot_hints, write_json, write_manifest
from utils.parser import Limit, ScenarioConfig, ScenarioConfigParser

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Scenario:
    description: str
    defaults: Mapping[str, object]


_SWEEP = {'delta_kx_max_rad_per_mm': 40.0, 'points': 41}

SCENARIOS: Dict[str, Scenario] = {
    'diffraction-orders': Scenario('Diffraction-order powers of a sine grating versus RMS', {
        'rms_max_rad': 2.5, 'points': 51, 'n_max': cfg.N_MAX, 'fourier_samples': cfg.FOURIER_SAMPLES,
    }),
    'steered-diffraction': Scenario('Two-tone grating steering versus relative phase', {
        'tone_ratio': cfg.TWO_TONE_RATIO, 'total_rms_rad': 1.0, 'points': 37, 'n_max': cfg.N_MAX,
        'k_g_rad_per_mm': cfg.GRATING_K_RAD_PER_MM,
    }),
    'coincidence-map': Scenario('Write/read camera coincidence map', {
        'grid_nx': cfg.CAMERA_NX, 'grid_ny': cfg.CAMERA_NY, 'pitch_rad_per_mm': cfg.CAMERA_PITCH_RAD_PER_MM,
        'k_g_rad_per_mm': cfg.GRATING_K_RAD_PER_MM, 'shots': cfg.CAMERA_SHOTS, 'p_pair': cfg.CAMERA_P_PAIR,
        'eta': cfg.CAMERA_ETA, 'p_dark': cfg.CAMERA_P_DARK, 'modulated': True,
    }),
    'hom-dip': Scenario('Two-excitation interference dip', {
        'p_pair': cfg.P_PAIR, 'dark_ratio': cfg.DARK_RATIO, 'sigma_rad_per_mm': cfg.SIGMA_RAD_PER_MM,
        'theta_rad': 0.0, 'backend': 'wick', **_SWEEP,
    }),
    'hbt': Scenario('Heralded intensity correlations with a thermal input', {
        'p_pair': cfg.P_PAIR, 'dark_ratio': cfg.DARK_RATIO, 'sigma_rad_per_mm': cfg.SIGMA_RAD_PER_MM,
        'thermal_nbar': cfg.THERMAL_NBAR, 'background_nbar': cfg.THERMAL_NBAR, 'backend': 'fock',
        'cutoff': cfg.FOCK_CUTOFF, 'delta_kx_max_rad_per_mm': 40.0, 'points': 21,
    }),
    'splitter-validation': Scenario('Write/read cross-correlations through the splitter', {
        'p_pair': cfg.P_PAIR, 'dark_ratio': cfg.DARK_RATIO, 'sigma_rad_per_mm': cfg.SIGMA_RAD_PER_MM,
        'misalignment_slope': cfg.MISALIGNMENT_SLOPE, **_SWEEP,
    }),
    'classical-hom': Scenario('Interference of phase-averaged coherent inputs', {
        'nbar': cfg.COHERENT_NBAR, 'sigma_rad_per_mm': cfg.SIGMA_CLASSICAL_RAD_PER_MM, 'phase_samples': 0,
        'delta_kx_max_rad_per_mm': 30.0, 'points': 41,
    }),
    'fit-forms': Scenario('Cross-correlation fit envelopes', {
        'alpha': cfg.FIT_ALPHA, 'gamma_per_rad': cfg.FIT_GAMMA_PER_RAD, 'chi_max_rad': 3.0, 'points': 61,
    }),
    'blazed': Scenario('Blazed-ramp first-order transfer', {
        'depth_max_rad': 4 * math.pi, 'points': 49, 'noise_fraction': cfg.BLAZED_INTENSITY_NOISE,
        'k_g_rad_per_mm': cfg.GRATING_K_RAD_PER_MM, 'n_max': cfg.N_MAX,
    }),
    'rates': Scenario('Multiplexed l-photon rates', {
        'p_pair': cfg.RATE_P, 'modes': cfg.RATE_MODES, 'eta_w': cfg.RATE_ETA_W, 'eta_r_a': cfg.RATE_ETA_R_A,
        'eta_r_b': cfg.RATE_ETA_R_B, 'rep_rate_hz': cfg.RATE_REP_HZ, 'l_max': cfg.RATE_L_MAX,
    }),
    'stark-sweep': Scenario('Analytic ac Stark shifts versus detuning', {
        'intensity_mw_per_cm2': cfg.STARK_INTENSITY_MW_PER_CM2, 'time_s': cfg.STARK_TIME_S,
        'detuning_min_ghz': 0.5, 'detuning_max_ghz': 5.0, 'points': 451,
        'field_convention': cfg.FIELD_CONVENTION, 'atom_number': cfg.ATOM_NUMBER,
        'gamma_noise_hz': cfg.GAMMA_NOISE_HZ, 'gamma_scatter_hz': cfg.GAMMA_SCATTER_HZ,
    }),
    'phasematch-map': Scenario('Read-out phase matching', {
        'sigma_z_mm': cfg.SIGMA_Z_MM, 'sigma_perp_mm': cfg.SIGMA_PERP_MM, 'k_read_rad_per_mm': cfg.K_READ_RAD_PER_MM,
        'wavelength_nm': cfg.WAVELENGTH_NM, 'k_g_rad_per_mm': cfg.GRATING_K_RAD_PER_MM,
        'sigma_rad_per_mm': cfg.SIGMA_RAD_PER_MM, 'rms_rad': 1.0, 'k_max_rad_per_mm': 300.0, 'points': 121,
    }),
    'repeater': Scenario('Repeater ENG/ENC/purification Monte Carlo', {
        'l0_km': cfg.REPEATER_L0_KM, 'l_att_km': cfg.REPEATER_L_ATT_KM, 'eta_cam': cfg.REPEATER_ETA_CAM,
        'modes': cfg.REPEATER_MODES, 'p_pair': cfg.REPEATER_P, 'eta_r': 1.0, 'trials': cfg.REPEATER_TRIALS,
        'block_trials': cfg.MC_BLOCK_TRIALS, 'workers': cfg.MC_WORKERS, 'phi_rad': 0.0,
    }),
}

_PROBABILITY = Limit(0.0, 1.0, high_open=True)
_EFFICIENCY = Limit(0.0, 1.0, low_open=True)
_NON_NEGATIVE = Limit(0.0)
_POSITIVE = Limit(0.0, low_open=True)
_COUNT = Limit(1)

# shared by every scenario; 'points' is left to the sweep self-check
LIMITS = {
    'p_pair': _PROBABILITY,
    'eta': _EFFICIENCY, 'eta_w': _EFFICIENCY, 'eta_r': _EFFICIENCY, 'eta_r_a': _EFFICIENCY,
    'eta_r_b': _EFFICIENCY, 'eta_cam': _EFFICIENCY,
    'p_dark': _NON_NEGATIVE, 'dark_ratio': _NON_NEGATIVE, 'thermal_nbar': _NON_NEGATIVE,
    'background_nbar': _NON_NEGATIVE, 'nbar': _NON_NEGATIVE, 'noise_fraction': _NON_NEGATIVE,
    'alpha': _NON_NEGATIVE, 'gamma_per_rad': _NON_NEGATIVE, 'misalignment_slope': _NON_NEGATIVE,
    'gamma_noise_hz': _NON_NEGATIVE, 'gamma_scatter_hz': _NON_NEGATIVE, 'phase_samples': _NON_NEGATIVE,
    'intensity_mw_per_cm2': _NON_NEGATIVE, 'time_s': _NON_NEGATIVE, 'l0_km': _NON_NEGATIVE,
    'rms_max_rad': _NON_NEGATIVE, 'total_rms_rad': _NON_NEGATIVE, 'rms_rad': _NON_NEGATIVE,
    'chi_max_rad': _NON_NEGATIVE, 'depth_max_rad': _NON_NEGATIVE, 'k_max_rad_per_mm': _NON_NEGATIVE,
    'delta_kx_max_rad_per_mm': _NON_NEGATIVE,
    'sigma_rad_per_mm': _POSITIVE, 'sigma_z_mm': _POSITIVE, 'sigma_perp_mm': _POSITIVE,
    'k_g_rad_per_mm': _POSITIVE, 'pitch_rad_per_mm': _POSITIVE, 'k_read_rad_per_mm': _POSITIVE,
    'wavelength_nm': _POSITIVE, 'tone_ratio': _POSITIVE, 'rep_rate_hz': _POSITIVE, 'l_att_km': _POSITIVE,
    'atom_number': _COUNT, 'modes': _COUNT, 'l_max': _COUNT, 'trials': _COUNT, 'block_trials': _COUNT,
    'workers': _COUNT, 'shots': _COUNT, 'n_max': _COUNT, 'cutoff': _COUNT, 'grid_nx': _COUNT,
    'grid_ny': _COUNT, 'fourier_samples': Limit(16),
    'backend': Limit(choices=('wick', 'fock')),
    'field_convention': Limit(choices=('rms', 'peak')),
}


def config_parser() -> ScenarioConfigParser:
    return ScenarioConfigParser({name: s.defaults for name, s in SCENARIOS.items()}, LIMITS)


def _sweep(maximum: float, points: int, minimum: float = 0.0) -> np.ndarray:
    if points < 2:
        raise NumericalError(f"a sweep needs at least 2 points, got {points}")
    return np.linspace(minimum, maximum, points)



def _spread(a: correlations.G2Result, b: correlations.G2Result) -> float:
    """Height difference of two peaks in combined standard errors; NaN without counts."""
    scale = math.hypot(a.sigma, b.sigma)
    return abs(a.value - b.value) / scale if scale > 0 else float('nan')

@dataclass
class RunResult:
    scenario: str
    out_dir: str
    artifacts: List[str] = field(default_factory=list)
    manifest: str = ''
    summary: Dict[str, object] = field(default_factory=dict)


class ScenarioRunner:
    """
    Runs one scenario and writes its artifacts.

    Each scenario method fills the summary and calls _table() for every CSV it
    produces; run() then writes the manifest over all artifacts.
    """

    def __init__(self, config: ScenarioConfig, gnuplot_hints: bool = False):
        """
        Args:
            config: Resolved scenario configuration
            gnuplot_hints: Also write a plotting hint file next to every table
        """
        self.config = config
        self.gnuplot_hints = gnuplot_hints
        self.artifacts: List[str] = []
        self.summary: Dict[str, object] = {}

    @property
    def handlers(self) -> Dict[str, Callable[[], None]]:
        return {
            'diffraction-orders': self.diffraction_orders,
            'steered-diffraction': self.steered_diffraction,
            'coincidence-map': self.coincidence_map,
            'hom-dip': self.hom_dip,
            'hbt': self.hbt,
            'splitter-validation': self.splitter_validation,
            'classical-hom': self.classical_hom,
            'fit-forms': self.fit_forms,
            'blazed': self.blazed,
            'rates': self.rates,
            'stark-sweep': self.stark_sweep,
            'phasematch-map': self.phasematch_map,
            'repeater': self.repeater,
        }

    def run(self) -> RunResult:
        """
        Execute the scenario.

        Returns:
            RunResult listing the artifacts and the manifest path
        """
        name = self.config.scenario
        logger.info("running scenario %s (seed %d)", name, self.config.seed)
        self.handlers[name]()
        manifest = os.path.join(self.config.out_dir, f'{name}.manifest.json')
        write_manifest(manifest, self.config.to_dict(), self.artifacts, self.summary)
        for path in self.artifacts + [manifest]:
            logger.info("wrote %s", path)
        return RunResult(name, self.config.out_dir, list(self.artifacts), manifest, dict(self.summary))

    def _path(self, suffix: str, ext: str) -> str:
        stem = self.config.scenario if not suffix else f'{self.config.scenario}_{suffix}'
        return os.path.join(self.config.out_dir, f'{stem}.{ext}')

    def _table(self, suffix: str, columns: Sequence[str], rows, x: int = 0, y: Sequence[int] = (1,)):
        path = write_csv(self._path(suffix, 'csv'), columns, rows)
        self.artifacts.append(path)
        if self.gnuplot_hints:
            hint = self._path(suffix, 'gnuplot.txt')
            write_gnuplot_hints(hint, SCENARIOS[self.config.scenario].description, columns, x, y)
            self.artifacts.append(hint)

    def _json(self, suffix: str, payload):
        self.artifacts.append(write_json(self._path(suffix, 'json'), payload))

    # ------------------------------------------------------------------ grating

    def diffraction_orders(self):
        c = self.config
        n_max = c['n_max']
        rows = []
        worst = 0.0
        for rms_value in _sweep(c['rms_max_rad'], c['points']):
            pattern = grating.SinePattern(rms_value * math.sqrt(2), 0.0, cfg.GRATING_K_RAD_PER_MM)
            exact = grating.decompose(pattern, n_max)
            numeric = grating.fourier_coefficients(pattern, n_max, c['fourier_samples'])
            worst = max(worst, max(abs(exact.amplitude(m) - numeric.amplitude(m)) for m in range(-n_max, n_max + 1)))
            rows.append((rms_value, pattern.chi, exact.power(0), exact.power(1), exact.power(2),
                         numeric.power(0), numeric.power(1), numeric.power(2)))
        if worst > 1e-10:
            raise NumericalError(f"Jacobi-Anger and Fourier coefficients differ by {worst:.3e}")
        chi_star = grating.balanced_chi()
        self._table('', ['rms_rad', 'chi_rad', 'c0_sq', 'c1_sq', 'c2_sq', 'c0_sq_fourier', 'c1_sq_fourier',
                         'c2_sq_fourier'], rows, y=(2, 3, 4))
        self.summary.update(balanced_chi_rad=chi_star, balanced_rms_rad=chi_star / math.sqrt(2),
                            max_fourier_deviation=worst)

    def steered_diffraction(self):
        c = self.config
        orders = range(-3, 4)
        rows = []
        for delta in _sweep(math.pi, c['points'], -math.pi):
            pattern = grating.design_asymmetric(c['tone_ratio'], delta, c['total_rms_rad'], c['k_g_rad_per_mm'])
            spectrum = grating.decompose(pattern, c['n_max'])
            summary = grating.steer(pattern, c['n_max'])
            rows.append((delta, *[spectrum.power(m) for m in orders], summary.positive, summary.negative))
        columns = ['delta_theta_rad'] + [f'p_m{m:+d}' for m in orders] + ['power_positive', 'power_negative']
        self._table('', columns, rows, y=(len(columns) - 2, len(columns) - 1))
        for label, delta in (('aligned', 0.0), ('reversed', math.pi)):
            s = grating.steer(grating.design_asymmetric(c['tone_ratio'], delta, c['total_rms_rad'],
                                                        c['k_g_rad_per_mm']), c['n_max'])
            self.summary[f'{label}_contrast'] = s.contrast
            self.summary[f'{label}_zero_order'] = s.zero

    def coincidence_map(self):
        c = self.config
        k_g = c['k_g_rad_per_mm']
        grid = correlations.CameraGrid(c['grid_nx'], c['grid_ny'], c['pitch_rad_per_mm'])
        if c['modulated']:
            spectrum = grating.decompose(grating.SinePattern(grating.balanced_chi(), 0.0, k_g))
        else:
            spectrum = grating.DiffractionSpectrum({0: 1 + 0j}, 0)
        counting = correlations.CountingModel(c['eta'], c['p_dark'])
        result = correlations.coincidence_map(grid, spectrum, k_g, c['p_pair'], counting, c['shots'],
                                              self.config.seed)
        self._table('', ['sum_kx_rad_per_mm', 'sum_ky_rad_per_mm', 'g2', 'g2_sigma'], result.to_rows(),
                    x=1, y=(2,))
        peaks = []
        for label, ky in (('minus', -k_g), ('zero', 0.0), ('plus', k_g)):
            peak = result.at(0.0, ky)
            peaks.append(peak)
            self.summary[f'g2_{label}'] = peak.value
            self.summary[f'g2_{label}_sigma'] = peak.sigma
        spreads = [_spread(a, b) for a, b in ((peaks[0], peaks[1]), (peaks[1], peaks[2]), (peaks[0], peaks[2]))]
        self.summary['peak_spread_sigma'] = max((s for s in spreads if not math.isnan(s)), default=float('nan'))

    # ------------------------------------------------------------ correlations

    def hom_dip(self):
        c = self.config
        counting = correlations.CountingModel.from_ratio(c['dark_ratio'])
        rows = []
        worst = 0.0
        for dk in _sweep(c['delta_kx_max_rad_per_mm'], c['points']):
            tau = networks.tau_from_shift(dk, c['sigma_rad_per_mm'])
            network = networks.hom_network(c['p_pair'], tau, c['theta_rad'])
            closed = correlations.g2_hom_closed(c['p_pair'], tau, c['dark_ratio'])
            cross = correlations.g2_from_moments(network, counting, ('wa', 'wb'), ('rc', 'rd'), c['backend'])
            auto = correlations.g2_auto(network, counting, ('wa', 'wb'), 'rc', c['backend'])
            worst = max(worst, abs(cross.value - closed.value) / closed.value)
            rows.append((dk, tau, closed.value, cross.value, auto.value, correlations.visibility(closed).value))
        if worst > 1e-6:
            raise NumericalError(f"closed form and network moments differ by {worst:.3e} (relative)")
        self._table('', ['delta_kx_rad_per_mm', 'tau', 'g2_rc_rd_closed', 'g2_rc_rd_network',
                         'g2_rc_rc_network', 'visibility'], rows, y=(2, 4))
        dip = correlations.g2_hom_closed(c['p_pair'], 1.0, c['dark_ratio'])
        self.summary.update(g2_dip=dip.value, visibility=correlations.visibility(dip).value,
                            max_relative_deviation=worst)

    def hbt(self):
        c = self.config
        counting = correlations.CountingModel.from_ratio(c['dark_ratio'])

        def evaluate(tau: float):
            network = networks.hbt_network(c['p_pair'], tau, c['thermal_nbar'], c['background_nbar'])
            args = dict(backend=c['backend'], cutoff=c['cutoff'])
            return (correlations.g2_from_moments(network, counting, ('wa',), ('rc', 'rd'), **args).value,
                    correlations.g2_auto(network, counting, ('wa',), 'rc', **args).value,
                    correlations.g2_auto(network, counting, ('wa',), 'rd', **args).value)

        rows = []
        for dk in _sweep(c['delta_kx_max_rad_per_mm'], c['points']):
            tau = networks.tau_from_shift(dk, c['sigma_rad_per_mm'])
            rows.append((dk, tau, *evaluate(tau)))
        self._table('', ['delta_kx_rad_per_mm', 'tau', 'g2_rc_rd_wa', 'g2_rc_rc_wa', 'g2_rd_rd_wa'], rows,
                    y=(2, 3, 4))
        cross, _, _ = evaluate(1.0)
        _, auto_rc, auto_rd = evaluate(0.0)
        self.summary.update(g2_rc_rd_wa=cross, decoupled_g2_rc_rc_wa=auto_rc, decoupled_g2_rd_rd_wa=auto_rd)

    def splitter_validation(self):
        c = self.config
        counting = correlations.CountingModel.from_ratio(c['dark_ratio'])
        rows = []
        for dk in _sweep(c['delta_kx_max_rad_per_mm'], c['points']):
            tau = networks.tau_from_shift(dk, c['sigma_rad_per_mm'])
            network = networks.hom_network(c['p_pair'], tau)
            coupling = correlations.misalignment_coupling(dk, c['sigma_rad_per_mm'], c['misalignment_slope'])
            g_rc = correlations.g2_cross(network, counting, 'wa', 'rc', coupling)
            g_rd = correlations.g2_cross(network, counting, 'wa', 'rd')
            rows.append((dk, tau, g_rc.value, g_rd.value, coupling))
        self._table('', ['delta_kx_rad_per_mm', 'tau', 'g2_wa_rc', 'g2_wa_rd', 'coupling'], rows, y=(2, 3))
        self.summary.update(g2_wa_rc=rows[0][2], g2_wa_rd=rows[0][3])

    def classical_hom(self):
        c = self.config
        samples = c['phase_samples'] or None
        rows = []
        for dk in _sweep(c['delta_kx_max_rad_per_mm'], c['points']):
            tau = networks.tau_from_shift(dk, c['sigma_rad_per_mm'])
            g2 = correlations.classical_hom(tau, c['nbar'], phase_samples=samples, seed=self.config.seed)
            rows.append((dk, tau, g2.value))
        self._table('', ['delta_kx_rad_per_mm', 'tau', 'g2_rc_rd'], rows, y=(2,))
        self.summary.update(g2_rc_rd=rows[0][2], measured_reference=cfg.CLASSICAL_HOM_MEASURED,
                            note='the measured value includes noise that the model does not contain')

    def fit_forms(self):
        c = self.config
        form = correlations.FitForm(c['alpha'], c['gamma_per_rad'])
        rows = []
        for chi in _sweep(c['chi_max_rad'], c['points']):
            g_rc, g_rd = correlations.g2_fit_forms(form, chi)
            rows.append((chi, chi / math.sqrt(2), g_rc, g_rd))
        self._table('', ['chi_rad', 'rms_rad', 'g2_wa_rc', 'g2_wa_rd'], rows, y=(2, 3))
        crossing = brentq(lambda x: np.subtract(*correlations.g2_fit_forms(form, x)), 1.0, 2.0, xtol=1e-14)
        self.summary.update(g2_wa_rc_at_zero=correlations.g2_fit_forms(form, 0.0)[0], crossing_chi_rad=crossing)

    def blazed(self):
        c = self.config
        rows = []
        for depth in _sweep(c['depth_max_rad'], c['points']):
            result = grating.blazed_efficiency(c['k_g_rad_per_mm'], depth, c['noise_fraction'], c['n_max'])
            s = result.spectrum
            rows.append((depth, result.ideal, result.noisy, s.power(0), s.power(-1), s.power(2)))
        self._table('', ['depth_rad', 'c1_sq_ideal', 'c1_sq_noisy', 'c0_sq', 'c_minus1_sq', 'c2_sq'], rows,
                    y=(1, 2, 3))
        nominal = grating.blazed_efficiency(c['k_g_rad_per_mm'], 2 * math.pi, c['noise_fraction'], c['n_max'])
        self.summary.update(ideal_at_two_pi=nominal.ideal, noisy_at_two_pi=nominal.noisy,
                            measured_reference=cfg.BLAZED_MEASURED_EFFICIENCY)

    # ---------------------------------------------------------------- multiplex

    def rates(self):
        c = self.config
        for label in ('a', 'b'):
            source = multiplex.SourceParams(c['p_pair'], c['eta_w'], c[f'eta_r_{label}'], c['modes'],
                                            c['rep_rate_hz'])
            rows = []
            for plain, switched in zip(multiplex.rate_table(source, c['l_max']),
                                       multiplex.rate_table(source, c['l_max'], splitter_switch=True)):
                guideline = multiplex.mode_guideline(plain.l, c['p_pair'], c['eta_w'])
                rows.append((*plain.to_row(), switched.r_qm, guideline))
            self._table(label, ['l', 'p_us', 'p_qm', 'r_us_hz', 'r_qm_hz', 'ratio', 'r_qm_switch_hz',
                                'mode_guideline'], rows, y=(3, 4, 6))
            self.summary[f'ratio_l3_{label}'] = rows[2][5] if len(rows) >= 3 else None

    def stark_sweep(self):
        c = self.config
        base = atomphys.StarkParams(cfg.STARK_DETUNING_RAD_PER_S, c['intensity_mw_per_cm2'], c['time_s'],
                                    field_convention=c['field_convention'])
        deltas = atomphys.hz_to_rad_per_s(1e9 * _sweep(c['detuning_max_ghz'], c['points'], c['detuning_min_ghz']))
        rows = []
        for delta, g, h, diff in atomphys.stark_sweep(deltas, base):
            rows.append((atomphys.rad_per_s_to_hz(delta) / 1e9, atomphys.rad_per_s_to_hz(g) / 1e3,
                         atomphys.rad_per_s_to_hz(h) / 1e3, atomphys.rad_per_s_to_hz(diff) / 1e3, diff * base.time))
        self._table('', ['detuning_ghz', 'shift_g_khz', 'shift_h_khz', 'delta_s_khz', 'phase_rad'], rows, y=(3,))
        noise = atomphys.noise_mode_estimate(atomphys.EnsembleGeometry(), c['atom_number'], c['gamma_noise_hz'],
                                             c['time_s'])
        self.summary.update(
            delta_s_khz=atomphys.rad_per_s_to_hz(atomphys.differential_shift(base)) / 1e3,
            phase_rad=atomphys.stark_phase(base),
            rabi_rad_per_s=atomphys.rabi_frequency(base),
            poles_ghz=[atomphys.rad_per_s_to_hz(p) / 1e9 for p in atomphys.pole_detunings(base)],
            noise_modes=noise.modes,
            noise_probability_per_mode=noise.probability_per_mode,
            scattered_per_atom=c['gamma_scatter_hz'] * c['time_s'],
            reference_rabi_mhz=list(cfg.REFERENCE_RABI_MHZ),
        )

    def phasematch_map(self):
        c = self.config
        geometry = atomphys.EnsembleGeometry(c['sigma_z_mm'], c['sigma_perp_mm'], c['k_read_rad_per_mm'],
                                             c['wavelength_nm'])
        ks = _sweep(c['k_max_rad_per_mm'], c['points'], -c['k_max_rad_per_mm'])
        rows = []
        worst = 0.0
        for k in ks:
            closed = atomphys.phasematch_efficiency(k, geometry)
            numeric = atomphys.phasematch_quadrature(k, geometry)
            paraxial = math.exp(-(atomphys.paraxial_mismatch(k, geometry.k_r) * geometry.sigma_z) ** 2 / 2)
            worst = max(worst, abs(closed - numeric))
            rows.append((k, closed, numeric, paraxial))
        if worst > 1e-8:
            raise NumericalError(f"closed-form and quadrature phase matching differ by {worst:.3e}")
        self._table('profile', ['k_y_rad_per_mm', 'efficiency', 'efficiency_quadrature', 'efficiency_paraxial'],
                    rows, y=(1, 2))
        spectrum = grating.decompose(grating.SinePattern(c['rms_rad'] * math.sqrt(2), 0.0, c['k_g_rad_per_mm']))
        table = atomphys.efficiency_map(ks, ks, spectrum, c['k_g_rad_per_mm'], c['sigma_rad_per_mm'], geometry)
        map_rows = [(kw, kr, table[i, j]) for i, kr in enumerate(ks) for j, kw in enumerate(ks)]
        self._table('map', ['k_w_rad_per_mm', 'k_r_rad_per_mm', 'efficiency'], map_rows, y=(2,))
        self.summary.update(efficiency_at_phasematch_k=atomphys.phasematch_efficiency(cfg.PHASEMATCH_K_RAD_PER_MM,
                                                                                       geometry),
                            max_quadrature_deviation=worst)

    def repeater(self):
        c = self.config
        params = multiplex.RepeaterParams(c['l0_km'], c['l_att_km'], c['eta_cam'], c['modes'], c['p_pair'],
                                          c['eta_r'])
        report = multiplex.repeater_monte_carlo(params, c['trials'], self.config.seed, c['workers'],
                                                c['block_trials'], c['phi_rad'])
        stage_rows = []
        for i, name in enumerate(report.tally.names()):
            t = report.tally[name]
            stage_rows.append((i, t.attempts, t.successes, t.probability, t.sigma, t.expected))
        self._table('stages', ['stage_index', 'attempts', 'successes', 'probability', 'sigma', 'expected'],
                    stage_rows, y=(3,))
        pattern_rows = []
        for i, herald in enumerate((report.enc, report.purification)):
            for j, outcome in enumerate(herald.patterns):
                pattern_rows.append((i, j, outcome.probability, outcome.fidelity))
        self._table('patterns', ['stage_index', 'pattern_index', 'probability', 'fidelity'], pattern_rows,
                    x=1, y=(2, 3))
        self._json('report', report.to_dict())
        logger.info("\n%s", report.tally.report())
        self.summary.update(stages=list(report.tally.names()), enc_fidelity=report.enc.min_fidelity,
                            purification_fidelity=report.purification.min_fidelity,
                            p_at_least_two=report.p_at_least_two,
                            eng_probability=report.tally['eng'].probability)


def run_scenario(config: ScenarioConfig, gnuplot_hints: bool = False) -> RunResult:
    return ScenarioRunner(config, gnuplot_hints).run()
