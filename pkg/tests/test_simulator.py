"""
End-to-end tests of the scenario runner on reduced sweeps.
"""
import json
import os

import pytest

from simulator import SCENARIOS, ScenarioRunner, config_parser, run_scenario
from utils.errors import NumericalError
from utils.export import sha256_file

# overrides that keep every scenario small enough for the test suite
FAST = {
    'diffraction-orders': ['points=5', 'fourier_samples=1024'],
    'steered-diffraction': ['points=5'],
    'coincidence-map': ['grid_ny=13', 'shots=2000'],
    'hom-dip': ['points=5'],
    'hbt': ['points=3', 'cutoff=6'],
    'splitter-validation': ['points=5'],
    'classical-hom': ['points=5'],
    'fit-forms': ['points=7'],
    'blazed': ['points=5'],
    'rates': ['l_max=5'],
    'stark-sweep': ['points=10'],
    'phasematch-map': ['points=21'],
    'repeater': ['trials=2000', 'block_trials=500', 'workers=2'],
}


def run(name, out_dir, extra=(), seed=None, gnuplot_hints=False):
    config = config_parser().parse(name, overrides=FAST[name] + list(extra), out_dir=out_dir, seed=seed)
    return run_scenario(config, gnuplot_hints)


def test_every_scenario_is_covered():
    assert set(FAST) == set(SCENARIOS)
    assert set(FAST) == set(ScenarioRunner(config_parser().parse('rates')).handlers)


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_scenario_writes_checksummed_artifacts(name, out_dir):
    result = run(name, out_dir)
    assert result.artifacts
    manifest = json.load(open(result.manifest))
    assert manifest['config']['scenario'] == name
    for path in result.artifacts:
        assert os.path.exists(path)
        assert manifest['artifacts'][os.path.basename(path)] == sha256_file(path)
    assert set(manifest['summary']) == set(result.summary)


@pytest.mark.parametrize("name", ['hom-dip', 'coincidence-map', 'repeater'])
def test_reruns_are_byte_identical(name, tmp_path):
    first = run(name, str(tmp_path / 'a'))
    second = run(name, str(tmp_path / 'b'))
    for a, b in zip(first.artifacts + [first.manifest], second.artifacts + [second.manifest]):
        assert os.path.basename(a) == os.path.basename(b)
        assert open(a, 'rb').read() == open(b, 'rb').read()


def test_seed_changes_monte_carlo(tmp_path):
    a = run('coincidence-map', str(tmp_path / 'a'), seed=1)
    b = run('coincidence-map', str(tmp_path / 'b'), seed=2)
    assert open(a.artifacts[0], 'rb').read() != open(b.artifacts[0], 'rb').read()


class TestSummaries:

    def test_hom_dip(self, out_dir):
        summary = run('hom-dip', out_dir).summary
        assert summary['g2_dip'] == pytest.approx(0.172388, abs=1e-5)
        assert summary['visibility'] > 0.5
        assert summary['max_relative_deviation'] < 1e-6

    def test_hom_dip_on_the_oracle(self, out_dir):
        summary = run('hom-dip', out_dir, ['backend=fock', 'points=3']).summary
        assert summary['max_relative_deviation'] < 1e-6

    def test_fit_forms(self, out_dir):
        summary = run('fit-forms', out_dir).summary
        assert summary['g2_wa_rc_at_zero'] == pytest.approx(24.1)
        assert 1.0 < summary['crossing_chi_rad'] < 2.0

    def test_coincidence_peaks(self, out_dir):
        summary = run('coincidence-map', out_dir, ['shots=20000']).summary
        for label in ('minus', 'zero', 'plus'):
            assert summary[f'g2_{label}'] > 5
            assert summary[f'g2_{label}_sigma'] > 0
        assert summary['peak_spread_sigma'] >= 0

    def test_unmodulated_coincidence_peak(self, out_dir):
        summary = run('coincidence-map', out_dir, ['shots=20000', 'modulated=false']).summary
        assert summary['g2_zero'] > 5
        assert summary['g2_plus'] < 2
        assert summary['g2_minus'] < 2

    def test_rates(self, out_dir):
        result = run('rates', out_dir)
        assert [os.path.basename(p) for p in result.artifacts] == ['rates_a.csv', 'rates_b.csv']
        assert result.summary['ratio_l3_a'] > 10

    def test_stark_sweep(self, out_dir):
        summary = run('stark-sweep', out_dir).summary
        assert summary['delta_s_khz'] == pytest.approx(-38.4, abs=0.1)
        assert summary['noise_modes'] == pytest.approx(7.165e8, rel=1e-3)

    def test_phasematch(self, out_dir):
        summary = run('phasematch-map', out_dir).summary
        assert summary['efficiency_at_phasematch_k'] == pytest.approx(0.8868, abs=5e-4)
        assert summary['max_quadrature_deviation'] < 1e-8

    def test_repeater(self, out_dir):
        result = run('repeater', out_dir)
        names = sorted(os.path.basename(p) for p in result.artifacts)
        assert names == ['repeater_patterns.csv', 'repeater_report.json', 'repeater_stages.csv']
        assert result.summary['enc_fidelity'] == pytest.approx(1.0, abs=1e-9)
        assert result.summary['stages'] == ['eng', 'enc', 'purification']

    def test_steering(self, out_dir):
        summary = run('steered-diffraction', out_dir).summary
        assert summary['aligned_contrast'] > 0
        assert summary['reversed_contrast'] == pytest.approx(-summary['aligned_contrast'], abs=1e-12)


def test_gnuplot_hints_are_written(out_dir):
    result = run('fit-forms', out_dir, gnuplot_hints=True)
    hints = [p for p in result.artifacts if p.endswith('.gnuplot.txt')]
    assert [os.path.basename(p) for p in hints] == ['fit-forms.gnuplot.txt']


def test_too_few_points(out_dir):
    with pytest.raises(NumericalError):
        run('fit-forms', out_dir, ['points=1'])
