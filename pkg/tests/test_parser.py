"""
Unit tests for the scenario configuration parser.
"""
import json
import os

import pytest

from simulator import config_parser
from utils.config import DEFAULT_SEED
from utils.errors import ConfigError
from utils.parser import Limit, ScenarioConfigParser

DEFAULTS = {
    'hom-dip': {'p_pair': 0.05, 'points': 41, 'backend': 'wick', 'modulated': True},
    'rates': {'modes': 4000},
}


@pytest.fixture
def parser():
    return ScenarioConfigParser(DEFAULTS)


@pytest.fixture
def config_file(tmp_path):
    def write(data):
        path = tmp_path / 'scenario.json'
        path.write_text(json.dumps(data))
        return str(path)
    return write


class TestResolution:

    def test_defaults(self, parser):
        config = parser.parse('hom-dip')
        assert config.params == DEFAULTS['hom-dip']
        assert config.seed == DEFAULT_SEED
        assert config.sources == {}

    def test_file_then_overrides(self, parser, config_file):
        path = config_file({'p_pair': 0.02, 'points': 11, 'seed': 5})
        config = parser.parse('hom-dip', path, ['points=21', 'backend=fock'])
        assert config['p_pair'] == 0.02
        assert config['points'] == 21
        assert config['backend'] == 'fock'
        assert config.seed == 5
        assert config.sources == {'p_pair': 'file', 'points': 'set', 'backend': 'set'}

    def test_command_line_seed_wins(self, parser, config_file):
        path = config_file({'seed': 5})
        assert parser.parse('hom-dip', path, ['seed=6'], seed=7).seed == 7
        assert parser.parse('hom-dip', path, ['seed=6']).seed == 6

    def test_to_dict_is_sorted(self, parser):
        data = parser.parse('hom-dip', overrides=['points=5']).to_dict()
        assert list(data['params']) == sorted(DEFAULTS['hom-dip'])
        assert data['overridden'] == {'points': 'set'}


class TestCoercion:

    @pytest.mark.parametrize("raw, expected", [('true', True), ('Off', False), ('1', True), (False, False)])
    def test_booleans(self, raw, expected):
        assert ScenarioConfigParser.coerce('modulated', raw, True) is expected

    @pytest.mark.parametrize("raw, expected", [('12', 12), ('1e3', 1000), (7, 7), (3.0, 3)])
    def test_integers(self, raw, expected):
        value = ScenarioConfigParser.coerce('points', raw, 41)
        assert value == expected
        assert isinstance(value, int)

    def test_floats(self):
        assert ScenarioConfigParser.coerce('p_pair', '5e-2', 0.1) == 0.05
        assert ScenarioConfigParser.coerce('p_pair', 1, 0.1) == 1.0

    @pytest.mark.parametrize("raw, default", [('2.5', 41), ('maybe', True), (True, 0.1), (True, 41),
                                              ([1], 'wick'), ('abc', 0.1)])
    def test_rejected_values(self, raw, default):
        with pytest.raises(ConfigError):
            ScenarioConfigParser.coerce('key', raw, default)


SAMPLE_DIR = os.path.join(os.path.dirname(__file__), 'sample_configs')


@pytest.mark.parametrize("filename", sorted(os.listdir(SAMPLE_DIR)))
def test_sample_configs_resolve(filename):
    path = os.path.join(SAMPLE_DIR, filename)
    data = ScenarioConfigParser.parse_file(path)
    config = config_parser().parse(filename.rsplit('_', 1)[0], path)
    assert set(config.sources) == set(data) - {'seed'}
    assert config.seed == data.get('seed', DEFAULT_SEED)


class TestErrors:

    def test_unknown_scenario(self, parser):
        with pytest.raises(ConfigError, match='unknown scenario'):
            parser.parse('nope')

    def test_unknown_key(self, parser):
        with pytest.raises(ConfigError, match='unknown parameter'):
            parser.parse('rates', overrides=['p_pair=0.1'])

    def test_malformed_override(self, parser):
        with pytest.raises(ConfigError):
            parser.parse('rates', overrides=['modes'])
        with pytest.raises(ConfigError):
            parser.parse('rates', overrides=['=4'])

    def test_negative_seed(self, parser):
        with pytest.raises(ConfigError):
            parser.parse('rates', seed=-1)

    def test_missing_file(self, parser, tmp_path):
        with pytest.raises(ConfigError):
            parser.parse('rates', str(tmp_path / 'missing.json'))

    def test_file_must_hold_object(self, parser, config_file):
        with pytest.raises(ConfigError):
            parser.parse('rates', config_file([1, 2]))

    def test_invalid_json(self, parser, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"modes": ')
        with pytest.raises(ConfigError):
            parser.parse('rates', str(path))

    def test_missing_parameter_lookup(self, parser):
        with pytest.raises(ConfigError):
            parser.parse('rates')['p_pair']


class TestLimits:

    @pytest.mark.parametrize("limit, value", [
        (Limit(0.0, 1.0, high_open=True), 0.0),
        (Limit(0.0, 1.0, high_open=True), 0.999),
        (Limit(0.0, 1.0, low_open=True), 1.0),
        (Limit(1), 1),
        (Limit(choices=('rms', 'peak')), 'peak'),
    ])
    def test_accepted(self, limit, value):
        limit.check('key', value)

    @pytest.mark.parametrize("limit, value", [
        (Limit(0.0, 1.0, high_open=True), 1.0),
        (Limit(0.0, 1.0, high_open=True), -0.1),
        (Limit(0.0, 1.0, low_open=True), 0.0),
        (Limit(1), 0),
        (Limit(0.0), float('nan')),
        (Limit(choices=('rms', 'peak')), 'amplitude'),
    ])
    def test_rejected(self, limit, value):
        with pytest.raises(ConfigError, match="parameter 'key'"):
            limit.check('key', value)

    def test_describe(self):
        assert Limit(0.0, 1.0, high_open=True).describe() == '[0, 1)'
        assert Limit(0.0, low_open=True).describe() == '(0, inf)'

    def test_checked_after_every_source(self, config_file):
        parser = ScenarioConfigParser(DEFAULTS, {'p_pair': Limit(0.0, 1.0, high_open=True)})
        with pytest.raises(ConfigError, match=r'\[0, 1\)'):
            parser.parse('hom-dip', overrides=['p_pair=1.5'])
        with pytest.raises(ConfigError):
            parser.parse('hom-dip', config_file({'p_pair': -0.2}))
        assert parser.parse('hom-dip', config_file({'p_pair': 1.5}), ['p_pair=0.2'])['p_pair'] == 0.2

    @pytest.mark.parametrize("scenario, setting", [
        ('rates', 'p_pair=1.5'),
        ('rates', 'eta_w=0'),
        ('repeater', 'workers=0'),
        ('hom-dip', 'sigma_rad_per_mm=-1'),
        ('hom-dip', 'backend=exact'),
        ('stark-sweep', 'field_convention=amplitude'),
        ('diffraction-orders', 'fourier_samples=8'),
    ])
    def test_scenario_limits(self, scenario, setting):
        with pytest.raises(ConfigError):
            config_parser().parse(scenario, overrides=[setting])

    def test_scenario_defaults_are_within_limits(self):
        parser = config_parser()
        for scenario in parser.scenarios():
            parser.parse(scenario)
