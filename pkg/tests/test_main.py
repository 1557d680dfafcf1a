"""
Tests of the command-line entry point.
"""
import json
import os

import pytest

import main
from simulator import SCENARIOS


def test_list(capsys):
    assert main.main(['--list']) == main.EXIT_OK
    out = capsys.readouterr().out
    for name in SCENARIOS:
        assert name in out


def test_run_writes_manifest(out_dir):
    code = main.main(['fit-forms', '--out', out_dir, '--set', 'points=5', '--quiet'])
    assert code == main.EXIT_OK
    manifest = json.load(open(os.path.join(out_dir, 'fit-forms.manifest.json')))
    assert manifest['config']['params']['points'] == 5
    assert manifest['config']['overridden'] == {'points': 'set'}


def test_config_file_and_seed(out_dir, tmp_path):
    path = tmp_path / 'map.json'
    path.write_text(json.dumps({'grid_ny': 13, 'shots': 500}))
    code = main.main(['coincidence-map', '--config', str(path), '--seed', '4', '--out', out_dir, '--quiet'])
    assert code == main.EXIT_OK
    manifest = json.load(open(os.path.join(out_dir, 'coincidence-map.manifest.json')))
    assert manifest['config']['seed'] == 4


@pytest.mark.parametrize("argv", [
    [],
    ['no-such-scenario'],
    ['rates', '--set', 'unknown=1'],
    ['rates', '--set', 'modes=many'],
])
def test_usage_errors(argv, out_dir):
    assert main.main(argv + ['--out', out_dir, '--quiet']) == main.EXIT_USAGE


def test_numerical_failure(out_dir):
    code = main.main(['fit-forms', '--set', 'points=1', '--out', out_dir, '--quiet'])
    assert code == main.EXIT_NUMERICAL


@pytest.mark.parametrize("setting", ['p_pair=1.5', 'eta_w=0', 'modes=0'])
def test_out_of_range_parameter_is_usage_error(setting, out_dir):
    code = main.main(['rates', '--set', setting, '--out', out_dir, '--quiet'])
    assert code == main.EXIT_USAGE
    assert not os.listdir(out_dir)


def test_verbose_and_quiet_are_exclusive():
    with pytest.raises(SystemExit):
        main.build_parser().parse_args(['rates', '--verbose', '--quiet'])
