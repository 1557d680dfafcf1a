"""Flask API for the spin-wave memory simulator.

Lists the scenarios with their defaults and runs one scenario per POST /api/run
into a temporary directory. Invalid parameters give HTTP 400 and simulation
failures give HTTP 500.
"""
import json
import logging
import os
import tempfile

from flask import Flask, jsonify, request
from flask_cors import CORS

from simulator import SCENARIOS, config_parser, run_scenario
from utils.errors import ConfigError, SpinWaveLabError

logger = logging.getLogger(__name__)

app = Flask(__name__)
CORS(app)

PREVIEW_ROWS = 20


def _overrides(raw):
    """Accept overrides as a {key: value} object or a list of 'key=value' strings."""
    if raw is None:
        return []
    if isinstance(raw, dict):
        return [f'{key}={value}' for key, value in raw.items()]
    if isinstance(raw, list) and all(isinstance(item, str) for item in raw):
        return raw
    raise ConfigError("overrides must be an object or a list of 'key=value' strings")


def _preview(path):
    with open(path, 'r') as f:
        lines = f.read().splitlines()
    return {'columns': lines[0].split(',') if lines else [],
            'rows': [line.split(',') for line in lines[1:PREVIEW_ROWS + 1]],
            'total_rows': max(len(lines) - 1, 0)}


@app.errorhandler(ConfigError)
def handle_config_error(e):
    return jsonify({'error': str(e)}), 400


@app.errorhandler(SpinWaveLabError)
def handle_simulation_error(e):
    logger.error("scenario failed: %s", e)
    return jsonify({'error': str(e)}), 500


@app.route('/api/health')
def health():
    return jsonify({'status': 'ok'})


@app.route('/api/scenarios')
def scenarios():
    return jsonify({name: s.description for name, s in SCENARIOS.items()})


@app.route('/api/scenarios/<name>/defaults')
def scenario_defaults(name):
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario '{name}'")
    return jsonify(dict(SCENARIOS[name].defaults))


@app.route('/api/run', methods=['POST'])
def run():
    body = request.get_json(silent=True)
    if not isinstance(body, dict) or 'scenario' not in body:
        raise ConfigError("request body must be a JSON object with a 'scenario' field")
    seed = body.get('seed')
    with tempfile.TemporaryDirectory() as out_dir:
        config = config_parser().parse(body['scenario'], overrides=_overrides(body.get('overrides')),
                                       out_dir=out_dir, seed=seed)
        try:
            result = run_scenario(config)
        except FloatingPointError as e:
            raise SpinWaveLabError(f"floating point failure: {e}") from e
        with open(result.manifest, 'r') as f:
            manifest = json.load(f)
        tables = {os.path.basename(path): _preview(path) for path in result.artifacts if path.endswith('.csv')}
    return jsonify({'scenario': result.scenario, 'manifest': manifest, 'tables': tables})


if __name__ == '__main__':
    app.run(debug=True)
