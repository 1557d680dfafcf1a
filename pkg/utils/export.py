"""Artifact writers for the spin-wave memory simulator.

Tables are written as CSV with a one-line header whose column names carry
units; each run also gets a JSON manifest (inputs, versions, seed and sha256
checksums of the tables). Nothing time-dependent is recorded, so identical
inputs give byte-identical files.
"""
import hashlib
import json
import logging
import os
from typing import Any, Dict, List, Mapping, Sequence

import numpy as np
import scipy

logger = logging.getLogger(__name__)

PACKAGE_VERSION = '0.1.0'   # keep in step with pyproject.toml
CSV_FORMAT = '%.10g'


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b''):
            h.update(chunk)
    return h.hexdigest()


def write_csv(path: str, columns: Sequence[str], rows) -> str:
    """
    Write a numeric table.

    Args:
        path: Output file
        columns: Column names with units, e.g. 'delta_kx_rad_per_mm'
        rows: Iterable of equal-length numeric rows (NaN allowed)

    Returns:
        The path written
    """
    data = np.asarray(list(rows), dtype=float)
    if data.size == 0:
        data = np.zeros((0, len(columns)))
    if data.ndim != 2 or data.shape[1] != len(columns):
        raise ValueError(f"table of shape {data.shape} does not match {len(columns)} columns")
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    np.savetxt(path, data, delimiter=',', header=','.join(columns), comments='', fmt=CSV_FORMAT)
    logger.debug("wrote %d rows to %s", len(data), path)
    return path


def versions() -> Dict[str, str]:
    return {'spinwave-lab': PACKAGE_VERSION, 'numpy': np.__version__, 'scipy': scipy.__version__}


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None if np.isnan(value) else ('inf' if value > 0 else '-inf')
    return value


def dumps(payload: Mapping[str, Any]) -> str:
    return json.dumps(_jsonable(dict(payload)), indent=2, sort_keys=True) + '\n'


def write_json(path: str, payload: Mapping[str, Any]) -> str:
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(dumps(payload))
    return path


def write_manifest(path: str, config: Dict[str, Any], artifacts: List[str], summary: Mapping[str, Any]) -> str:
    """
    Write the run manifest.

    Args:
        path: Manifest file
        config: Resolved scenario configuration
        artifacts: Files produced by the run (checksummed by base name)
        summary: Scenario-specific scalar results

    Returns:
        The path written
    """
    payload = {
        'config': config,
        'versions': versions(),
        'artifacts': {os.path.basename(a): sha256_file(a) for a in sorted(artifacts)},
        'summary': summary,
    }
    return write_json(path, payload)


def write_gnuplot_hints(path: str, title: str, columns: Sequence[str], x: int = 0,
                        y: Sequence[int] = (1,)) -> str:
    """Companion text file telling a plotting tool which columns to use."""
    lines = [f"# {title}", "set datafile separator ','", "set key autotitle columnhead",
             f"set xlabel '{columns[x]}'"]
    csv_name = os.path.basename(path).replace('.gnuplot.txt', '.csv')
    plots = [f"'{csv_name}' using {x + 1}:{j + 1} with linespoints" for j in y]
    lines.append('plot ' + ', \\\n     '.join(plots))
    os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write('\n'.join(lines) + '\n')
    return path
