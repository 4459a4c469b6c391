"""
Monte Carlo report persistence for RobustLM
"""
import json
import logging
import os
from dataclasses import asdict, fields
from datetime import datetime

import pandas as pd

from constants import VERSION
from errors import InputError
from experiments import McCell, McReport

logger = logging.getLogger(__name__)

COLUMNS = [f.name for f in fields(McCell)]


def report_frame(report):
    """One row per cell"""
    frame = pd.DataFrame([asdict(cell) for cell in report.cells], columns=COLUMNS)
    frame.insert(2, 'label', [cell.label for cell in report.cells])
    return frame


def save_report(report, path_prefix):
    """Write <prefix>.csv and <prefix>.json; returns both paths"""
    directory = os.path.dirname(path_prefix)
    if directory:
        os.makedirs(directory, exist_ok=True)

    csv_path = f"{path_prefix}.csv"
    json_path = f"{path_prefix}.json"
    report_frame(report).to_csv(csv_path, index=False)

    payload = {
        'metadata': dict(report.metadata, version=VERSION,
                         written=datetime.now().strftime('%Y-%m-%d %H:%M')),
        'cells': [asdict(cell) for cell in report.cells],
    }
    with open(json_path, 'w') as f:
        json.dump(payload, f, indent=2)

    logger.info("report written to %s and %s", csv_path, json_path)
    return csv_path, json_path


def load_report(json_path):
    """Read a report written by save_report"""
    try:
        with open(json_path, 'r') as f:
            payload = json.load(f)
        cells = [McCell(**entry) for entry in payload['cells']]
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise InputError(f"cannot load report {json_path}: {e}") from e
    return McReport(cells, payload.get('metadata', {}))
