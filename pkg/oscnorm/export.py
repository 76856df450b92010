"""CSV and JSON writers for scan results and check reports.

Floats are written with 12 significant digits through '%.12g', which is locale independent,
so a fixed seed reproduces the output byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from pathlib import Path
from typing import IO, Any

import numpy as np

from utils.error_handler import OscNormError
from utils.logging_setup import get_logger

from .normest import ScanRecord

logger = get_logger('export')

SCAN_COLUMNS = ('N', 'value', 'predicted', 'label', 'seed')
SCHEMA_VERSION = 1


def format_float(value: float | None) -> str:
    if value is None:
        return ''
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return '%.12g' % (value + 0.0)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction)):
        v = float(value)
        return float(format_float(v)) if math.isfinite(v) else format_float(v)
    if isinstance(value, complex):
        return {'re': _jsonable(value.real), 'im': _jsonable(value.imag)}
    if value is None or isinstance(value, str):
        return value
    return str(value)


def write_rows_csv(stream: IO[str], columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        writer.writerow(
            [format_float(v) if isinstance(v, float) else ('' if v is None else v) for v in row]
        )


def scan_rows(records: Iterable[ScanRecord]) -> list[list[Any]]:
    return [[r.N, float(r.value), r.predicted, r.label, r.seed] for r in records]


def render_report(report: Mapping[str, Any], fmt: str) -> str:
    """Render a command report.

    The report carries 'command', optional 'columns'/'rows' tables and 'summary' fields.
    CSV output is the table followed by '# key=value' summary lines.
    """
    if fmt == 'json':
        payload = {'schema_version': SCHEMA_VERSION, **report}
        if 'rows' in payload and 'columns' in payload:
            payload['rows'] = [dict(zip(payload['columns'], row)) for row in payload['rows']]
            del payload['columns']
        return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + '\n'
    if fmt != 'csv':
        raise OscNormError(f"unknown output format {fmt!r}", error_code='FORMAT')
    buf = io.StringIO()
    if 'rows' in report:
        write_rows_csv(buf, report['columns'], report['rows'])
    for key in sorted(report.get('summary', {})):
        value = report['summary'][key]
        text = format_float(value) if isinstance(value, float) else json.dumps(_jsonable(value))
        buf.write(f"# {key}={text}\n")
    return buf.getvalue()


def write_report(report: Mapping[str, Any], fmt: str, out: str | Path | None, stdout: IO[str]) -> None:
    text = render_report(report, fmt)
    if out is None:
        stdout.write(text)
        return
    path = Path(out)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        f.write(text)
    logger.info(f"Wrote {report.get('command', 'report')} output to {path}")
