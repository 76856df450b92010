import io
import json
from fractions import Fraction

import pytest

from oscnorm.export import SCAN_COLUMNS, format_float, render_report, scan_rows, write_report
from oscnorm.normest import ScanRecord
from utils.error_handler import OscNormError


def _report():
    records = [ScanRecord(8, 1.0 / 3.0, label='ones', predicted=2.0, seed=0), ScanRecord(16, 0.5)]
    return {
        'command': 'trig-scan',
        'columns': list(SCAN_COLUMNS),
        'rows': scan_rows(records),
        'summary': {'slope': -0.25, 'violations': 0, 'regions': 'B'},
        'passed': True,
    }


def test_format_float():
    assert format_float(1.0 / 3.0) == '0.333333333333'
    assert format_float(-0.0) == '0'
    assert format_float(float('inf')) == 'inf'
    assert format_float(None) == ''


def test_csv_table_and_summary():
    text = render_report(_report(), 'csv')
    lines = text.splitlines()
    assert lines[0] == 'N,value,predicted,label,seed'
    assert lines[1] == '8,0.333333333333,2,ones,0'
    assert lines[2] == '16,0.5,,,'
    assert lines[3:] == ['# regions="B"', '# slope=-0.25', '# violations=0']


def test_json_rows_are_keyed_by_column():
    payload = json.loads(render_report(_report(), 'json'))
    assert payload['schema_version'] == 1
    assert 'columns' not in payload
    assert payload['rows'][0] == {'N': 8, 'value': 0.333333333333, 'predicted': 2.0, 'label': 'ones', 'seed': 0}
    assert payload['rows'][1]['predicted'] is None


def test_json_handles_exact_and_complex_values():
    report = {'command': 'region', 'summary': {'x': Fraction(1, 4), 'z': 1 + 2j, 'big': float('inf')}}
    summary = json.loads(render_report(report, 'json'))['summary']
    assert summary == {'x': 0.25, 'z': {'re': 1.0, 'im': 2.0}, 'big': 'inf'}


def test_output_is_reproducible():
    assert render_report(_report(), 'csv') == render_report(_report(), 'csv')
    assert render_report(_report(), 'json') == render_report(_report(), 'json')


def test_unknown_format():
    with pytest.raises(OscNormError) as info:
        render_report(_report(), 'xml')
    assert info.value.error_code == 'FORMAT'


def test_write_to_file(tmp_path):
    target = tmp_path / 'scan.csv'
    stdout = io.StringIO()
    write_report(_report(), 'csv', target, stdout)
    assert stdout.getvalue() == ''
    assert target.read_text(encoding='utf-8') == render_report(_report(), 'csv')
