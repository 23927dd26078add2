import csv
import io
import json
import sys

from app.bench.run_spec import OutputFormat
from app.util import fs
from app.util.exceptions import OutputWriteError

PER_INSERTION_COLUMNS = (
    'scheme', 'n', 'delta_log2', 'trial', 'insert_index', 'tag', 'search_probes', 'insert_probes', 'slot',
)
AGGREGATE_COLUMNS = (
    'scheme', 'n', 'delta_log2', 'trials', 'failures', 'amortized_mean', 'worst_case_expected', 'max_observed',
    'insert_probes_amortized', 'insert_probes_worst_expected',
)


def per_insertion_rows(spec, results):
    """
    One row per insertion of every trial, in (trial, insert_index) order. Failed trials contribute the insertions
    they completed.

    :type spec: app.bench.run_spec.RunSpec
    :type results: list[app.bench.trial_runner.TrialResult]
    :rtype: list[dict]
    """
    rows = []
    for result in sorted(results, key=lambda result: result.trial):
        for record in result.records:
            rows.append({
                'scheme': str(spec.scheme),
                'n': spec.n,
                'delta_log2': spec.delta_log2,
                'trial': record.trial,
                'insert_index': record.insert_index,
                'tag': record.tag,
                'search_probes': record.search_probe_complexity,
                'insert_probes': record.insertion_probes,
                'slot': record.slot,
            })
    return rows


def aggregate_row(spec, summary):
    """
    :type spec: app.bench.run_spec.RunSpec
    :type summary: app.common.metrics.SweepSummary
    :rtype: dict
    """
    return {
        'scheme': str(spec.scheme),
        'n': spec.n,
        'delta_log2': spec.delta_log2,
        'trials': summary.trials,
        'failures': summary.failure_count,
        'amortized_mean': summary.amortized_mean,
        'worst_case_expected': summary.worst_case_expected,
        'max_observed': summary.max_observed,
        'insert_probes_amortized': summary.insertion_probes_mean,
        'insert_probes_worst_expected': summary.insertion_worst_expected,
    }


def format_csv(columns, rows):
    """
    :type columns: tuple[str]
    :type rows: list[dict]
    :return: the rows under a header line, LF line endings, floats in shortest round-trip form
    :rtype: str
    """
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator='\n', extrasaction='raise')
    writer.writeheader()
    writer.writerows({column: _format_value(row[column]) for column in columns} for row in rows)
    return buffer.getvalue()


def format_json(rows, metadata):
    """
    :type rows: list[dict]
    :param metadata: version, seed, wall time and any warnings raised while building the tables
    :type metadata: dict
    :rtype: str
    """
    return json.dumps({'metadata': metadata, 'rows': rows}, indent=2) + '\n'


def format_output(output_format, columns, rows, metadata):
    """
    :type output_format: OutputFormat
    :rtype: str
    """
    if OutputFormat(output_format) is OutputFormat.JSON:
        return format_json(rows, metadata)
    return format_csv(columns, rows)


def write_output(text, output_path=None, stream=None):
    """
    Write the rendered output atomically to output_path, or to the stream (standard output by default) when no path
    is given.

    :type text: str
    :type output_path: str | None
    :type stream: io.TextIOBase | None
    :raises OutputWriteError: if the file cannot be written
    """
    if output_path is None:
        stream = stream or sys.stdout
        stream.write(text)
        stream.flush()
        return
    try:
        fs.atomic_write_file(text, output_path)
    except OSError as ex:
        raise OutputWriteError('Could not write {}: {}'.format(output_path, ex)) from ex


def _format_value(value):
    if isinstance(value, float):
        return repr(value)
    return value
