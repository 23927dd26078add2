import time

from app.bench.experiment import run_cell
from app.bench.output_writer import AGGREGATE_COLUMNS, PER_INSERTION_COLUMNS, aggregate_row, per_insertion_rows
from app.bench.run_spec import Detail, OutputFormat, RunSpec, parse_schemes
from app.subcommands.subcommand import Subcommand
from app.util.conf.configuration import Configuration
from app.util.exceptions import InvalidRunSpecError


class RunSubcommand(Subcommand):

    def run(self, log_level, scheme, n, log2_inv_delta, trials=None, seed=None, c=None, output_format='csv',
            out=None, detail='aggregate', jobs=None, allow_failures=False, metrics_file=None):
        """
        Run seeded trials of one scheme at one (n, delta) and write per-insertion or aggregate results.

        :param log_level: the log level at which to do application logging (or None for default log level)
        :type log_level: str | None
        :param scheme: elastic, funnel or uniform
        :type scheme: str
        :type n: int
        :param log2_inv_delta: k, for delta = 2^-k
        :type log2_inv_delta: int
        :param out: the output file, or None for standard output
        :type out: str | None
        """
        self._configure_logging(log_level)
        start_time = time.time()
        schemes = parse_schemes(scheme)
        if len(schemes) != 1:
            raise InvalidRunSpecError('run takes exactly one scheme; use sweep for several.')

        spec = RunSpec(
            scheme=schemes[0],
            n=n,
            log2_inv_delta=log2_inv_delta,
            trials=trials if trials is not None else Configuration['default_trials'],
            master_seed=seed if seed is not None else Configuration['default_seed'],
            c=c if c is not None else Configuration['elastic_budget_constant'],
            output_format=OutputFormat(output_format),
            output_path=out,
            detail=Detail(detail),
            jobs=jobs if jobs is not None else Configuration['default_jobs'],
            allow_failures=allow_failures,
        ).validate()

        cell = run_cell(spec, self._table_conf_values())
        if spec.detail is Detail.PER_INSERTION:
            columns, rows = PER_INSERTION_COLUMNS, per_insertion_rows(spec, cell.trials)
        else:
            columns, rows = AGGREGATE_COLUMNS, [aggregate_row(spec, cell.summary)]

        self._emit(spec.output_format, columns, rows, spec.output_path, spec.master_seed, start_time, cell.warnings)
        self._write_metrics(metrics_file)
        self._exit_on_failures(cell.failure_count, spec.allow_failures)
