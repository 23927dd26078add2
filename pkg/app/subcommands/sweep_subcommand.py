import time

from app.bench.experiment import check_layout, run_cell
from app.bench.output_writer import AGGREGATE_COLUMNS, aggregate_row
from app.bench.run_spec import (
    Detail, OutputFormat, RunSpec, parse_log2_inv_delta_range, parse_n_list, parse_schemes)
from app.bench.trial_runner import TrialRunner
from app.subcommands.subcommand import Subcommand
from app.util.conf.configuration import Configuration


class SweepSubcommand(Subcommand):

    def run(self, log_level, scheme, n, log2_inv_delta, trials=None, seed=None, c=None, output_format='csv',
            out=None, jobs=None, allow_failures=False, metrics_file=None):
        """
        Run every (scheme, n, delta) combination and write one aggregate row per combination, ordered by scheme, then
        n, then delta.

        :param scheme: a comma separated list of schemes
        :type scheme: str
        :param n: a comma separated list of capacities
        :type n: str
        :param log2_inv_delta: k or an inclusive range a:b
        :type log2_inv_delta: str
        """
        self._configure_logging(log_level)
        start_time = time.time()
        jobs = jobs if jobs is not None else Configuration['default_jobs']
        master_seed = seed if seed is not None else Configuration['default_seed']
        specs = [
            RunSpec(
                scheme=cell_scheme,
                n=cell_n,
                log2_inv_delta=cell_k,
                trials=trials if trials is not None else Configuration['default_trials'],
                master_seed=master_seed,
                c=c if c is not None else Configuration['elastic_budget_constant'],
                output_format=OutputFormat(output_format),
                output_path=out,
                detail=Detail.AGGREGATE,
                jobs=jobs,
                allow_failures=allow_failures,
            ).validate()
            for cell_scheme in parse_schemes(scheme)
            for cell_n in parse_n_list(n)
            for cell_k in parse_log2_inv_delta_range(log2_inv_delta)
        ]
        # Reject infeasible cells before spending time on the feasible ones
        for spec in specs:
            check_layout(spec)

        runner = TrialRunner(jobs=jobs)
        rows = []
        warnings = []
        failure_count = 0
        for spec in specs:
            cell = run_cell(spec, self._table_conf_values(), runner=runner)
            rows.append(aggregate_row(spec, cell.summary))
            warnings.extend(cell.warnings)
            failure_count += cell.failure_count

        self._emit(OutputFormat(output_format), AGGREGATE_COLUMNS, rows, out, master_seed, start_time, warnings)
        self._write_metrics(metrics_file)
        self._exit_on_failures(failure_count, allow_failures)
