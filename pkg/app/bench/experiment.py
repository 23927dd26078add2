from fractions import Fraction
import time
from typing import List, NamedTuple

from app.bench.run_spec import Detail, RunSpec
from app.bench.trial_runner import TrialResult, TrialRunner
from app.common import metrics
from app.common.insert_record import Scheme
from app.tables.elastic_table import build_elastic_layout, plan_batches
from app.tables.exceptions import LayoutError
from app.tables.funnel_table import FunnelParams, build_funnel_layout
from app.util import log
from app.util.exceptions import InvalidRunSpecError


class CellResult(NamedTuple):
    """
    Everything measured for one (scheme, n, delta) cell.
    """
    spec: RunSpec
    trials: List[TrialResult]
    summary: metrics.SweepSummary
    warnings: List[str]
    wall_time_seconds: float

    @property
    def failure_count(self):
        return self.summary.failure_count


def check_layout(spec):
    """
    Build the scheme's layout without allocating a table, so that infeasible parameters surface as a usage error
    before any trial runs.

    :type spec: app.bench.run_spec.RunSpec
    :return: warnings to carry into the output metadata
    :rtype: list[str]
    :raises InvalidRunSpecError: if the parameters admit no layout
    """
    warnings = []
    delta = Fraction(1, 1 << spec.log2_inv_delta)
    try:
        if spec.scheme is Scheme.ELASTIC:
            plan_batches(build_elastic_layout(spec.n), delta)
        elif spec.scheme is Scheme.FUNNEL:
            params = FunnelParams(spec.n, delta)
            layout = build_funnel_layout(params)
            if params.delta_clamped:
                warnings.append('funnel n={} delta=2^-{}: layout sized for delta=2^-{}'.format(
                    spec.n, spec.log2_inv_delta, params.log2_inv_delta))
            if layout.c_bucket_count == 0:
                warnings.append('funnel n={} delta=2^-{}: C holds no whole bucket; any key reaching C fails'.format(
                    spec.n, spec.log2_inv_delta))
            elif layout.c_waste:
                warnings.append('funnel n={} delta=2^-{}: {} slots of C are left over after {} buckets of {}'.format(
                    spec.n, spec.log2_inv_delta, layout.c_waste, layout.c_bucket_count, layout.c_bucket_size))
            if layout.tail_ratio_violations:
                warnings.append('funnel n={} delta=2^-{}: levels {} are followed by at most 2.5 times their size'
                                .format(spec.n, spec.log2_inv_delta, layout.tail_ratio_violations))
    except LayoutError as ex:
        raise InvalidRunSpecError(str(ex)) from ex
    return warnings


def run_cell(spec, conf_values, runner=None):
    """
    Run every trial of one cell and aggregate them.

    :type spec: app.bench.run_spec.RunSpec
    :param conf_values: probe_cap_factor and lookup_probe_cap
    :type conf_values: dict
    :type runner: TrialRunner | None
    :rtype: CellResult
    """
    logger = log.get_logger(__name__)
    spec.validate()
    warnings = check_layout(spec)
    for warning in warnings:
        logger.warning(warning)

    runner = runner or TrialRunner(jobs=spec.jobs)
    config = spec.table_config(conf_values['probe_cap_factor'], conf_values['lookup_probe_cap'])
    keep_records = spec.detail is Detail.PER_INSERTION

    start_time = time.perf_counter()
    trials = runner.run(config, spec.master_seed, spec.trials, keep_records=keep_records)
    wall_time_seconds = time.perf_counter() - start_time

    summary = metrics.aggregate_trials([result.sample() for result in trials], spec.total_insertions)
    summary = summary._replace(expensive_case_trials=sum(1 for result in trials if result.expensive_large_case))
    logger.info('{} n={} delta=2^-{}: {} trials, {} failed, amortized {:.4f}, worst-case expected {:.4f}, max {}',
                spec.scheme, spec.n, spec.log2_inv_delta, summary.trials, summary.failure_count,
                summary.amortized_mean, summary.worst_case_expected, summary.max_observed)
    return CellResult(spec, trials, summary, warnings, wall_time_seconds)

