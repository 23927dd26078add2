from concurrent.futures import ProcessPoolExecutor
import time
from typing import NamedTuple, Optional, Tuple

import numpy as np

from app.common import metrics
from app.common.insert_record import InsertRecord, Scheme
from app.probing.probe_source import trial_seed
from app.tables.elastic_table import CASE_EXPENSIVE, case_tag
from app.tables.exceptions import ExpensiveCaseCapExceeded, TrialAbortedError
from app.tables.table_config import create_table
from app.util import log
from app.util.unhandled_exception_handler import UnhandledExceptionHandler

# Expensive-case insertions only count against the scheme when they happen in arrays at least this large
LARGE_ARRAY_SIZE = 1 << 10


class FunnelTrialStats(NamedTuple):
    """
    Per-level state of a funnel table at the end of a trial, A_1 first.
    """
    level_sizes: Tuple[int, ...]
    level_attempts: Tuple[int, ...]
    level_occupancy: Tuple[int, ...]
    b_occupancy: int
    special_size: int


class TrialResult(NamedTuple):
    trial: int
    seed: int
    search_probes: np.ndarray
    insert_probes: np.ndarray
    records: Optional[Tuple[InsertRecord, ...]] = None
    failure: Optional[str] = None
    failure_message: Optional[str] = None
    elapsed_seconds: float = 0.0
    expensive_large_case: bool = False
    funnel_stats: Optional[FunnelTrialStats] = None

    @property
    def failed(self):
        return self.failure is not None

    @property
    def completed_insertions(self):
        return len(self.search_probes)

    def sample(self):
        """
        :rtype: metrics.TrialSample
        """
        return metrics.TrialSample(self.trial, self.search_probes, self.insert_probes, failed=self.failed)


def run_trial(config, master_seed, trial, keep_records=False):
    """
    Insert keys 0 .. m-1 into a fresh table seeded for this trial. A TrialAbortedError ends the trial early and is
    reported in the result instead of raised. Runs in worker processes, so it must stay a module-level function.

    :type config: app.tables.table_config.TableConfig
    :type master_seed: int
    :type trial: int
    :param keep_records: keep every InsertRecord (for per-insertion output) instead of only the probe counts
    :type keep_records: bool
    :rtype: TrialResult
    """
    seed = trial_seed(master_seed, trial)
    table = create_table(config, seed, trial=trial)
    m = table.total_insertions
    search_probes = np.zeros(m, dtype=np.int64)
    insert_probes = np.zeros(m, dtype=np.int64)
    records = [] if keep_records else None
    expensive_tag = case_tag(CASE_EXPENSIVE)
    expensive_large_case = False
    failure = failure_message = None
    completed = 0

    start_time = time.perf_counter()
    try:
        for key in range(m):
            record = table.insert(key)
            search_probes[completed] = record.search_probe_complexity
            insert_probes[completed] = record.insertion_probes
            completed += 1
            if records is not None:
                records.append(record)
            if record.tag == expensive_tag and table.layout.size_of(record.subarray) >= LARGE_ARRAY_SIZE:
                expensive_large_case = True
    except TrialAbortedError as ex:
        failure, failure_message = type(ex).__name__, str(ex)
        if isinstance(ex, ExpensiveCaseCapExceeded):
            expensive_large_case = True
    elapsed_seconds = time.perf_counter() - start_time

    funnel_stats = None
    if table.SCHEME is Scheme.FUNNEL:
        layout = table.layout
        funnel_stats = FunnelTrialStats(
            level_sizes=tuple(layout.level_size(level) for level in range(1, layout.alpha + 1)),
            level_attempts=table.level_attempts,
            level_occupancy=table.level_occupancy,
            b_occupancy=table.b_occupancy,
            special_size=layout.special_size,
        )

    return TrialResult(
        trial=trial,
        seed=seed,
        search_probes=search_probes[:completed],
        insert_probes=insert_probes[:completed],
        records=tuple(records) if records is not None else None,
        failure=failure,
        failure_message=failure_message,
        elapsed_seconds=elapsed_seconds,
        expensive_large_case=expensive_large_case,
        funnel_stats=funnel_stats,
    )


def _initialize_worker():
    # Only the parent process tears down on SIGINT/SIGTERM
    UnhandledExceptionHandler.reset_signal_handlers()


class TrialRunner(object):
    """
    Runs the trials of one table configuration, in worker processes when jobs > 1. Results always come back in trial
    order, so the output does not depend on the degree of parallelism.
    """

    def __init__(self, jobs=1):
        """
        :param jobs: the number of worker processes; 1 runs trials in this process
        :type jobs: int
        """
        self._jobs = jobs
        self._logger = log.get_logger(__name__)

    def run(self, config, master_seed, trials, keep_records=False):
        """
        :type config: app.tables.table_config.TableConfig
        :type master_seed: int
        :type trials: int
        :type keep_records: bool
        :rtype: list[TrialResult]
        """
        self._logger.debug('Running {} trials of {} (n={}, delta=2^-{}) with {} jobs.',
                           trials, config.scheme, config.n, config.log2_inv_delta, self._jobs)
        if self._jobs == 1 or trials == 1:
            results = [run_trial(config, master_seed, trial, keep_records) for trial in range(trials)]
        else:
            results = self._run_in_pool(config, master_seed, trials, keep_records)

        results.sort(key=lambda result: result.trial)
        for result in results:
            self._report(config, result)
        return results

    def _run_in_pool(self, config, master_seed, trials, keep_records):
        executor = ProcessPoolExecutor(max_workers=min(self._jobs, trials), initializer=_initialize_worker)
        exception_handler = UnhandledExceptionHandler.singleton()
        exception_handler.add_teardown_callback(executor.shutdown, wait=False)
        with executor:
            futures = [executor.submit(run_trial, config, master_seed, trial, keep_records)
                       for trial in range(trials)]
            results = [future.result() for future in futures]
        exception_handler.remove_teardown_callback(executor.shutdown)
        return results

    def _report(self, config, result):
        metrics.record_trial(config.scheme, result.completed_insertions, result.elapsed_seconds, result.failure)
        if result.failed:
            self._logger.warning('Trial {} of {} (n={}, delta=2^-{}) failed after {} insertions: {}',
                                 result.trial, config.scheme, config.n, config.log2_inv_delta,
                                 result.completed_insertions, result.failure_message)
        else:
            self._logger.debug('Trial {} of {} finished in {:.3f}s.', result.trial, config.scheme,
                               result.elapsed_seconds)
