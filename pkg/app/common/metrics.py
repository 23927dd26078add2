from enum import Enum
from typing import NamedTuple, Tuple

import numpy as np
from prometheus_client import CollectorRegistry, Counter, Histogram, write_to_textfile


registry = CollectorRegistry()

insertions_total = Counter(
    'probebench_insertions_total',
    'Total number of keys placed into tables',
    ['scheme'],
    registry=registry)

trials_total = Counter(
    'probebench_trials_total',
    'Total number of trials run',
    ['scheme'],
    registry=registry)

trial_failures_total = Counter(
    'probebench_trial_failures_total',
    'Total number of trials that aborted before placing every key',
    ['scheme', 'error'],
    registry=registry)

trial_duration_seconds = Histogram(  # pylint: disable=no-value-for-parameter
    'probebench_trial_duration_seconds',
    'Wall time of one trial in seconds',
    ['scheme'],
    buckets=(.001, .01, .05, .1, .5, 1.0, 5.0, 10.0, 30.0, 60.0, 300.0, float('inf')),
    registry=registry)


class ErrorType(str, Enum):
    ExpensiveCaseCapExceeded = 'ExpensiveCaseCapExceeded'
    FunnelOverflow = 'FunnelOverflow'
    ProbeCapExceeded = 'ProbeCapExceeded'
    TrialAborted = 'TrialAborted'

    def __str__(self):
        """
        Even though this class inherits from str, still include a __str__ method so that the exported metric reads
        probebench_trial_failures_total{error="FunnelOverflow",...} instead of {error="ErrorType.FunnelOverflow",...}
        """
        return self.value

    @classmethod
    def from_failure(cls, failure_name):
        """
        :param failure_name: the class name of the exception that aborted a trial
        :type failure_name: str
        :rtype: ErrorType
        """
        try:
            return cls(failure_name)
        except ValueError:
            return cls.TrialAborted


def record_trial(scheme, insertions, duration_seconds, failure_name=None):
    """
    Count one finished trial in the process-wide registry.

    :type scheme: app.common.insert_record.Scheme
    :param insertions: keys the trial placed
    :type insertions: int
    :type duration_seconds: float
    :param failure_name: the name of the exception that aborted the trial, if any
    :type failure_name: str | None
    """
    scheme = str(scheme)
    trials_total.labels(scheme).inc()
    insertions_total.labels(scheme).inc(insertions)
    trial_duration_seconds.labels(scheme).observe(duration_seconds)
    if failure_name is not None:
        trial_failures_total.labels(scheme, ErrorType.from_failure(failure_name)).inc()


def write_metrics(path):
    """
    Write the registry in the Prometheus text exposition format.

    :type path: str
    """
    write_to_textfile(path, registry)


class TrialSample(NamedTuple):
    """
    The probe counts of one trial in insertion order.
    """
    trial: int
    search_probes: np.ndarray
    insert_probes: np.ndarray
    failed: bool = False


class SweepSummary(NamedTuple):
    trials: int
    failure_count: int
    amortized_mean: float
    per_index_mean: Tuple[float, ...]
    worst_case_expected: float
    max_observed: int
    insertion_probes_mean: float
    insertion_per_index_mean: Tuple[float, ...]
    insertion_worst_expected: float
    trial_max: Tuple[int, ...] = ()
    expensive_case_trials: int = 0


class GrowthFit(NamedTuple):
    slope: float
    intercept: float
    r_squared: float


class AggregationError(Exception):
    """
    The records handed to aggregation do not cover every insertion of every successful trial exactly once.
    """


class GrowthFitError(Exception):
    """
    A least-squares line cannot be fitted to the given points.
    """


def _per_trial_samples(records, m, trials, failed_trials):
    failed_trials = frozenset(failed_trials)
    search = {}
    insert = {}
    for record in records:
        if not 0 <= record.trial < trials:
            raise AggregationError('Record of trial {} is outside the {} trials aggregated.'.format(
                record.trial, trials))
        if record.trial in failed_trials:
            continue
        if not 0 <= record.insert_index < m:
            raise AggregationError('Record with insert_index {} is outside [0, {}).'.format(record.insert_index, m))
        search.setdefault(record.trial, {})
        insert.setdefault(record.trial, {})
        if record.insert_index in search[record.trial]:
            raise AggregationError('Trial {} has two records for insert_index {}.'.format(
                record.trial, record.insert_index))
        search[record.trial][record.insert_index] = record.search_probe_complexity
        insert[record.trial][record.insert_index] = record.insertion_probes

    samples = []
    for trial in range(trials):
        if trial in failed_trials:
            samples.append(TrialSample(trial, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), failed=True))
            continue
        by_index = search.get(trial, {})
        if len(by_index) != m:
            raise AggregationError('Trial {} has {} records, expected {}.'.format(trial, len(by_index), m))
        indexes = range(m)
        samples.append(TrialSample(
            trial,
            np.fromiter((by_index[i] for i in indexes), dtype=np.int64, count=m),
            np.fromiter((insert[trial][i] for i in indexes), dtype=np.int64, count=m),
        ))
    return samples


def aggregate(records, m, trials, failed_trials=()):
    """
    Reduce per-insertion records to sweep statistics. Records of failed trials are ignored; those trials only add to
    the failure count.

    :type records: collections.abc.Iterable[app.common.insert_record.InsertRecord]
    :param m: insertions per trial
    :type m: int
    :type trials: int
    :param failed_trials: ids of trials that aborted
    :type failed_trials: Iterable[int]
    :rtype: SweepSummary
    """
    return aggregate_trials(_per_trial_samples(records, m, trials, failed_trials), m)


def aggregate_trials(samples, m):
    """
    Reduce per-trial probe arrays to sweep statistics. This is the path large sweeps take, since it never
    materializes one record per insertion.

    :type samples: Iterable[TrialSample]
    :type m: int
    :rtype: SweepSummary
    """
    samples = sorted(samples, key=lambda sample: sample.trial)
    if len({sample.trial for sample in samples}) != len(samples):
        raise AggregationError('The same trial was aggregated twice.')
    succeeded = [sample for sample in samples if not sample.failed]
    for sample in succeeded:
        if len(sample.search_probes) != m or len(sample.insert_probes) != m:
            raise AggregationError('Trial {} has {} probe counts, expected {}.'.format(
                sample.trial, len(sample.search_probes), m))

    failure_count = len(samples) - len(succeeded)
    if not succeeded or m == 0:
        zeros = (0.0,) * m
        return SweepSummary(
            trials=len(samples), failure_count=failure_count, amortized_mean=0.0, per_index_mean=zeros,
            worst_case_expected=0.0, max_observed=0, insertion_probes_mean=0.0, insertion_per_index_mean=zeros,
            insertion_worst_expected=0.0, trial_max=(0,) * len(succeeded))

    search = np.vstack([sample.search_probes for sample in succeeded]).astype(np.float64)
    insert = np.vstack([sample.insert_probes for sample in succeeded]).astype(np.float64)
    per_index = search.mean(axis=0)
    insert_per_index = insert.mean(axis=0)
    return SweepSummary(
        trials=len(samples),
        failure_count=failure_count,
        amortized_mean=float(search.mean()),
        per_index_mean=tuple(float(value) for value in per_index),
        worst_case_expected=float(per_index.max()),
        max_observed=int(search.max()),
        insertion_probes_mean=float(insert.mean()),
        insertion_per_index_mean=tuple(float(value) for value in insert_per_index),
        insertion_worst_expected=float(insert_per_index.max()),
        trial_max=tuple(int(value) for value in search.max(axis=1)),
    )


def growth_fit(points):
    """
    Fit y = slope * x + intercept by ordinary least squares.

    :type points: Sequence[(float, float)]
    :rtype: GrowthFit
    """
    if len(points) < 2:
        raise GrowthFitError('At least two points are needed, got {}.'.format(len(points)))
    xs = np.array([x for x, _ in points], dtype=np.float64)
    ys = np.array([y for _, y in points], dtype=np.float64)
    if np.all(xs == xs[0]):
        raise GrowthFitError('All points share x = {}.'.format(xs[0]))

    slope, intercept = (float(coefficient) for coefficient in np.polyfit(xs, ys, 1))
    residuals = ys - np.polyval((slope, intercept), xs)
    ss_res = float(np.dot(residuals, residuals))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return GrowthFit(slope, intercept, r_squared)

