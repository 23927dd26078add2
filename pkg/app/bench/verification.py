from collections import Counter
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from app.bench.trial_runner import TrialRunner
from app.common import metrics
from app.common.insert_record import Scheme
from app.probing import phi
from app.probing.probe_source import ProbeSource, trial_seed
from app.tables.elastic_table import ElasticParams, ElasticTable
from app.tables.exceptions import FunnelOverflow, TableError
from app.tables.funnel_table import FunnelParams, FunnelTable, TAG_C, log2_log2
from app.tables.table_config import TableConfig, create_table
from app.util import log

PHI_EXHAUSTIVE_LIMIT = 512
PHI_DECODE_SCAN_LIMIT = 1 << 16
BATCH_EXACTNESS_SIZES = (1 << 6, 1 << 10, 1 << 14)
BATCH_EXACTNESS_LOG2_INV_DELTAS = (2, 4)
BATCH_EXACTNESS_SEEDS = 5
FUNNEL_CHECK_N = 1 << 14
FUNNEL_CHECK_LOG2_INV_DELTAS = (3, 4)
FUNNEL_CHECK_SEEDS = 3
TWO_CHOICE_N = 1 << 14
TWO_CHOICE_LOG2_INV_DELTA = 3
TWO_CHOICE_SEEDS = 3
REPLAY_LOG2_INV_DELTA = 4
ABSENT_KEY_PROBE_CAP = 1 << 12

SWEEP_LOG2_INV_DELTAS = range(2, 9)
FUNNEL_GROWTH_LOG2_INV_DELTAS = range(3, 9)
FUNNEL_FAILURE_LOG2_INV_DELTAS = (3, 6)
LEVEL_FILL_LOG2_INV_DELTA = 6
EXPENSIVE_CASE_MAX_FRACTION = 0.05


class PropertyResult(NamedTuple):
    name: str
    passed: bool
    detail: str


class PropertyViolation(Exception):
    """
    A verified property does not hold. The message says where.
    """


class VerificationSuite(object):
    """
    Named properties of the probe encoding, the probe source and the three tables. Fast mode checks the deterministic
    properties at small sizes; full mode adds the Monte-Carlo trend checks, sized by the verify_* settings.
    """

    def __init__(self, fast=True, conf_values=None, runner=None, phi_encode=phi.phi_encode,
                 phi_decode=phi.phi_decode):
        """
        :param fast: skip the sweeps
        :type fast: bool
        :param conf_values: probe_cap_factor, lookup_probe_cap and the verify_* sizes
        :type conf_values: dict | None
        :type runner: TrialRunner | None
        :param phi_encode: the encoder under test; tests swap in a faulty one to check that the suite notices
        :type phi_encode: callable
        :type phi_decode: callable
        """
        self._fast = fast
        self._conf = dict(_DEFAULT_CONF_VALUES, **(conf_values or {}))
        self._runner = runner or TrialRunner(jobs=1)
        self._phi_encode = phi_encode
        self._phi_decode = phi_decode
        self._logger = log.get_logger(__name__)
        self._sweep_cache = {}

    def property_names(self):
        """
        :rtype: list[str]
        """
        names = [name for name, _ in self._fast_properties()]
        if not self._fast:
            names += [name for name, _ in self._sweep_properties()]
        return names

    def run(self, names=None):
        """
        Check the properties in order. A property that raises anything other than PropertyViolation fails too, with
        the exception as its detail.

        :param names: the properties to check, or None for all of them
        :type names: list[str] | None
        :rtype: list[PropertyResult]
        """
        properties = self._fast_properties() + ([] if self._fast else self._sweep_properties())
        if names is not None:
            unknown = set(names) - {name for name, _ in properties}
            if unknown:
                raise ValueError('Unknown properties: {}'.format(', '.join(sorted(unknown))))
            properties = [(name, check) for name, check in properties if name in names]

        results = []
        for name, check in properties:
            try:
                detail = check()
                result = PropertyResult(name, True, detail or '')
            except PropertyViolation as ex:
                result = PropertyResult(name, False, str(ex))
            except (TableError, metrics.GrowthFitError, ValueError) as ex:
                result = PropertyResult(name, False, '{}: {}'.format(type(ex).__name__, ex))
            results.append(result)
            self._logger.info('{} {}{}', 'PASS' if result.passed else 'FAIL', name,
                              ': ' + result.detail if result.detail else '')
        return results

    def _fast_properties(self):
        return [
            ('phi_injectivity', self.check_phi_injectivity),
            ('phi_round_trip', self.check_phi_round_trip),
            ('phi_bound', self.check_phi_bound),
            ('phi_decode_image', self.check_phi_decode_image),
            ('phi_monotone_in_j', self.check_phi_monotone_in_j),
            ('phi_monotone_in_i', self.check_phi_monotone_in_i),
            ('probe_determinism', self.check_probe_determinism),
            ('elastic_batch_exactness', self.check_elastic_batch_exactness),
            ('funnel_probe_cap', self.check_funnel_probe_cap),
            ('funnel_two_choice', self.check_funnel_two_choice),
            ('funnel_b_load', self.check_funnel_b_load),
            ('replay_lookup', self.check_replay_lookup),
            ('output_determinism', self.check_output_determinism),
        ]

    def _sweep_properties(self):
        return [
            ('elastic_amortized_flatness', self.check_elastic_amortized_flatness),
            ('elastic_worst_case_growth', self.check_elastic_worst_case_growth),
            ('elastic_expensive_case_rarity', self.check_elastic_expensive_case_rarity),
            ('funnel_sweep_probe_cap', self.check_funnel_sweep_probe_cap),
            ('funnel_failure_rate', self.check_funnel_failure_rate),
            ('funnel_worst_case_growth', self.check_funnel_worst_case_growth),
            ('funnel_amortized_growth', self.check_funnel_amortized_growth),
            ('funnel_level_fill', self.check_funnel_level_fill),
            ('uniform_final_insertion', self.check_uniform_final_insertion),
        ]

    def _pairs(self):
        limit = PHI_EXHAUSTIVE_LIMIT
        return ((i, j) for i in range(1, limit + 1) for j in range(1, limit + 1))

    def check_phi_injectivity(self):
        seen = {}
        for pair in self._pairs():
            encoded = self._phi_encode(pair)
            if encoded in seen:
                raise PropertyViolation('{} and {} both encode to {}'.format(seen[encoded], pair, encoded))
            seen[encoded] = pair
        return '{} pairs'.format(len(seen))

    def check_phi_round_trip(self):
        for pair in self._pairs():
            decoded = self._phi_decode(self._phi_encode(pair))
            if decoded != pair:
                raise PropertyViolation('{} decodes back to {}'.format(pair, decoded))

    def check_phi_bound(self):
        for i, j in self._pairs():
            encoded = self._phi_encode((i, j))
            if encoded >= 16 * i * j * j:
                raise PropertyViolation('phi({}, {}) = {} is not below 16*i*j^2'.format(i, j, encoded))

    def check_phi_decode_image(self):
        valid = 0
        for value in range(1, PHI_DECODE_SCAN_LIMIT + 1):
            decoded = self._phi_decode(value)
            if decoded is None:
                continue
            valid += 1
            if self._phi_encode(decoded) != value:
                raise PropertyViolation('{} decodes to {}, which encodes to {}'.format(
                    value, decoded, self._phi_encode(decoded)))
        return '{} of {} values are encodings'.format(valid, PHI_DECODE_SCAN_LIMIT)

    def check_phi_monotone_in_j(self):
        for i in range(1, PHI_EXHAUSTIVE_LIMIT + 1):
            previous = self._phi_encode((i, 1))
            for j in range(2, PHI_EXHAUSTIVE_LIMIT + 1):
                current = self._phi_encode((i, j))
                if current <= previous:
                    raise PropertyViolation('phi({}, {}) = {} does not exceed phi({}, {}) = {}'.format(
                        i, j, current, i, j - 1, previous))
                previous = current

    def check_phi_monotone_in_i(self):
        """
        The largest i with p bits must encode below the smallest i with p + 1 bits; within one bit length the
        encoding already orders by i.
        """
        for j in range(1, PHI_EXHAUSTIVE_LIMIT + 1):
            for bits in range(1, PHI_EXHAUSTIVE_LIMIT.bit_length()):
                widest, next_wider = (1 << bits) - 1, 1 << bits
                if self._phi_encode((widest, j)) >= self._phi_encode((next_wider, j)):
                    raise PropertyViolation('phi({}, {}) does not fall below phi({}, {})'.format(
                        widest, j, next_wider, j))

    def check_probe_determinism(self):
        first, second, other = ProbeSource(7), ProbeSource(7), ProbeSource(8)
        differing = 0
        for key in range(256):
            for stream_id in range(4):
                for probe_index in range(1, 9):
                    slot = first.probe(key, stream_id, probe_index, 1000)
                    if slot != second.probe(key, stream_id, probe_index, 1000):
                        raise PropertyViolation('Probe ({}, {}, {}) is not reproducible'.format(
                            key, stream_id, probe_index))
                    if not 0 <= slot < 1000:
                        raise PropertyViolation('Probe ({}, {}, {}) left the range: {}'.format(
                            key, stream_id, probe_index, slot))
                    differing += slot != other.probe(key, stream_id, probe_index, 1000)
        if differing == 0:
            raise PropertyViolation('Seeds 7 and 8 produced identical probes')

    def check_elastic_batch_exactness(self):
        boundaries = 0
        for n in BATCH_EXACTNESS_SIZES:
            for k in BATCH_EXACTNESS_LOG2_INV_DELTAS:
                for seed in range(BATCH_EXACTNESS_SEEDS):
                    boundaries += self._check_elastic_boundaries(n, k, trial_seed(0, seed))
        return '{} batch boundaries matched'.format(boundaries)

    def _check_elastic_boundaries(self, n, k, seed):
        table = ElasticTable(
            ElasticParams(n, Fraction(1, 1 << k), seed=seed),
            probe_cap_factor=self._conf['probe_cap_factor'],
            lookup_probe_cap=self._conf['lookup_probe_cap'],
        )
        plan = table.plan
        if plan.nonempty_batches > k + 2:
            raise PropertyViolation('n={} k={}: {} batches, more than k + 2'.format(n, k, plan.nonempty_batches))

        boundary_after = {}
        inserted = 0
        for batch, size in enumerate(plan.batch_sizes):
            inserted += size
            if size > 0 and batch < plan.complete_batches:
                boundary_after[inserted] = batch

        checked = 0
        for key in range(table.total_insertions):
            table.insert(key)
            batch = boundary_after.get(table.count)
            if batch is not None:
                expected = table.expected_boundary_occupancy(batch)
                if table.occupancy != expected:
                    raise PropertyViolation('n={} k={} seed={}: after batch {} occupancy is {}, expected {}'.format(
                        n, k, seed, batch, list(table.occupancy), list(expected)))
                checked += 1
        return checked

    def _funnel_cap(self, n, k):
        params = FunnelParams(n, Fraction(1, 1 << k))
        return params.alpha * params.beta + 5 * log2_log2(n)

    def check_funnel_probe_cap(self):
        checked = 0
        for k in FUNNEL_CHECK_LOG2_INV_DELTAS:
            cap = self._funnel_cap(FUNNEL_CHECK_N, k)
            for seed in range(FUNNEL_CHECK_SEEDS):
                table = FunnelTable(FunnelParams(FUNNEL_CHECK_N, Fraction(1, 1 << k), seed=trial_seed(0, seed)))
                for key in range(table.total_insertions):
                    record = table.insert(key)
                    if record.search_probe_complexity > cap:
                        raise PropertyViolation('k={} seed={} key={}: {} probes, cap {}'.format(
                            k, seed, key, record.search_probe_complexity, cap))
                    if record.search_probe_complexity != record.insertion_probes:
                        raise PropertyViolation('k={} seed={} key={}: search {} differs from insertion {}'.format(
                            k, seed, key, record.search_probe_complexity, record.insertion_probes))
                    checked += 1
        return '{} insertions'.format(checked)

    def check_funnel_two_choice(self):
        """
        Fill every level and all of B with filler keys so that each insertion reaches C. Each key must then take the
        first empty slot of the emptier of its two buckets (ties to choice a) after the interleaved scan.
        """
        decisions = 0
        delta = Fraction(1, 1 << TWO_CHOICE_LOG2_INV_DELTA)
        for seed in range(TWO_CHOICE_SEEDS):
            table = FunnelTable(FunnelParams(TWO_CHOICE_N, delta, seed=trial_seed(0, seed)))
            layout = table.layout
            for filler, slot in enumerate(range(layout.c_offset)):
                table.occupy(slot, table.total_insertions + filler)

            for key in range(table.total_insertions):
                choice_a, choice_b = table.c_choices_for(key)
                fill_a, fill_b = table.c_bucket_fill(choice_a), table.c_bucket_fill(choice_b)
                try:
                    record = table.insert(key)
                except FunnelOverflow:
                    if min(fill_a, fill_b) < layout.c_bucket_size:
                        raise PropertyViolation('seed={} key={}: overflow with bucket fills {}, {}'.format(
                            seed, key, fill_a, fill_b))
                    break

                if fill_a <= fill_b:
                    expected_bucket, expected_probes = choice_a, 2 * fill_a + 1
                else:
                    expected_bucket, expected_probes = choice_b, 2 * fill_b + 2
                expected_slot = layout.c_bucket_offset(expected_bucket) + min(fill_a, fill_b)
                c_probes = record.component_probes[2]
                if record.tag != TAG_C or record.slot != expected_slot or c_probes != expected_probes:
                    raise PropertyViolation(
                        'seed={} key={}: fills {}, {} gave {} slot {} after {} C probes, expected slot {} after {}'
                        .format(seed, key, fill_a, fill_b, record.tag, record.slot, c_probes, expected_slot,
                                expected_probes))
                decisions += 1
        if decisions == 0:
            raise PropertyViolation('No insertion reached the two-choice buckets')
        return '{} two-choice decisions'.format(decisions)

    def check_funnel_b_load(self):
        for k in FUNNEL_CHECK_LOG2_INV_DELTAS:
            for seed in range(FUNNEL_CHECK_SEEDS):
                table = FunnelTable(FunnelParams(FUNNEL_CHECK_N, Fraction(1, 1 << k), seed=trial_seed(0, seed)))
                for key in range(table.total_insertions):
                    table.insert(key)
                if 2 * table.b_occupancy > table.layout.special_size + 1:
                    raise PropertyViolation('k={} seed={}: B holds {} keys, special array has {} slots'.format(
                        k, seed, table.b_occupancy, table.layout.special_size))

    def check_replay_lookup(self):
        n = self._conf['verify_replay_n']
        config_kwargs = {
            'probe_cap_factor': self._conf['probe_cap_factor'],
            'lookup_probe_cap': self._conf['lookup_probe_cap'],
        }
        for scheme in Scheme:
            config = TableConfig(scheme, n, REPLAY_LOG2_INV_DELTA, **config_kwargs)
            table = create_table(config, trial_seed(0, 0))
            recorded = Counter()
            for key in range(table.total_insertions):
                recorded[table.insert(key).search_probe_complexity] += 1

            looked_up = Counter()
            for key in range(table.total_insertions):
                result = table.lookup(key)
                if not result.found:
                    raise PropertyViolation('{}: inserted key {} not found'.format(scheme, key))
                looked_up[result.probes] += 1
            if looked_up != recorded:
                raise PropertyViolation('{}: lookup probe counts differ from the recorded ones'.format(scheme))
            if scheme is Scheme.ELASTIC:
                absent = table.lookup(n + 1, probe_cap=ABSENT_KEY_PROBE_CAP)
            else:
                absent = table.lookup(n + 1)
            if absent.found:
                raise PropertyViolation('{}: absent key {} reported found'.format(scheme, n + 1))

    def check_output_determinism(self):
        config = TableConfig(Scheme.UNIFORM, 256, 2)
        first = self._runner.run(config, 7, 2, keep_records=True)
        second = self._runner.run(config, 7, 2, keep_records=True)
        if [result.records for result in first] != [result.records for result in second]:
            raise PropertyViolation('Two runs with seed 7 produced different records')

    def _sweep(self, scheme, k, n=None, trials=None):
        n = n or self._conf['verify_sweep_n']
        trials = trials or self._conf['verify_sweep_trials']
        cache_key = (scheme, n, k, trials)
        if cache_key not in self._sweep_cache:
            config = TableConfig(
                scheme, n, k, probe_cap_factor=self._conf['probe_cap_factor'],
                lookup_probe_cap=self._conf['lookup_probe_cap'])
            results = self._runner.run(config, 0, trials)
            summary = metrics.aggregate_trials([result.sample() for result in results], config.total_insertions)
            self._sweep_cache[cache_key] = (results, summary)
        return self._sweep_cache[cache_key]

    def _amortized_ratio(self, scheme, k_high, k_low):
        return self._sweep(scheme, k_high)[1].amortized_mean / self._sweep(scheme, k_low)[1].amortized_mean

    def check_elastic_amortized_flatness(self):
        elastic_ratio = self._amortized_ratio(Scheme.ELASTIC, 8, 2)
        uniform_ratio = self._amortized_ratio(Scheme.UNIFORM, 8, 2)
        if elastic_ratio > 1.5 or uniform_ratio < 2.0:
            raise PropertyViolation('amortized ratio 2^-8 / 2^-2: elastic {:.3f} (max 1.5), uniform {:.3f} '
                                    '(min 2.0)'.format(elastic_ratio, uniform_ratio))
        return 'elastic {:.3f}, uniform {:.3f}'.format(elastic_ratio, uniform_ratio)

    def check_elastic_worst_case_growth(self):
        points = [(k, self._sweep(Scheme.ELASTIC, k)[1].worst_case_expected) for k in SWEEP_LOG2_INV_DELTAS]
        fit = metrics.growth_fit(points)
        ratio = points[-1][1] / points[0][1]
        if fit.r_squared < 0.8 or ratio > 6:
            raise PropertyViolation('linear fit r^2 {:.3f} (min 0.8), ratio {:.3f} (max 6)'.format(
                fit.r_squared, ratio))
        return 'r^2 {:.3f}, ratio {:.3f}'.format(fit.r_squared, ratio)

    def check_elastic_expensive_case_rarity(self):
        results = [result for k in SWEEP_LOG2_INV_DELTAS for result in self._sweep(Scheme.ELASTIC, k)[0]]
        fraction = sum(result.expensive_large_case for result in results) / len(results)
        if fraction > EXPENSIVE_CASE_MAX_FRACTION:
            raise PropertyViolation('{:.1%} of trials hit the expensive case in a large array'.format(fraction))
        return '{:.1%} of {} trials'.format(fraction, len(results))

    def check_funnel_sweep_probe_cap(self):
        n = self._conf['verify_sweep_n']
        for k in FUNNEL_FAILURE_LOG2_INV_DELTAS:
            cap = self._funnel_cap(n, k)
            for result in self._sweep(Scheme.FUNNEL, k)[0]:
                if len(result.search_probes) and int(result.search_probes.max()) > cap:
                    raise PropertyViolation('k={} trial {}: {} probes, cap {}'.format(
                        k, result.trial, int(result.search_probes.max()), cap))

    def check_funnel_failure_rate(self):
        failures = {k: self._sweep(Scheme.FUNNEL, k)[1].failure_count for k in FUNNEL_FAILURE_LOG2_INV_DELTAS}
        if any(failures.values()):
            raise PropertyViolation('failed trials by k: {}'.format(failures))

    def check_funnel_worst_case_growth(self):
        worst = [(k, self._sweep(Scheme.FUNNEL, k)[1].worst_case_expected) for k in FUNNEL_GROWTH_LOG2_INV_DELTAS]
        log_squared_fit = metrics.growth_fit([(k * k, value) for k, value in worst])
        inverse_delta_fit = metrics.growth_fit([(1 << k, value) for k, value in worst])
        if log_squared_fit.r_squared < inverse_delta_fit.r_squared:
            raise PropertyViolation('r^2 against log^2(1/delta) {:.3f} is below r^2 against 1/delta {:.3f}'.format(
                log_squared_fit.r_squared, inverse_delta_fit.r_squared))
        return 'r^2 {:.3f} vs {:.3f}'.format(log_squared_fit.r_squared, inverse_delta_fit.r_squared)

    def check_funnel_amortized_growth(self):
        ratio = self._amortized_ratio(Scheme.FUNNEL, 8, 2)
        if ratio > 4:
            raise PropertyViolation('amortized ratio 2^-8 / 2^-2 is {:.3f} (max 4)'.format(ratio))
        return 'ratio {:.3f}'.format(ratio)

    def check_funnel_level_fill(self):
        delta = Fraction(1, 1 << LEVEL_FILL_LOG2_INV_DELTA)
        checked = 0
        for result in self._sweep(Scheme.FUNNEL, LEVEL_FILL_LOG2_INV_DELTA)[0]:
            stats = result.funnel_stats
            for level, size in enumerate(stats.level_sizes, start=1):
                if stats.level_attempts[level - 1] < 2 * size:
                    continue
                free_fraction = Fraction(size - stats.level_occupancy[level - 1], size)
                if free_fraction >= delta / 4:
                    raise PropertyViolation('trial {} level {}: free fraction {} after {} attempts'.format(
                        result.trial, level, float(free_fraction), stats.level_attempts[level - 1]))
                checked += 1
        return '{} levels'.format(checked)

    def check_uniform_final_insertion(self):
        results, _ = self._sweep(
            Scheme.UNIFORM, 4, n=self._conf['verify_uniform_n'], trials=self._conf['verify_uniform_trials'])
        finals = np.array([result.search_probes[-1] for result in results if not result.failed], dtype=np.float64)
        mean = float(finals.mean())
        if not 0.85 * 16 <= mean <= 1.15 * 16:
            raise PropertyViolation('mean final probes {:.3f} outside [13.6, 18.4]'.format(mean))
        return 'mean {:.3f}'.format(mean)


_DEFAULT_CONF_VALUES = {
    'probe_cap_factor': 64,
    'lookup_probe_cap': 1 << 20,
    'verify_sweep_n': 1 << 18,
    'verify_sweep_trials': 20,
    'verify_uniform_n': 1 << 16,
    'verify_uniform_trials': 200,
    'verify_replay_n': 1 << 14,
}
