from fractions import Fraction

from genty import genty, genty_dataset

from app.common.insert_record import Scheme
from app.probing.phi import phi_encode
from app.probing.probe_source import ProbeSource
from app.tables.elastic_table import (
    CASE_EITHER_ARRAY, CASE_EXPENSIVE, CASE_NEXT_ARRAY_ONLY, ElasticParams, ElasticTable, build_elastic_layout,
    case_tag, f_budget, plan_batches, quarter_free_fill, target_fill)
from app.tables.exceptions import ArrayFullError, LayoutError, ProbeCapExceeded, TableInvariantError
from test.framework.base_unit_test_case import BaseUnitTestCase


def _filled_table(n=64, delta=Fraction(1, 4), seed=5):
    table = ElasticTable(ElasticParams(n, delta, seed=seed))
    records = [table.insert(key) for key in range(table.total_insertions)]
    return table, records


def _probe_slots(table, key, array_index, count):
    state = table.source.stream_state(key, array_index)
    offset, size = table.layout.offset_of(array_index), table.layout.size_of(array_index)
    return [offset + ProbeSource.slot_at(state, j, size) for j in range(1, count + 1)]


def _first_free_probe(table, key, array_index):
    """
    Replay h_(i,1), h_(i,2), ... for key against the current slots.

    :return: (j, slot) of the first free probe
    """
    snapshot = table.snapshot()
    state = table.source.stream_state(key, array_index)
    offset, size = table.layout.offset_of(array_index), table.layout.size_of(array_index)
    j = 1
    while snapshot[offset + ProbeSource.slot_at(state, j, size)] is not None:
        j += 1
    return j, offset + ProbeSource.slot_at(state, j, size)


@genty
class TestElasticLayout(BaseUnitTestCase):

    @genty_dataset(
        power_of_two=(64, (32, 16, 8, 4, 2, 2)),
        not_a_power_of_two=(100, (50, 25, 13, 6, 3, 2, 1)),
        smallest=(2, (2,)),
    )
    def test_sizes_roughly_halve_and_sum_to_capacity(self, n, expected_sizes):
        layout = build_elastic_layout(n)

        self.assertEqual(layout.sizes, expected_sizes)
        self.assertEqual(layout.capacity, n)

    def test_offsets_are_contiguous(self):
        layout = build_elastic_layout(64)

        self.assertEqual(layout.offsets, (0, 32, 48, 56, 60, 62))
        self.assertEqual(layout.offset_of(3), 48)
        self.assertEqual(layout.size_of(1), 32)

    def test_each_array_is_within_one_of_half_its_predecessor(self):
        for n in (1 << 10, 1000, 12345):
            sizes = build_elastic_layout(n).sizes
            for previous, current in zip(sizes[:-2], sizes[1:-1]):
                self.assertLessEqual(abs(2 * current - previous), 1)

    def test_a_single_slot_has_no_layout(self):
        with self.assertRaises(LayoutError):
            build_elastic_layout(1)


@genty
class TestBatchPlan(BaseUnitTestCase):

    def test_fill_helpers_round_as_documented(self):
        self.assertEqual(quarter_free_fill(32), 24)
        self.assertEqual(quarter_free_fill(2), 2)
        self.assertEqual(target_fill(32, Fraction(1, 4)), 28)
        self.assertEqual(target_fill(4, Fraction(1, 4)), 4)

    def test_batches_cover_exactly_the_planned_insertions(self):
        plan = plan_batches(build_elastic_layout(64), Fraction(1, 4))

        self.assertEqual(plan.batch_sizes, (24, 16, 8))
        self.assertEqual(plan.total_insertions, 48)
        self.assertEqual(plan.complete_batches, 3)
        self.assertEqual(plan.nonempty_batches, 3)

    @genty_dataset(
        small_table_light_load=(1 << 8, 1),
        small_table_heavy_load=(1 << 8, 6),
        large_table=(1 << 16, 10),
    )
    def test_batch_count_grows_with_log_of_inverse_delta(self, n, log2_inv_delta):
        plan = plan_batches(build_elastic_layout(n), Fraction(1, 1 << log2_inv_delta))

        self.assertEqual(sum(plan.batch_sizes), n - (n >> log2_inv_delta))
        self.assertLessEqual(plan.nonempty_batches, log2_inv_delta + 2)


@genty
class TestProbeBudget(BaseUnitTestCase):

    @genty_dataset(
        half_free=(Fraction(1, 2), Fraction(1, 4), 4, 4),
        capped_by_delta=(Fraction(1, 16), Fraction(1, 4), 4, 8),
        larger_constant=(Fraction(1, 4), Fraction(1, 1024), 3, 12),
        empty_array=(Fraction(1), Fraction(1, 4), 4, 0),
    )
    def test_budget_is_c_times_the_smaller_log_term(self, eps, delta, c, expected_budget):
        self.assertEqual(f_budget(eps, delta, c), expected_budget)

    def test_full_array_has_no_budget(self):
        with self.assertRaises(ArrayFullError):
            f_budget(Fraction(0), Fraction(1, 4), 4)


@genty
class TestElasticParams(BaseUnitTestCase):

    @genty_dataset(
        one_slot=(1, Fraction(1, 2), 4),
        delta_not_a_power_of_two=(64, Fraction(3, 8), 4),
        delta_of_one=(64, Fraction(1), 4),
        too_few_free_slots=(4, Fraction(1, 8), 4),
        zero_budget_constant=(64, Fraction(1, 4), 0),
    )
    def test_invalid_parameters_raise_layout_error(self, n, delta, c):
        with self.assertRaises(LayoutError):
            ElasticParams(n, delta, c=c)


class TestElasticTable(BaseUnitTestCase):

    def test_filled_table_matches_the_last_batch_boundary(self):
        table, records = _filled_table()

        self.assertEqual(table.count, 48)
        self.assertEqual(table.occupancy, (28, 14, 6, 0, 0, 0))
        self.assertEqual(table.occupancy, table.expected_boundary_occupancy(2))
        self.assertEqual([record.insert_index for record in records], list(range(48)))

    def test_search_cost_is_the_phi_position_of_the_slot_used(self):
        _, records = _filled_table()

        for record in records:
            self.assertEqual(record.scheme, Scheme.ELASTIC)
            self.assertEqual(record.search_probe_complexity, phi_encode((record.subarray, record.subarray_probe)))
            self.assertGreaterEqual(record.insertion_probes, record.subarray_probe)

    def test_batch_zero_only_probes_the_first_array(self):
        _, records = _filled_table()

        for record in records[:24]:
            self.assertEqual(record.batch, 0)
            self.assertEqual(record.subarray, 1)
            self.assertEqual(record.tag, case_tag(0))

    def test_insertions_land_in_the_batch_array_or_its_successor(self):
        _, records = _filled_table(n=1 << 10, delta=Fraction(1, 16))

        for record in records:
            if record.batch > 0:
                self.assertIn(record.subarray, (record.batch, record.batch + 1))

    def test_every_inserted_key_is_found_at_its_recorded_position(self):
        table, records = _filled_table()

        for key, record in enumerate(records):
            result = table.lookup(key)
            self.assertTrue(result.found)
            self.assertEqual(result.probes, record.search_probe_complexity)
            self.assertEqual(result.slot, record.slot)

    def test_absent_key_is_not_found(self):
        table, _ = _filled_table()

        result = table.lookup(10 ** 6, probe_cap=2000)

        self.assertFalse(result.found)
        self.assertIsNone(result.slot)

    def test_same_seed_builds_the_same_table(self):
        first, first_records = _filled_table(seed=11)
        second, second_records = _filled_table(seed=11)
        third, _ = _filled_table(seed=12)

        self.assertEqual(first.snapshot(), second.snapshot())
        self.assertEqual(first_records, second_records)
        self.assertNotEqual(first.snapshot(), third.snapshot())

    def test_free_fraction_is_exact(self):
        table, _ = _filled_table()

        self.assertEqual(table.free_fraction(1), Fraction(4, 32))
        self.assertEqual(table.free_fraction(4), Fraction(1))

    def test_inserting_past_the_plan_raises(self):
        table, _ = _filled_table()

        with self.assertRaises(TableInvariantError):
            table.insert(10 ** 6)

    def test_probe_cap_aborts_the_insertion(self):
        table = ElasticTable(ElasticParams(64, Fraction(1, 4)), probe_cap_factor=0)

        with self.assertRaises(ProbeCapExceeded):
            table.insert(1)

    def test_mixing_next_array_and_expensive_insertions_in_one_batch_is_an_invariant_violation(self):
        table = ElasticTable(ElasticParams(64, Fraction(1, 4), seed=3))
        for key in range(24):
            table.insert(key)
        snapshot = table.snapshot()
        free_in_first = next(slot for slot in range(0, 32) if snapshot[slot] is None)
        free_in_second = next(slot for slot in range(32, 48) if snapshot[slot] is None)
        self.patch_object(table, '_place_in_batch', side_effect=[
            (CASE_NEXT_ARRAY_ONLY, free_in_second, 2, 1, 1),
            (CASE_EXPENSIVE, free_in_first, 1, 1, 1),
        ])

        table.insert(100)
        with self.assertRaises(TableInvariantError):
            table.insert(101)


class TestElasticInsertionCases(BaseUnitTestCase):
    """
    n=1024, delta=1/4: arrays of 512, 256, ... slots; batch 0 puts 384 keys in A_1, and during batch 1 the budget in
    A_1 is f(1/4) = 4 * min(4, 2) = 8 probes.
    """

    def setUp(self):
        super().setUp()
        self.table = ElasticTable(ElasticParams(1024, Fraction(1, 4), seed=9))
        for key in range(384):
            self.table.insert(key)

    def test_batch_zero_ends_with_the_first_array_three_quarters_full(self):
        self.assertEqual(self.table.cursor, (1, 0))
        self.assertEqual(self.table.occupancy[:2], (384, 0))
        self.assertEqual(f_budget(self.table.free_fraction(1), Fraction(1, 4), 4), 8)

    def test_key_whose_budget_in_the_batch_array_is_all_occupied_falls_through_to_the_next_array(self):
        snapshot = self.table.snapshot()
        key = next(key for key in range(10 ** 6, 10 ** 6 + 10000)
                   if all(snapshot[slot] is not None for slot in _probe_slots(self.table, key, 1, 8)))
        expected_j, expected_slot = _first_free_probe(self.table, key, 2)

        record = self.table.insert(key)

        self.assertEqual(record.tag, case_tag(CASE_EITHER_ARRAY))
        self.assertEqual((record.subarray, record.subarray_probe, record.slot), (2, expected_j, expected_slot))
        self.assertEqual(record.insertion_probes, 8 + expected_j)
        self.assertEqual(record.search_probe_complexity, phi_encode((2, expected_j)))
        self.assertEqual(self.table.cursor, (1, 1))

    def test_key_with_a_free_slot_within_its_budget_stays_in_the_batch_array(self):
        snapshot = self.table.snapshot()
        key = next(key for key in range(10 ** 6, 10 ** 6 + 10000)
                   if snapshot[_probe_slots(self.table, key, 1, 1)[0]] is None)

        record = self.table.insert(key)

        self.assertEqual((record.subarray, record.subarray_probe, record.insertion_probes), (1, 1, 1))
        self.assertEqual(record.search_probe_complexity, phi_encode((1, 1)))

    def test_once_the_batch_array_reaches_its_target_keys_skip_it(self):
        key = 384
        while self.table.occupancy[0] < target_fill(512, Fraction(1, 4)):
            self.table.insert(key)
            key += 1
        self.assertEqual(self.table.cursor[0], 1)
        self.assertLess(self.table.occupancy[1], quarter_free_fill(256))
        expected_j, expected_slot = _first_free_probe(self.table, key, 2)

        record = self.table.insert(key)

        self.assertEqual(record.tag, case_tag(CASE_NEXT_ARRAY_ONLY))
        self.assertEqual((record.subarray, record.subarray_probe, record.slot), (2, expected_j, expected_slot))
        self.assertEqual(record.insertion_probes, expected_j)


class TestElasticTableHistory(BaseUnitTestCase):

    def test_an_insertion_fills_one_empty_slot_and_leaves_every_other_slot_unchanged(self):
        table = ElasticTable(ElasticParams(256, Fraction(1, 4), seed=2))

        for key in range(table.total_insertions):
            before = table.snapshot()
            record = table.insert(key)
            after = table.snapshot()

            self.assertIsNone(before[record.slot])
            self.assertEqual(after[record.slot], key)
            self.assertEqual([slot for slot in range(256) if before[slot] != after[slot]], [record.slot])

    def test_cursor_follows_the_batch_plan(self):
        table = ElasticTable(ElasticParams(64, Fraction(1, 4), seed=5))
        cursors = {}
        for key in range(table.total_insertions):
            table.insert(key)
            cursors[table.count] = table.cursor

        self.assertEqual(table.plan.batch_sizes, (24, 16, 8))
        self.assertEqual(cursors[10], (0, 10))
        self.assertEqual(cursors[24], (1, 0))
        self.assertEqual(cursors[30], (1, 6))
        self.assertEqual(cursors[40], (2, 0))
        self.assertEqual(cursors[48], (2, 8))
