from fractions import Fraction

from genty import genty, genty_dataset

from app.common.insert_record import Scheme
from app.tables.exceptions import FunnelOverflow, LayoutError, TableInvariantError, TrialAbortedError
from app.tables.funnel_table import (
    TAG_B, TAG_C, FunnelLayout, FunnelParams, FunnelTable, _level_counts, build_funnel_layout, level_tag, log2_log2)
from test.framework.base_unit_test_case import BaseUnitTestCase

_FILLER_KEY = 10 ** 6


def _fill(table, key_count=None):
    """
    Insert keys 0, 1, ... until key_count keys are in or a trial-aborting overflow happens.
    """
    key_count = table.total_insertions if key_count is None else key_count
    records = []
    try:
        for key in range(key_count):
            records.append(table.insert(key))
    except TrialAbortedError:
        pass
    return records


@genty
class TestFunnelLayout(BaseUnitTestCase):

    @genty_dataset(
        tiny=(2, 1),
        sixty_four=(64, 3),
        four_thousand=(4096, 4),
        sixty_five_thousand=(1 << 16, 4),
        one_hundred_thirty_thousand=(1 << 17, 5),
    )
    def test_log2_log2_rounds_up_twice(self, n, expected):
        self.assertEqual(log2_log2(n), expected)

    def test_parameters_follow_log_of_inverse_delta(self):
        params = FunnelParams(4096, Fraction(1, 64))

        self.assertFalse(params.delta_clamped)
        self.assertEqual(params.log2_inv_delta, 6)
        self.assertEqual(params.alpha, 34)
        self.assertEqual(params.beta, 12)
        self.assertEqual(params.total_insertions, 4032)

    def test_large_delta_is_clamped_for_layout_only(self):
        params = FunnelParams(4096, Fraction(1, 4))

        self.assertTrue(params.delta_clamped)
        self.assertEqual(params.layout_delta, Fraction(1, 8))
        self.assertEqual(params.alpha, 22)
        self.assertEqual(params.beta, 6)
        self.assertEqual(params.total_insertions, 3072)
        self.assertTrue(build_funnel_layout(params).delta_clamped)

    def test_special_array_is_the_smallest_size_leaving_whole_buckets(self):
        layout = build_funnel_layout(FunnelParams(4096, Fraction(1, 64)))

        self.assertEqual(layout.special_size, 40)
        self.assertEqual(layout.special_b_size, 20)
        self.assertEqual(layout.special_c_size, 20)
        self.assertEqual(layout.c_bucket_size, 8)
        self.assertEqual(layout.c_bucket_count, 2)
        self.assertEqual(layout.c_waste, 4)

    def test_level_sizes_start_at_a_quarter_of_the_buckets_and_shrink_by_three_quarters(self):
        params = FunnelParams(1024, Fraction(1, 8))
        layout = build_funnel_layout(params)

        self.assertEqual(params.alpha, 22)
        self.assertEqual(params.beta, 6)
        self.assertEqual(layout.special_size, 64)
        self.assertEqual(layout.c_bucket_size, 8)
        self.assertEqual(layout.level_bucket_counts, (40, 30, 23, 18, 14, 11, 9, 7, 6, 2))
        self.assertEqual(layout.alpha, 10)
        self.assertEqual(sum(layout.level_bucket_counts), 160)

    def test_levels_shrink_and_fill_the_remaining_slots_exactly(self):
        params = FunnelParams(1 << 16, Fraction(1, 16))
        layout = build_funnel_layout(params)

        self.assertLessEqual(layout.alpha, params.alpha)
        self.assertEqual(sum(layout.level_bucket_counts) * layout.beta + layout.special_size, 1 << 16)
        self.assertEqual(layout.capacity, 1 << 16)
        counts = layout.level_bucket_counts
        for larger, smaller in zip(counts[:-2], counts[1:-1]):
            self.assertEqual(smaller, (3 * larger + 3) // 4)
        self.assertLessEqual(counts[-1], (3 * counts[-2] + 3) // 4)

    def test_the_last_allowed_level_absorbs_a_shortfall(self):
        self.assertEqual(_level_counts(100, 2), [25, 75])

    def test_slot_ranges_are_levels_then_b_then_c(self):
        layout = build_funnel_layout(FunnelParams(1 << 16, Fraction(1, 16)))

        self.assertEqual(layout.level_offsets[0], 0)
        self.assertEqual(layout.bucket_offset(2, 3), layout.level_size(1) + 3 * layout.beta)
        self.assertEqual(layout.b_offset, (1 << 16) - layout.special_size)
        self.assertEqual(layout.c_offset, layout.b_offset + layout.special_b_size)
        self.assertEqual(layout.c_bucket_offset(1), layout.c_offset + layout.c_bucket_size)

    def test_tail_ratio_violations_name_levels_with_a_thin_tail(self):
        layout = FunnelLayout(beta=2, level_bucket_counts=[10] + [1] * 11, special_size=4, c_bucket_size=2)

        self.assertEqual(layout.tail_ratio_violations, [1])

    @genty_dataset(
        special_array_too_small=(64, Fraction(1, 64)),
        delta_not_a_power_of_two=(4096, Fraction(3, 16)),
    )
    def test_infeasible_parameters_raise_layout_error(self, n, delta):
        with self.assertRaises(LayoutError):
            build_funnel_layout(FunnelParams(n, delta))


@genty
class TestFunnelTable(BaseUnitTestCase):

    def setUp(self):
        super().setUp()
        self.table = FunnelTable(FunnelParams(4096, Fraction(1, 16), seed=21))

    def test_insertions_never_exceed_the_probe_cap(self):
        records = _fill(self.table)

        self.assertGreater(len(records), 0)
        for record in records:
            self.assertEqual(record.scheme, Scheme.FUNNEL)
            self.assertLessEqual(record.insertion_probes, self.table.probe_cap)
            self.assertEqual(record.insertion_probes, record.search_probe_complexity)
            self.assertEqual(record.insertion_probes, sum(record.component_probes))

    def test_first_keys_land_in_the_first_level(self):
        record = self.table.insert(0)

        self.assertEqual(record.tag, level_tag(1))
        self.assertEqual(record.insertion_probes, 1)
        self.assertEqual(self.table.level_attempts[0], 1)

    def test_occupancy_counters_add_up_to_the_keys_placed(self):
        records = _fill(self.table)

        c_fill = sum(self.table.c_bucket_fill(bucket) for bucket in range(self.table.layout.c_bucket_count))
        self.assertEqual(sum(self.table.level_occupancy) + self.table.b_occupancy + c_fill, len(records))
        self.assertEqual(self.table.b_occupancy, sum(1 for record in records if record.tag == TAG_B))
        self.assertEqual(c_fill, sum(1 for record in records if record.tag == TAG_C))

    def test_a_key_reaches_level_i_plus_one_only_after_its_level_i_bucket_is_full(self):
        _fill(self.table)

        for level in range(1, self.table.layout.alpha):
            self.assertLessEqual(self.table.level_attempts[level], self.table.level_attempts[level - 1])

    def test_every_inserted_key_is_found_at_its_insertion_cost(self):
        records = _fill(self.table)

        for key, record in enumerate(records):
            result = self.table.lookup(key)
            self.assertTrue(result.found)
            self.assertEqual(result.probes, record.search_probe_complexity)
            self.assertEqual(result.slot, record.slot)

    def test_absent_key_stops_at_the_first_empty_slot(self):
        _fill(self.table, key_count=100)

        result = self.table.lookup(10 ** 6)

        self.assertFalse(result.found)
        self.assertIsNone(result.slot)

    def test_same_seed_builds_the_same_table(self):
        other = FunnelTable(FunnelParams(4096, Fraction(1, 16), seed=21))

        self.assertEqual(_fill(self.table, 2000), _fill(other, 2000))
        self.assertEqual(self.table.snapshot(), other.snapshot())

    def test_level_free_fraction_is_exact(self):
        self.table.insert(0)
        size = self.table.layout.level_size(1)

        self.assertEqual(self.table.level_free_fraction(1), Fraction(size - 1, size))
        self.assertEqual(self.table.level_free_fraction(2), Fraction(1))

    def _fill_levels(self):
        for slot in range(self.table.layout.b_offset):
            self.table.occupy(slot, _FILLER_KEY + slot)

    def _fill_b(self):
        for slot in range(self.table.layout.b_offset, self.table.layout.c_offset):
            self.table.occupy(slot, _FILLER_KEY + slot)

    def _fill_c_bucket(self, bucket, keys):
        offset = self.table.layout.c_bucket_offset(bucket)
        for position in range(keys):
            self.table.occupy(offset + position, _FILLER_KEY + offset + position)

    def _key_with_distinct_c_choices(self):
        return next(key for key in range(100) if len(set(self.table.c_choices_for(key))) == 2)

    def test_attempt_on_a_bucket_with_only_its_last_slot_empty_scans_the_whole_bucket(self):
        layout = self.table.layout
        offset = layout.bucket_offset(1, self.table.level_bucket_for(5, 1))
        for position in range(layout.beta - 1):
            self.table.occupy(offset + position, _FILLER_KEY + position)

        attempt = self.table.attempted_insertion(1, 5)

        self.assertEqual(attempt.slot, offset + layout.beta - 1)
        self.assertEqual(attempt.probes, layout.beta)

    def test_attempt_on_a_full_bucket_fails_after_beta_probes(self):
        layout = self.table.layout
        offset = layout.bucket_offset(1, self.table.level_bucket_for(5, 1))
        for position in range(layout.beta):
            self.table.occupy(offset + position, _FILLER_KEY + position)

        attempt = self.table.attempted_insertion(1, 5)

        self.assertFalse(attempt.succeeded)
        self.assertIsNone(attempt.slot)
        self.assertEqual(attempt.probes, layout.beta)

    def test_a_key_that_fails_every_level_takes_its_first_b_probe(self):
        layout = self.table.layout
        self._fill_levels()

        record = self.table.insert(0)

        self.assertEqual(record.tag, TAG_B)
        self.assertEqual(record.insertion_probes, layout.alpha * layout.beta + 1)
        self.assertEqual(record.component_probes, (layout.alpha * layout.beta, 1, 0))
        self.assertEqual(self.table.lookup(0).probes, record.search_probe_complexity)

    def test_a_key_that_reaches_c_fills_the_emptier_bucket(self):
        layout = self.table.layout
        self._fill_levels()
        self._fill_b()
        key = self._key_with_distinct_c_choices()
        choice_a, choice_b = self.table.c_choices_for(key)
        self._fill_c_bucket(choice_a, 2)
        self._fill_c_bucket(choice_b, 1)

        record = self.table.insert(key)

        self.assertEqual(record.tag, TAG_C)
        self.assertEqual(record.slot, layout.c_bucket_offset(choice_b) + 1)
        self.assertEqual(record.component_probes, (layout.alpha * layout.beta, log2_log2(4096), 4))
        self.assertEqual(self.table.c_bucket_fill(choice_b), 2)
        self.assertEqual(self.table.lookup(key).probes, record.search_probe_complexity)

    def test_equally_full_c_buckets_go_to_the_first_choice(self):
        self._fill_levels()
        self._fill_b()
        key = self._key_with_distinct_c_choices()
        choice_a, choice_b = self.table.c_choices_for(key)
        self._fill_c_bucket(choice_a, 1)
        self._fill_c_bucket(choice_b, 1)

        record = self.table.insert(key)

        self.assertEqual(record.slot, self.table.layout.c_bucket_offset(choice_a) + 1)
        self.assertEqual(record.component_probes[2], 3)

    def test_two_full_c_buckets_overflow(self):
        self._fill_levels()
        self._fill_b()
        key = self._key_with_distinct_c_choices()
        for bucket in self.table.c_choices_for(key):
            self._fill_c_bucket(bucket, self.table.layout.c_bucket_size)

        with self.assertRaises(FunnelOverflow):
            self.table.insert(key)

    def test_occupied_slots_do_not_count_as_insertions(self):
        self._fill_levels()

        self.assertEqual(self.table.count, 0)
        self.assertEqual(sum(self.table.level_occupancy), self.table.layout.b_offset)
        self.assertEqual(self.table.level_free_fraction(1), Fraction(0))

    @genty_dataset(
        skips_a_bucket_position=(1,),
        skips_to_the_end_of_a_c_bucket=(4095,),
    )
    def test_occupying_slots_out_of_bucket_order_raises(self, slot):
        with self.assertRaises(TableInvariantError):
            self.table.occupy(slot, _FILLER_KEY)

    def test_inserting_past_the_plan_raises(self):
        table = FunnelTable(FunnelParams(4096, Fraction(1, 16), seed=21))
        table._total_insertions = 1
        table.insert(0)

        with self.assertRaises(TableInvariantError):
            table.insert(1)
