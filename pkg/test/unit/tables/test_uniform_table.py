import numpy as np

from app.common.insert_record import Scheme
from app.tables.exceptions import LayoutError, ProbeCapExceeded, TableInvariantError
from app.tables.uniform_table import UniformTable
from test.framework.base_unit_test_case import BaseUnitTestCase


class TestUniformTable(BaseUnitTestCase):

    def test_a_table_can_be_filled_completely(self):
        table = UniformTable(256, 256, seed=4)

        records = [table.insert(key) for key in range(256)]

        self.assertEqual(table.count, 256)
        self.assertNotIn(None, table.snapshot())
        self.assertEqual(sorted(record.slot for record in records), list(range(256)))

    def test_search_cost_equals_insertion_cost(self):
        table = UniformTable(256, 240, seed=4)

        for key in range(240):
            record = table.insert(key)
            self.assertEqual(record.scheme, Scheme.UNIFORM)
            self.assertEqual(record.tag, 'uniform')
            self.assertEqual(record.search_probe_complexity, record.insertion_probes)
            self.assertGreaterEqual(record.insertion_probes, 1)

    def test_first_insertion_takes_one_probe(self):
        record = UniformTable(64, 32, seed=9).insert(7)

        self.assertEqual(record.insertion_probes, 1)
        self.assertEqual(record.insert_index, 0)

    def test_every_inserted_key_is_found_at_its_insertion_cost(self):
        table = UniformTable(256, 240, seed=4)
        records = [table.insert(key) for key in range(240)]

        for key, record in enumerate(records):
            result = table.lookup(key)
            self.assertTrue(result.found)
            self.assertEqual(result.probes, record.insertion_probes)

    def test_absent_key_costs_what_its_insertion_would(self):
        table = UniformTable(256, 241, seed=4)
        for key in range(240):
            table.insert(key)

        result = table.lookup(999)
        record = table.insert(999)

        self.assertFalse(result.found)
        self.assertEqual(result.probes, record.insertion_probes)

    def test_probe_cap_aborts_the_insertion(self):
        table = UniformTable(4, 4, probe_cap_factor=0)

        with self.assertRaises(ProbeCapExceeded):
            table.insert(1)

    def test_inserting_past_the_plan_raises(self):
        table = UniformTable(8, 1)
        table.insert(1)

        with self.assertRaises(TableInvariantError):
            table.insert(2)

    def test_more_insertions_than_slots_is_rejected(self):
        with self.assertRaises(LayoutError):
            UniformTable(8, 9)

    def test_filling_the_last_free_slot_of_two_takes_two_probes_on_average(self):
        final_probes = []
        for seed in range(10000):
            table = UniformTable(2, 2, seed=seed)
            table.insert(0)
            final_probes.append(table.insert(1).insertion_probes)

        self.assertAlmostEqual(float(np.mean(final_probes)), 2.0, delta=0.1)
