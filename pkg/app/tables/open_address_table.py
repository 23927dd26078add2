from app.common.insert_record import InsertRecord
from app.tables.exceptions import TableInvariantError
from app.util import log


class OpenAddressTable(object):
    """
    State shared by every scheme: a flat slot array in which a slot, once filled, never changes. Subclasses decide
    where keys go (insert) and how they are found again (lookup).
    """
    SCHEME = None

    def __init__(self, capacity, total_insertions, source, trial=0):
        """
        :param capacity: the number of slots, n
        :type capacity: int
        :param total_insertions: the number of insertions the table is built to accept, n - floor(delta * n)
        :type total_insertions: int
        :type source: app.probing.probe_source.ProbeSource
        :param trial: the trial this table belongs to; copied into every InsertRecord
        :type trial: int
        """
        self._logger = log.get_logger(__name__)
        self._slots = [None] * capacity
        self._count = 0
        self._total_insertions = total_insertions
        self._source = source
        self._trial = trial

    @property
    def capacity(self):
        return len(self._slots)

    @property
    def count(self):
        return self._count

    @property
    def total_insertions(self):
        return self._total_insertions

    @property
    def source(self):
        return self._source

    def snapshot(self):
        """
        :return: a copy of the slot array
        :rtype: tuple[int | None]
        """
        return tuple(self._slots)

    def insert(self, key):
        """
        :type key: int
        :rtype: InsertRecord
        """
        raise NotImplementedError

    def lookup(self, key):
        """
        :type key: int
        :rtype: app.common.insert_record.LookupResult
        """
        raise NotImplementedError

    def _check_insertions_remaining(self):
        if self._count >= self._total_insertions:
            raise TableInvariantError('The {} table already holds its {} planned insertions.'.format(
                self.SCHEME, self._total_insertions))

    def _place(self, slot, key):
        if self._slots[slot] is not None:
            raise TableInvariantError('Slot {} already holds key {}; refusing to overwrite it with key {}.'.format(
                slot, self._slots[slot], key))
        self._slots[slot] = key
        self._count += 1

    def _record(self, tag, search_probe_complexity, insertion_probes, slot, **scheme_fields):
        """
        Build the record of the insertion that was just placed. Must be called after _place().
        """
        return InsertRecord(
            trial=self._trial,
            insert_index=self._count - 1,
            scheme=self.SCHEME,
            tag=tag,
            search_probe_complexity=search_probe_complexity,
            insertion_probes=insertion_probes,
            slot=slot,
            **scheme_fields
        )
