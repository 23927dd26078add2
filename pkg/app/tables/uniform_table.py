import math

from app.common.insert_record import LookupResult, Scheme
from app.probing.probe_source import ProbeSource
from app.tables.exceptions import LayoutError, ProbeCapExceeded
from app.tables.open_address_table import OpenAddressTable

UNIFORM_STREAM = 0
DEFAULT_PROBE_CAP_FACTOR = 64


class UniformTable(OpenAddressTable):
    """
    Greedy uniform probing: every probe is drawn uniformly (with replacement) from the whole array and a key takes the
    first empty slot it sees.
    """
    SCHEME = Scheme.UNIFORM

    def __init__(self, n, total_insertions, seed=0, trial=0, probe_cap_factor=DEFAULT_PROBE_CAP_FACTOR):
        """
        :type n: int
        :param total_insertions: the number of keys this table will take, at most n
        :type total_insertions: int
        :type seed: int
        :type trial: int
        :param probe_cap_factor: an insertion gives up after probe_cap_factor * n * log2(n) probes
        :type probe_cap_factor: int
        """
        if n < 1 or not 0 <= total_insertions <= n:
            raise LayoutError('A uniform table of {} slots cannot take {} insertions.'.format(n, total_insertions))
        super().__init__(n, total_insertions, ProbeSource(seed), trial=trial)
        self._probe_cap = probe_cap_factor * n * max(1, math.ceil(math.log2(n)))

    @property
    def probe_cap(self):
        return self._probe_cap

    def insert(self, key):
        self._check_insertions_remaining()
        state = self._source.stream_state(key, UNIFORM_STREAM)
        for probe_index in range(1, self._probe_cap + 1):
            slot = ProbeSource.slot_at(state, probe_index, self.capacity)
            if self._slots[slot] is None:
                self._place(slot, key)
                return self._record('uniform', probe_index, probe_index, slot)
        raise ProbeCapExceeded('Key {} found no free slot among {} in {} probes.'.format(
            key, self.capacity - self._count, self._probe_cap))

    def lookup(self, key):
        state = self._source.stream_state(key, UNIFORM_STREAM)
        for probe_index in range(1, self._probe_cap + 1):
            slot = ProbeSource.slot_at(state, probe_index, self.capacity)
            if self._slots[slot] == key:
                return LookupResult(True, probe_index, slot)
            if self._slots[slot] is None:
                return LookupResult(False, probe_index)
        return LookupResult(False, self._probe_cap)
