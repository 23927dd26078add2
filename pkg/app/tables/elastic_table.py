from fractions import Fraction
import heapq
import math

from app.common.insert_record import LookupResult, Scheme
from app.probing.phi import max_j_for, phi_encode
from app.probing.probe_source import ProbeSource
from app.tables.exceptions import (
    ArrayFullError, ExpensiveCaseCapExceeded, LayoutError, ProbeCapExceeded, TableInvariantError)
from app.tables.open_address_table import OpenAddressTable

DEFAULT_BUDGET_CONSTANT = 4
DEFAULT_PROBE_CAP_FACTOR = 64
DEFAULT_LOOKUP_PROBE_CAP = 1 << 20

CASE_BATCH_ZERO = 0
CASE_EITHER_ARRAY = 1
CASE_NEXT_ARRAY_ONLY = 2
CASE_EXPENSIVE = 3


def case_tag(case):
    return 'case{}'.format(case)


def quarter_free_fill(size):
    """
    :return: ceil(0.75 * size), the occupancy at which an array stops accepting overflow from its predecessor
    :rtype: int
    """
    return (3 * size + 3) // 4


def target_fill(size, delta):
    """
    :return: size - floor(delta * size / 2), the occupancy an array holds once its own batch is over
    :rtype: int
    """
    return size - (size * delta.numerator) // (2 * delta.denominator)


class ElasticParams(object):

    def __init__(self, n, delta, c=DEFAULT_BUDGET_CONSTANT, seed=0):
        """
        :param n: the capacity in slots
        :type n: int
        :param delta: the free fraction left after all insertions; its inverse must be a power of two
        :type delta: Fraction
        :param c: the constant of the probe budget f
        :type c: int
        :type seed: int
        """
        delta = Fraction(delta)
        if n < 2:
            raise LayoutError('Elastic hashing needs at least 2 slots, got {}.'.format(n))
        if delta.numerator != 1 or delta.denominator < 2 or delta.denominator & (delta.denominator - 1):
            raise LayoutError('delta must be 2^-k for an integer k >= 1, got {}.'.format(delta))
        if delta * n < 1:
            raise LayoutError('delta * n must be at least 1, got {} * {}.'.format(delta, n))
        if c < 1:
            raise LayoutError('The budget constant c must be at least 1, got {}.'.format(c))
        self.n = n
        self.delta = delta
        self.c = c
        self.seed = seed

    @property
    def total_insertions(self):
        return self.n - math.floor(self.delta * self.n)


class ElasticLayout(object):
    """
    Geometry of the subarrays A_1 ... A_L laid out back to back in one flat array.
    """
    def __init__(self, sizes):
        """
        :type sizes: list[int]
        """
        self.sizes = tuple(sizes)
        offsets = []
        position = 0
        for size in self.sizes:
            offsets.append(position)
            position += size
        self.offsets = tuple(offsets)

    @property
    def array_count(self):
        return len(self.sizes)

    @property
    def capacity(self):
        return sum(self.sizes)

    def size_of(self, array_index):
        """
        :param array_index: 1-based
        :type array_index: int
        """
        return self.sizes[array_index - 1]

    def offset_of(self, array_index):
        return self.offsets[array_index - 1]

    def __repr__(self):
        return 'ElasticLayout(sizes={})'.format(list(self.sizes))


def build_elastic_layout(n):
    """
    Split n slots into L = ceil(log2 n) arrays that roughly halve: sizes[i] = floor(n / 2^i) - floor(n / 2^(i+1))
    and the last array takes floor(n / 2^(L-1)). The sizes telescope to n and each is within one of half its
    predecessor.

    :type n: int
    :rtype: ElasticLayout
    """
    if n < 2:
        raise LayoutError('Elastic hashing needs at least 2 slots, got {}.'.format(n))
    array_count = (n - 1).bit_length()
    sizes = [(n >> i) - (n >> (i + 1)) for i in range(array_count - 1)]
    sizes.append(n >> (array_count - 1))
    return ElasticLayout(sizes)


class BatchPlan(object):

    def __init__(self, batch_sizes, total_insertions, complete_batches):
        """
        :param batch_sizes: |B_0|, |B_1|, ... truncated so that they sum to total_insertions
        :type batch_sizes: list[int]
        :type total_insertions: int
        :param complete_batches: how many leading batches run to their full planned size (the rest is the partial
            final batch, if any)
        :type complete_batches: int
        """
        self.batch_sizes = tuple(batch_sizes)
        self.total_insertions = total_insertions
        self.complete_batches = complete_batches

    @property
    def nonempty_batches(self):
        return sum(1 for size in self.batch_sizes if size > 0)

    def __repr__(self):
        return 'BatchPlan(batch_sizes={}, total_insertions={})'.format(list(self.batch_sizes), self.total_insertions)


def plan_batches(layout, delta):
    """
    Batch 0 fills A_1 to ceil(0.75 |A_1|). Batch i >= 1 takes A_i to its target fill and A_(i+1) to ceil(0.75
    |A_(i+1)|), which forces |B_i| = |A_i| - floor(delta |A_i| / 2) - ceil(0.75 |A_i|) + ceil(0.75 |A_(i+1)|).

    :type layout: ElasticLayout
    :type delta: Fraction
    :rtype: BatchPlan
    """
    delta = Fraction(delta)
    total_insertions = layout.capacity - math.floor(delta * layout.capacity)
    full_sizes = [quarter_free_fill(layout.sizes[0])]
    for i in range(1, layout.array_count):
        size, next_size = layout.sizes[i - 1], layout.sizes[i]
        full_sizes.append(max(0, target_fill(size, delta) - quarter_free_fill(size) + quarter_free_fill(next_size)))

    batch_sizes = []
    complete_batches = 0
    planned = 0
    for full_size in full_sizes:
        size = min(full_size, total_insertions - planned)
        batch_sizes.append(size)
        planned += size
        if size == full_size:
            complete_batches += 1
        if planned == total_insertions:
            break

    if planned != total_insertions:
        raise LayoutError('The batch schedule only covers {} of {} insertions for {}.'.format(
            planned, total_insertions, layout))
    return BatchPlan(batch_sizes, total_insertions, complete_batches)


def f_budget(eps, delta, c):
    """
    The number of probes an insertion may spend in A_i when A_i has free fraction eps:
    ceil(c * min(log2(1/eps)^2, log2(1/delta))).

    :type eps: Fraction
    :type delta: Fraction
    :type c: int
    :rtype: int
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ArrayFullError('No probe budget exists for an array with free fraction {}.'.format(eps))
    if eps > 1:
        raise ValueError('A free fraction cannot exceed 1, got {}.'.format(eps))
    fullness_term = math.log2(1 / eps) ** 2
    delta_term = math.log2(1 / Fraction(delta))
    return math.ceil(c * min(fullness_term, delta_term))


class ElasticTable(OpenAddressTable):
    """
    Elastic hashing: a non-greedy table that fills geometrically shrinking arrays in batches. During batch i an
    insertion spends a bounded budget of probes in A_i and otherwise falls through to the emptier A_(i+1), so its
    insertion cost can far exceed the probe position (search cost) it ends up at.

    Probe (i, j) of a key is the j-th probe into A_i, drawn from stream i of the probe source, and sits at position
    phi(i, j) of the key's one-dimensional probe sequence.
    """
    SCHEME = Scheme.ELASTIC

    def __init__(self, params, trial=0, probe_cap_factor=DEFAULT_PROBE_CAP_FACTOR,
                 lookup_probe_cap=DEFAULT_LOOKUP_PROBE_CAP):
        """
        :type params: ElasticParams
        :type trial: int
        :param probe_cap_factor: unbounded probe loops in A_i give up after probe_cap_factor * |A_i| * log2(n) probes
        :type probe_cap_factor: int
        :param lookup_probe_cap: probes a lookup makes before declaring a key absent
        :type lookup_probe_cap: int
        """
        self.params = params
        self.layout = build_elastic_layout(params.n)
        self.plan = plan_batches(self.layout, params.delta)
        super().__init__(params.n, self.plan.total_insertions, ProbeSource(params.seed), trial=trial)
        self._occupancy = [0] * self.layout.array_count
        self._probe_cap_factor = probe_cap_factor
        self._lookup_probe_cap = lookup_probe_cap
        self._log2_n = max(1, self.layout.array_count)
        self._batch = 0
        self._inserted_in_batch = 0
        self._cases_in_batch = set()

    @property
    def occupancy(self):
        """
        :return: the number of filled slots in each array, A_1 first
        :rtype: tuple[int]
        """
        return tuple(self._occupancy)

    @property
    def cursor(self):
        """
        :return: (current batch index, insertions completed in it)
        :rtype: (int, int)
        """
        return self._batch, self._inserted_in_batch

    def free_fraction(self, array_index):
        """
        :param array_index: 1-based
        :rtype: Fraction
        """
        size = self.layout.size_of(array_index)
        return Fraction(size - self._occupancy[array_index - 1], size)

    def expected_boundary_occupancy(self, batch):
        """
        The occupancy every array must have once batch `batch` is complete.

        :type batch: int
        :rtype: tuple[int]
        """
        sizes = self.layout.sizes
        expected = [0] * len(sizes)
        for array_index in range(1, batch + 1):
            expected[array_index - 1] = target_fill(sizes[array_index - 1], self.params.delta)
        if batch < len(sizes):
            expected[batch] = quarter_free_fill(sizes[batch])
        return tuple(expected)

    def insert(self, key):
        self._check_insertions_remaining()
        while self.plan.batch_sizes[self._batch] == 0:
            self._advance_batch()

        batch = self._batch
        insertion_probes = 0
        if batch == 0:
            case = CASE_BATCH_ZERO
            slot, array_index, j, insertion_probes = self._first_free(key, 1, ProbeCapExceeded)
        else:
            case, slot, array_index, j, insertion_probes = self._place_in_batch(key, batch)

        self._cases_in_batch.add(case)
        if {CASE_NEXT_ARRAY_ONLY, CASE_EXPENSIVE} <= self._cases_in_batch:
            raise TableInvariantError('Batch {} executed both case 2 and case 3.'.format(batch))

        self._place(slot, key)
        self._occupancy[array_index - 1] += 1
        self._inserted_in_batch += 1
        record = self._record(
            case_tag(case),
            search_probe_complexity=phi_encode((array_index, j)),
            insertion_probes=insertion_probes,
            slot=slot,
            batch=batch,
            subarray=array_index,
            subarray_probe=j,
        )
        if self._inserted_in_batch == self.plan.batch_sizes[batch] and self._count < self._total_insertions:
            self._advance_batch()
        elif self._inserted_in_batch == self.plan.batch_sizes[batch] and batch < self.plan.complete_batches:
            self._check_batch_boundary(batch)
        return record

    def _place_in_batch(self, key, batch):
        """
        Choose between A_batch and A_(batch+1) for one insertion of a batch i >= 1.

        :rtype: (int, int, int, int, int)
        """
        array_index, next_index = batch, batch + 1
        size = self.layout.size_of(array_index)
        free = size - self._occupancy[array_index - 1]
        array_at_target = self._occupancy[array_index - 1] >= target_fill(size, self.params.delta)
        next_at_target = self._occupancy[next_index - 1] >= quarter_free_fill(self.layout.size_of(next_index))

        if array_at_target:
            slot, placed_in, j, probes = self._first_free(key, next_index, ProbeCapExceeded)
            return CASE_NEXT_ARRAY_ONLY, slot, placed_in, j, probes

        if next_at_target:
            slot, placed_in, j, probes = self._first_free(key, array_index, ExpensiveCaseCapExceeded)
            return CASE_EXPENSIVE, slot, placed_in, j, probes

        budget = f_budget(Fraction(free, size), self.params.delta, self.params.c)
        offset = self.layout.offset_of(array_index)
        state = self._source.stream_state(key, array_index)
        for j in range(1, budget + 1):
            slot = offset + ProbeSource.slot_at(state, j, size)
            if self._slots[slot] is None:
                return CASE_EITHER_ARRAY, slot, array_index, j, j

        slot, placed_in, j, probes = self._first_free(key, next_index, ProbeCapExceeded)
        return CASE_EITHER_ARRAY, slot, placed_in, j, budget + probes

    def _first_free(self, key, array_index, cap_error):
        """
        Walk h_(i,1), h_(i,2), ... until a free slot of A_i turns up.

        :return: (slot, array_index, j, probes made)
        :rtype: (int, int, int, int)
        """
        size = self.layout.size_of(array_index)
        offset = self.layout.offset_of(array_index)
        state = self._source.stream_state(key, array_index)
        cap = min(self._probe_cap_factor * size * self._log2_n, max_j_for(array_index))
        for j in range(1, cap + 1):
            slot = offset + ProbeSource.slot_at(state, j, size)
            if self._slots[slot] is None:
                return slot, array_index, j, j
        raise cap_error('Key {} found no free slot in A_{} ({} of {} slots filled) within {} probes.'.format(
            key, array_index, self._occupancy[array_index - 1], size, cap))

    def _advance_batch(self):
        batch_size = self.plan.batch_sizes[self._batch]
        if batch_size > 0 and self._inserted_in_batch == batch_size:
            self._check_batch_boundary(self._batch)
        self._logger.debug('Trial {}: batch {} complete, occupancy {}.', self._trial, self._batch, self._occupancy)
        self._batch += 1
        self._inserted_in_batch = 0
        self._cases_in_batch = set()

    def _check_batch_boundary(self, batch):
        expected = self.expected_boundary_occupancy(batch)
        if tuple(self._occupancy) != expected:
            raise TableInvariantError('After batch {} the occupancy is {}, expected {}.'.format(
                batch, self._occupancy, list(expected)))

    def lookup(self, key, probe_cap=None):
        """
        Walk the key's one-dimensional probe sequence h_1, h_2, ... and stop at the key. Only positions that decode
        to a pair (i, j) with A_i in the layout are real probes, so they are visited in increasing phi order by
        merging the per-array sequences, which are each increasing in j.

        :param probe_cap: real probes to make before declaring the key absent (defaults to the table's cap)
        :type probe_cap: int | None
        :return: the found flag and the probe position reached
        :rtype: LookupResult
        """
        probe_cap = self._lookup_probe_cap if probe_cap is None else probe_cap
        states = [self._source.stream_state(key, array_index)
                  for array_index in range(1, self.layout.array_count + 1)]
        frontier = [(phi_encode((array_index, 1)), array_index, 1)
                    for array_index in range(1, self.layout.array_count + 1)]
        heapq.heapify(frontier)

        position = 0
        probes_made = 0
        while frontier and probes_made < probe_cap:
            position, array_index, j = heapq.heappop(frontier)
            probes_made += 1
            size = self.layout.size_of(array_index)
            slot = self.layout.offset_of(array_index) + ProbeSource.slot_at(states[array_index - 1], j, size)
            if self._slots[slot] == key:
                return LookupResult(True, position, slot)
            if j < max_j_for(array_index):
                heapq.heappush(frontier, (phi_encode((array_index, j + 1)), array_index, j + 1))

        return LookupResult(False, position)
