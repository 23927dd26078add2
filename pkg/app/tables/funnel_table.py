import bisect
from fractions import Fraction
import math

from app.common.insert_record import LookupResult, Scheme
from app.probing.probe_source import ProbeSource
from app.tables.exceptions import FunnelOverflow, LayoutError, TableInvariantError
from app.tables.open_address_table import OpenAddressTable

MAX_LAYOUT_DELTA = Fraction(1, 8)
TAIL_RATIO = Fraction(5, 2)
TAIL_RATIO_EXEMPT_LEVELS = 10

TAG_B = 'B'
TAG_C = 'C'


def level_tag(level):
    return 'level{}'.format(level)


def log2_log2(n):
    """
    :return: ceil(log2(ceil(log2 n))), floored at 1
    :rtype: int
    """
    log2_n = (n - 1).bit_length()
    return max(1, (log2_n - 1).bit_length())


class FunnelParams(object):

    def __init__(self, n, delta, seed=0):
        """
        :param n: the capacity in slots
        :type n: int
        :param delta: the free fraction left after all insertions, 2^-k
        :type delta: Fraction
        :type seed: int
        """
        delta = Fraction(delta)
        if delta.numerator != 1 or delta.denominator < 2 or delta.denominator & (delta.denominator - 1):
            raise LayoutError('delta must be 2^-k for an integer k >= 1, got {}.'.format(delta))
        if delta * n < 1:
            raise LayoutError('delta * n must be at least 1, got {} * {}.'.format(delta, n))
        self.n = n
        self.delta = delta
        self.seed = seed

    @property
    def delta_clamped(self):
        return self.delta > MAX_LAYOUT_DELTA

    @property
    def layout_delta(self):
        """
        The free fraction the layout is sized for. Larger requested fractions are treated as 1/8.
        """
        return min(self.delta, MAX_LAYOUT_DELTA)

    @property
    def log2_inv_delta(self):
        return self.layout_delta.denominator.bit_length() - 1

    @property
    def alpha(self):
        return 4 * self.log2_inv_delta + 10

    @property
    def beta(self):
        return 2 * self.log2_inv_delta

    @property
    def total_insertions(self):
        return self.n - math.floor(self.delta * self.n)


class FunnelLayout(object):
    """
    Levels A_1 ... A_alpha of beta-slot buckets, followed by the special array split into B (uniform probing) and C
    (two-choice buckets). Slot ranges are contiguous in that order.
    """
    def __init__(self, beta, level_bucket_counts, special_size, c_bucket_size, delta_clamped=False):
        self.beta = beta
        self.level_bucket_counts = tuple(level_bucket_counts)
        self.special_size = special_size
        self.special_b_size = (special_size + 1) // 2
        self.special_c_size = special_size // 2
        self.c_bucket_size = c_bucket_size
        self.c_bucket_count = self.special_c_size // c_bucket_size
        self.c_waste = self.special_c_size % c_bucket_size
        self.delta_clamped = delta_clamped

        offsets = []
        position = 0
        for bucket_count in self.level_bucket_counts:
            offsets.append(position)
            position += bucket_count * beta
        self.level_offsets = tuple(offsets)
        self.b_offset = position
        self.c_offset = position + self.special_b_size

    @property
    def alpha(self):
        return len(self.level_bucket_counts)

    @property
    def capacity(self):
        return self.c_offset + self.special_c_size

    def level_size(self, level):
        return self.level_bucket_counts[level - 1] * self.beta

    def bucket_offset(self, level, bucket):
        return self.level_offsets[level - 1] + bucket * self.beta

    def c_bucket_offset(self, bucket):
        return self.c_offset + bucket * self.c_bucket_size

    @property
    def tail_ratio_violations(self):
        """
        Levels i <= alpha - 10 whose successors together hold at most 2.5 |A_i| slots. The ideal geometric sizes never
        violate this; rounded tiny levels at small n can.

        :rtype: list[int]
        """
        violations = []
        sizes = [count * self.beta for count in self.level_bucket_counts]
        for level in range(1, self.alpha - TAIL_RATIO_EXEMPT_LEVELS + 1):
            if sum(sizes[level:]) <= TAIL_RATIO * sizes[level - 1]:
                violations.append(level)
        return violations

    def __repr__(self):
        return 'FunnelLayout(beta={}, levels={}, special_size={}, c_buckets={}x{})'.format(
            self.beta, list(self.level_bucket_counts), self.special_size, self.c_bucket_count, self.c_bucket_size)


def _level_counts(total_buckets, max_levels):
    """
    Bucket counts for the levels, largest first: a_1 = ceil(total / 4), then a_{i+1} = ceil(3 a_i / 4). Levels stop
    once the counts reach total_buckets; the last level takes whatever remains, so it may be smaller than the ratio
    asks for. If max_levels levels still fall short, the last one grows to absorb the difference.
    """
    if total_buckets < 1:
        raise LayoutError('The levels need at least one bucket, got {}.'.format(total_buckets))
    counts = []
    next_count = (total_buckets + 3) // 4
    remaining = total_buckets
    while remaining > 0 and len(counts) < max_levels:
        count = min(next_count, remaining)
        counts.append(count)
        remaining -= count
        next_count = (3 * count + 3) // 4
    counts[-1] += remaining
    return counts


def build_funnel_layout(params):
    """
    :type params: FunnelParams
    :rtype: FunnelLayout
    """
    n = params.n
    delta = params.layout_delta
    alpha, beta = params.alpha, params.beta

    smallest = math.ceil(delta * n / 2)
    largest = math.floor(3 * delta * n / 4)
    special_size = next((size for size in range(smallest, largest + 1) if (n - size) % beta == 0), None)
    if special_size is None or smallest < 2:
        raise LayoutError('No special array size in [{}, {}] leaves a multiple of {} slots for n={}.'.format(
            smallest, largest, beta, n))

    level_counts = _level_counts((n - special_size) // beta, alpha)
    c_bucket_size = 2 * log2_log2(n)
    return FunnelLayout(beta, level_counts, special_size, c_bucket_size, delta_clamped=params.delta_clamped)


class AttemptResult(object):
    __slots__ = ('slot', 'probes')

    def __init__(self, slot, probes):
        self.slot = slot
        self.probes = probes

    @property
    def succeeded(self):
        return self.slot is not None


class FunnelTable(OpenAddressTable):
    """
    Funnel hashing: a greedy table that tries one bucket in each of alpha shrinking levels, then log log n uniform
    probes into B, then the emptier of two buckets in C.

    Level i draws its bucket from stream i of the probe source; B uses stream alpha + 1 and C uses streams alpha + 2
    (choice a) and alpha + 3 (choice b).
    """
    SCHEME = Scheme.FUNNEL

    def __init__(self, params, trial=0):
        """
        :type params: FunnelParams
        :type trial: int
        """
        self.params = params
        self.layout = build_funnel_layout(params)
        super().__init__(self.layout.capacity, params.total_insertions, ProbeSource(params.seed), trial=trial)
        self._b_probe_cap = log2_log2(params.n)
        self._level_bucket_fill = [[0] * count for count in self.layout.level_bucket_counts]
        self._level_attempts = [0] * self.layout.alpha
        self._level_occupancy = [0] * self.layout.alpha
        self._b_occupancy = 0
        self._c_bucket_fill = [0] * self.layout.c_bucket_count

    @property
    def probe_cap(self):
        """
        The most probes any insertion can make.
        """
        return self.layout.alpha * self.layout.beta + self._b_probe_cap + 2 * self.layout.c_bucket_size

    @property
    def level_attempts(self):
        """
        :return: attempted insertions per level, A_1 first
        :rtype: tuple[int]
        """
        return tuple(self._level_attempts)

    @property
    def level_occupancy(self):
        return tuple(self._level_occupancy)

    @property
    def b_occupancy(self):
        return self._b_occupancy

    def level_free_fraction(self, level):
        size = self.layout.level_size(level)
        return Fraction(size - self._level_occupancy[level - 1], size)

    def c_bucket_fill(self, bucket):
        return self._c_bucket_fill[bucket]

    def occupy(self, slot, key):
        """
        Put key in slot without probing, to set up a table state (full levels, a saturated B, C buckets at given
        fills) for the verification suite and tests. Level and C buckets fill front to back, so a bucket's slots must
        be occupied in order. The key does not count toward the planned insertions.

        :type slot: int
        :type key: int
        """
        layout = self.layout
        if self._slots[slot] is not None:
            raise TableInvariantError('Slot {} already holds key {}.'.format(slot, self._slots[slot]))
        if slot < layout.b_offset:
            level = bisect.bisect_right(layout.level_offsets, slot)
            bucket, position = divmod(slot - layout.level_offsets[level - 1], layout.beta)
            self._check_bucket_order(slot, position, self._level_bucket_fill[level - 1][bucket])
            self._level_bucket_fill[level - 1][bucket] += 1
            self._level_occupancy[level - 1] += 1
        elif slot < layout.c_offset:
            self._b_occupancy += 1
        else:
            bucket, position = divmod(slot - layout.c_offset, layout.c_bucket_size)
            if bucket >= layout.c_bucket_count:
                raise TableInvariantError('Slot {} is left over after the last whole C bucket.'.format(slot))
            self._check_bucket_order(slot, position, self._c_bucket_fill[bucket])
            self._c_bucket_fill[bucket] += 1
        self._slots[slot] = key

    @staticmethod
    def _check_bucket_order(slot, position, fill):
        if position != fill:
            raise TableInvariantError('Slot {} is position {} of a bucket holding {} keys.'.format(
                slot, position, fill))

    def level_bucket_for(self, key, level):
        return self._source.probe(key, level, 1, self.layout.level_bucket_counts[level - 1])

    def c_choices_for(self, key):
        """
        :return: the two C buckets the key may use, choice a first
        :rtype: (int, int)
        """
        alpha, count = self.layout.alpha, self.layout.c_bucket_count
        return self._source.probe(key, alpha + 2, 1, count), self._source.probe(key, alpha + 3, 1, count)

    def attempted_insertion(self, level, key):
        """
        Scan the key's bucket in `level` in slot order and claim its first empty slot.

        :type level: int
        :type key: int
        :return: the claimed slot (None if the bucket was full) and the slots scanned
        :rtype: AttemptResult
        """
        bucket = self.level_bucket_for(key, level)
        self._level_attempts[level - 1] += 1
        fill = self._level_bucket_fill[level - 1][bucket]
        if fill >= self.layout.beta:
            return AttemptResult(None, self.layout.beta)

        slot = self.layout.bucket_offset(level, bucket) + fill
        self._place(slot, key)
        self._level_bucket_fill[level - 1][bucket] += 1
        self._level_occupancy[level - 1] += 1
        return AttemptResult(slot, fill + 1)

    def insert(self, key):
        self._check_insertions_remaining()
        level_probes = 0
        for level in range(1, self.layout.alpha + 1):
            attempt = self.attempted_insertion(level, key)
            level_probes += attempt.probes
            if attempt.succeeded:
                return self._finish(level_tag(level), attempt.slot, (level_probes, 0, 0))

        b_probes = 0
        state = self._source.stream_state(key, self.layout.alpha + 1)
        for probe_index in range(1, self._b_probe_cap + 1):
            b_probes += 1
            slot = self.layout.b_offset + ProbeSource.slot_at(state, probe_index, self.layout.special_b_size)
            if self._slots[slot] is None:
                self._place(slot, key)
                self._b_occupancy += 1
                return self._finish(TAG_B, slot, (level_probes, b_probes, 0))

        slot, c_probes = self._two_choice_slot(key)
        if slot is None:
            raise FunnelOverflow('Key {} found both of its C buckets full ({} buckets of {} slots).'.format(
                key, self.layout.c_bucket_count, self.layout.c_bucket_size))
        self._place(slot, key)
        self._c_bucket_fill[(slot - self.layout.c_offset) // self.layout.c_bucket_size] += 1
        return self._finish(TAG_C, slot, (level_probes, b_probes, c_probes))

    def _two_choice_slot(self, key):
        """
        Scan a_1, b_1, a_2, b_2, ... and stop at the first empty slot. Buckets fill front to back, so this lands in
        the emptier bucket, with ties going to a.

        :return: the first empty slot (None if both buckets are full) and the slots scanned
        :rtype: (int | None, int)
        """
        if self.layout.c_bucket_count == 0:
            return None, 0
        probes = 0
        choices = self.c_choices_for(key)
        for position in range(self.layout.c_bucket_size):
            for bucket in choices:
                probes += 1
                slot = self.layout.c_bucket_offset(bucket) + position
                if self._slots[slot] is None:
                    return slot, probes
        return None, probes

    def _finish(self, tag, slot, component_probes):
        probes = sum(component_probes)
        if probes > self.probe_cap:
            raise TableInvariantError('Insertion made {} probes, above the cap of {}.'.format(probes, self.probe_cap))
        return self._record(tag, probes, probes, slot, component_probes=component_probes)

    def lookup(self, key):
        """
        Replay the insertion probe order. A query stops at the key or at the first empty slot it meets, since an
        insertion of the key would have claimed that slot.

        :rtype: LookupResult
        """
        probes = 0
        for level in range(1, self.layout.alpha + 1):
            offset = self.layout.bucket_offset(level, self.level_bucket_for(key, level))
            for position in range(self.layout.beta):
                probes += 1
                contents = self._slots[offset + position]
                if contents == key:
                    return LookupResult(True, probes, offset + position)
                if contents is None:
                    return LookupResult(False, probes)

        state = self._source.stream_state(key, self.layout.alpha + 1)
        for probe_index in range(1, self._b_probe_cap + 1):
            probes += 1
            slot = self.layout.b_offset + ProbeSource.slot_at(state, probe_index, self.layout.special_b_size)
            if self._slots[slot] == key:
                return LookupResult(True, probes, slot)
            if self._slots[slot] is None:
                return LookupResult(False, probes)

        if self.layout.c_bucket_count == 0:
            return LookupResult(False, probes)
        choices = self.c_choices_for(key)
        for position in range(self.layout.c_bucket_size):
            for bucket in choices:
                probes += 1
                slot = self.layout.c_bucket_offset(bucket) + position
                if self._slots[slot] == key:
                    return LookupResult(True, probes, slot)
                if self._slots[slot] is None:
                    return LookupResult(False, probes)
        return LookupResult(False, probes)
