MASK64 = (1 << 64) - 1

_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_SEED_SALT = 0x5851F42D4C957F2D
_STREAM_SALT = 0xD1B54A32D192ED03
_TRIAL_SALT = 0xA0761D6478BD642F


def mix64(value):
    """
    The splitmix64 finalizer: a bijective 64-bit avalanche mix.

    :type value: int
    :rtype: int
    """
    z = (value + _GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed, trial):
    """
    Derive the seed of one trial from the run's master seed.

    :type master_seed: int
    :type trial: int
    :rtype: int
    """
    return mix64((master_seed & MASK64) ^ mix64((trial * _TRIAL_SALT) & MASK64))


class ProbeSource(object):
    """
    Deterministic pseudo-random probe generator. A probe is a pure function of (master_seed, key, stream_id,
    probe_index); the modulus only folds the 64-bit mix into the requested range.

    Each table array gets its own stream so that probes into different arrays are independent. Callers on a hot
    path fetch the per-(key, stream) state once with stream_state() and then call slot_at() for each probe index.
    """
    __slots__ = ('_master_seed', '_seed_state')

    def __init__(self, master_seed):
        """
        :type master_seed: int
        """
        self._master_seed = master_seed & MASK64
        self._seed_state = mix64(self._master_seed ^ _SEED_SALT)

    @property
    def master_seed(self):
        return self._master_seed

    def stream_state(self, key, stream_id):
        """
        :type key: int
        :type stream_id: int
        :rtype: int
        """
        keyed = mix64(self._seed_state ^ (key & MASK64))
        return mix64(keyed ^ ((stream_id * _STREAM_SALT) & MASK64))

    @staticmethod
    def slot_at(state, probe_index, modulus):
        """
        :param state: the value returned by stream_state() for the key and stream being probed
        :type state: int
        :type probe_index: int
        :type modulus: int
        :rtype: int
        """
        return mix64((state + probe_index * _GOLDEN_GAMMA) & MASK64) % modulus

    def probe(self, key, stream_id, probe_index, modulus):
        """
        Return the slot in [0, modulus) addressed by the probe_index-th probe of key in the given stream.

        :type key: int
        :type stream_id: int
        :type probe_index: int
        :type modulus: int
        :rtype: int
        """
        if modulus < 1:
            raise ValueError('The probe modulus must be at least 1, got {}.'.format(modulus))
        return self.slot_at(self.stream_state(key, stream_id), probe_index, modulus)

    def __eq__(self, other):
        return isinstance(other, ProbeSource) and other.master_seed == self.master_seed

    def __hash__(self):
        return hash(self._master_seed)

    def __repr__(self):
        return 'ProbeSource(master_seed={:#x})'.format(self._master_seed)


def probe(source, key, stream_id, probe_index, modulus):
    """
    Module-level form of ProbeSource.probe().

    :type source: ProbeSource
    :rtype: int
    """
    return source.probe(key, stream_id, probe_index, modulus)
