from collections import namedtuple

# The encoded value must fit a signed 64-bit integer.
MAX_PHI_BITS = 63


class ProbeIndexPair(namedtuple('ProbeIndexPair', ['i', 'j'])):
    """
    A position in the two-dimensional probe sequence: probe number j (1-based) into array i (1-based).
    """
    __slots__ = ()

    def __new__(cls, i, j):
        if i < 1 or j < 1:
            raise PhiRangeError('Probe index pairs must be positive, got ({}, {}).'.format(i, j))
        return super().__new__(cls, i, j)


def phi_bit_length(i, j):
    """
    :type i: int
    :type j: int
    :return: the number of bits of phi_encode(i, j)
    :rtype: int
    """
    return i.bit_length() + 2 * j.bit_length() + 1


def max_j_for(i):
    """
    The largest j such that (i, j) can still be encoded.

    :type i: int
    :rtype: int
    """
    spare_bits = MAX_PHI_BITS - 1 - i.bit_length()
    return (1 << (spare_bits // 2)) - 1


def phi_encode(pair):
    """
    Linearize a two-dimensional probe position. The bits of j are each preceded by a 1, then a single 0 separates
    them from the bits of i:

        1 b_1 1 b_2 ... 1 b_q 0 a_1 a_2 ... a_p      (most significant bit first)

    so phi(i, j) < 16 * i * j ** 2.

    :type pair: ProbeIndexPair | (int, int)
    :rtype: int
    """
    i, j = pair
    if i < 1 or j < 1 or phi_bit_length(i, j) > MAX_PHI_BITS:
        raise PhiRangeError('Cannot encode ({}, {}) in {} bits.'.format(i, j, MAX_PHI_BITS))

    encoded = 0
    for shift in range(j.bit_length() - 1, -1, -1):
        encoded = (encoded << 2) | 0b10 | ((j >> shift) & 1)
    encoded <<= 1
    return (encoded << i.bit_length()) | i


def phi_decode(encoded):
    """
    Invert phi_encode().

    :type encoded: int
    :return: the pair that encodes to this value, or None if no pair does
    :rtype: ProbeIndexPair | None
    """
    if encoded < 1:
        return None

    width = encoded.bit_length()
    position = width - 1  # bit index of the next unread bit
    j = 0
    j_bits = 0
    while True:
        if position < 0:
            return None
        if not (encoded >> position) & 1:
            position -= 1
            break
        if position == 0:
            return None
        j = (j << 1) | ((encoded >> (position - 1)) & 1)
        j_bits += 1
        position -= 2

    if position < 0 or j == 0 or j.bit_length() != j_bits:
        return None
    i = encoded & ((1 << (position + 1)) - 1)
    if i.bit_length() != position + 1:
        return None
    return ProbeIndexPair(i, j)


class PhiRangeError(ValueError):
    """
    Raised when a probe index pair is not positive or its encoding would not fit in MAX_PHI_BITS bits.
    """
