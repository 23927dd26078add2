from enum import Enum
from typing import NamedTuple, Optional, Tuple


class Scheme(str, Enum):
    ELASTIC = 'elastic'
    FUNNEL = 'funnel'
    UNIFORM = 'uniform'

    def __str__(self):
        return self.value


class InsertRecord(NamedTuple):
    """
    The measured outcome of one insertion.

    search_probe_complexity is the position in the key's one-dimensional probe sequence at which the key now lives
    (what a query pays); insertion_probes is the number of slots the insertion examined. They coincide for the greedy
    schemes and differ for elastic hashing.

    The trailing fields are scheme-specific and stay None where they do not apply:
      - batch, subarray, subarray_probe: the elastic batch and the (array, within-array probe) pair used
      - component_probes: funnel probes spent in (levels, B, C)
    """
    trial: int
    insert_index: int
    scheme: Scheme
    tag: str
    search_probe_complexity: int
    insertion_probes: int
    slot: int
    batch: Optional[int] = None
    subarray: Optional[int] = None
    subarray_probe: Optional[int] = None
    component_probes: Optional[Tuple[int, int, int]] = None


class LookupResult(NamedTuple):
    """
    The outcome of a query. probes is the probe position at which the key was found, or the number of probes spent
    before giving up.
    """
    found: bool
    probes: int
    slot: Optional[int] = None
