from fractions import Fraction
from typing import NamedTuple

from app.common.insert_record import Scheme
from app.tables.elastic_table import (
    DEFAULT_BUDGET_CONSTANT, DEFAULT_LOOKUP_PROBE_CAP, DEFAULT_PROBE_CAP_FACTOR, ElasticParams, ElasticTable)
from app.tables.funnel_table import FunnelParams, FunnelTable
from app.tables.uniform_table import UniformTable


class TableConfig(NamedTuple):
    """
    Everything needed to build one table. Resolved once in the parent process and shipped by value to workers.
    """
    scheme: Scheme
    n: int
    log2_inv_delta: int
    c: int = DEFAULT_BUDGET_CONSTANT
    probe_cap_factor: int = DEFAULT_PROBE_CAP_FACTOR
    lookup_probe_cap: int = DEFAULT_LOOKUP_PROBE_CAP

    @property
    def delta(self):
        return Fraction(1, 1 << self.log2_inv_delta)

    @property
    def total_insertions(self):
        return self.n - self.n // (1 << self.log2_inv_delta)


def _create_elastic(config, seed, trial):
    return ElasticTable(
        ElasticParams(config.n, config.delta, c=config.c, seed=seed),
        trial=trial,
        probe_cap_factor=config.probe_cap_factor,
        lookup_probe_cap=config.lookup_probe_cap,
    )


def _create_funnel(config, seed, trial):
    return FunnelTable(FunnelParams(config.n, config.delta, seed=seed), trial=trial)


def _create_uniform(config, seed, trial):
    return UniformTable(
        config.n, config.total_insertions, seed=seed, trial=trial, probe_cap_factor=config.probe_cap_factor)


_factories_by_scheme = {
    Scheme.ELASTIC: _create_elastic,
    Scheme.FUNNEL: _create_funnel,
    Scheme.UNIFORM: _create_uniform,
}


def create_table(config, seed, trial=0):
    """
    :type config: TableConfig
    :param seed: the trial seed the table's probe source is keyed with
    :type seed: int
    :type trial: int
    :rtype: app.tables.open_address_table.OpenAddressTable
    """
    return _factories_by_scheme[Scheme(config.scheme)](config, seed, trial)
