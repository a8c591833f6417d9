"""Subset-indexed cache-aided interference scheme.

Subfiles are indexed by (transmitter subset, receiver subset) pairs; demanded
subfiles split further into packets indexed by the receiver set at which the
packet is zero-forced.  Delivery rounds rotate roles inside a receiver group
with the cyclic boxplus shift and serve t_T + t_R receivers per round.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import NamedTuple

from .errors import ConstraintViolationError, InvalidDemandError


def boxplus(i, j, m):
    """Cyclic index shift on [m]: 1 + ((i + j - 1) mod m)."""
    if m <= 0:
        raise ValueError(f"modulus must be positive, got {m}")
    return 1 + (i + j - 1) % m


class SubsetPacketId(NamedTuple):
    """A delivered packet: file, subfile indices, and zero-forcing receivers."""

    file: int
    tx_set: tuple        # transmitters caching the parent subfile
    cached_at: tuple     # receivers caching the parent subfile
    zero_forced_at: tuple

    @property
    def subfile(self):
        return (self.tx_set, self.cached_at)


class Round(NamedTuple):
    """One transmission round: participating transmitters and served entries."""

    transmitters: tuple
    entries: tuple  # ((receiver, packet), ...)


@dataclass(frozen=True)
class SubsetParams:
    K_T: int
    K_R: int
    N: int
    t_T: int
    t_R: int

    def __post_init__(self):
        checks = (
            (1 <= self.t_T <= self.K_T, f"1 <= t_T <= K_T violated: t_T={self.t_T}, K_T={self.K_T}"),
            (1 <= self.t_R <= self.K_R, f"1 <= t_R <= K_R violated: t_R={self.t_R}, K_R={self.K_R}"),
            (self.K_R >= self.t_T + self.t_R,
             f"K_R >= t_T + t_R violated: {self.K_R} < {self.t_T + self.t_R}"),
            (self.N >= 1, f"N >= 1 violated: N={self.N}"),
        )
        for ok, msg in checks:
            if not ok:
                raise ConstraintViolationError(msg)

    @property
    def F_C(self):
        return comb(self.K_T, self.t_T) * comb(self.K_R, self.t_R)

    @property
    def F_P(self):
        return comb(self.K_R - self.t_R - 1, self.t_T - 1)

    @property
    def F(self):
        return self.F_C * self.F_P

    @property
    def dof(self):
        return self.t_T + self.t_R

    @property
    def round_count(self):
        return (comb(self.K_T, self.t_T)
                * comb(self.K_R, self.t_T + self.t_R)
                * comb(self.t_T + self.t_R - 1, self.t_R))

    @property
    def tx_fraction(self):
        return Fraction(self.t_T, self.K_T)

    @property
    def rx_fraction(self):
        return Fraction(self.t_R, self.K_R)


@dataclass(frozen=True)
class CachingMap:
    """Which transmitters/receivers cache each subfile (file-independent)."""

    n_transmitters: int
    n_receivers: int
    subfiles: tuple
    subfile_transmitters: dict
    subfile_receivers: dict

    def transmitters_of(self, key):
        return self.subfile_transmitters[key]

    def receivers_of(self, key):
        return self.subfile_receivers[key]

    def transmitter_fraction(self):
        """Fraction of each file held per transmitter (M_T / N); None if nonuniform."""
        return self._uniform_fraction(self.subfile_transmitters, self.n_transmitters)

    def receiver_fraction(self):
        return self._uniform_fraction(self.subfile_receivers, self.n_receivers)

    def _uniform_fraction(self, table, n_nodes):
        loads = [0] * (n_nodes + 1)
        for nodes in table.values():
            for j in nodes:
                loads[j] += 1
        counts = set(loads[1:])
        if len(counts) != 1:
            return None
        return Fraction(counts.pop(), len(self.subfiles))


def build_subset_caching(params):
    """Caching map: transmitter j holds (T, R) iff j in T; receiver j iff j in R."""
    tx_sets = list(itertools.combinations(range(1, params.K_T + 1), params.t_T))
    rx_sets = list(itertools.combinations(range(1, params.K_R + 1), params.t_R))
    keys = tuple((t, r) for t in tx_sets for r in rx_sets)
    return CachingMap(
        n_transmitters=params.K_T,
        n_receivers=params.K_R,
        subfiles=keys,
        subfile_transmitters={(t, r): frozenset(t) for t, r in keys},
        subfile_receivers={(t, r): frozenset(r) for t, r in keys},
    )


def split_subset_packets(params, file, tx_set, cached_at, target):
    """Packets of one demanded subfile, one per zero-forcing receiver set."""
    if target in cached_at:
        raise ValueError(f"receiver {target} caches subfile {(tx_set, cached_at)}")
    excluded = set(cached_at) | {target}
    ground = [r for r in range(1, params.K_R + 1) if r not in excluded]
    return [
        SubsetPacketId(file, tuple(tx_set), tuple(cached_at), rp)
        for rp in itertools.combinations(ground, params.t_T - 1)
    ]


def validate_demands(demands, n_receivers, n_files):
    if set(demands) != set(range(1, n_receivers + 1)):
        raise InvalidDemandError(
            f"demands must cover receivers 1..{n_receivers} exactly"
        )
    bad = {r: d for r, d in demands.items() if not 1 <= d <= n_files}
    if bad:
        raise InvalidDemandError(f"demands outside 1..{n_files}: {bad}")


def enumerate_subset_rounds(params, demands):
    """Yield every delivery round, lexicographically over (T, U, rotation base).

    Within each receiver group the minimum element anchors the boxplus
    rotation, so the schedule is reproducible.
    """
    validate_demands(demands, params.K_R, params.N)
    n = params.t_T + params.t_R
    position_shifts = _position_shift_table(n, params.t_R)
    for tx_set in itertools.combinations(range(1, params.K_T + 1), params.t_T):
        for group in itertools.combinations(range(1, params.K_R + 1), n):
            for shifts in position_shifts:
                entries = []
                for serve_pos, cached_pos, zf_pos in shifts:
                    rx = group[serve_pos - 1]
                    cached = tuple(group[p - 1] for p in cached_pos)
                    zf = tuple(group[p - 1] for p in zf_pos)
                    entries.append(
                        (rx, SubsetPacketId(demands[rx], tx_set, cached, zf))
                    )
                yield Round(transmitters=tx_set, entries=tuple(entries))


def _position_shift_table(n, t_R):
    """Rotation tables over 1-based positions, shared by every receiver group.

    One table per base choice S (a t_R-subset of positions 2..n); each table
    row l gives (served position, cached positions, zero-forced positions).
    """
    tables = []
    for base in itertools.combinations(range(2, n + 1), t_R):
        rows = []
        for l in range(n):
            serve = boxplus(1, l, n)
            cached = tuple(sorted(boxplus(i, l, n) for i in base))
            cached_set = set(cached)
            zf = tuple(p for p in range(1, n + 1) if p != serve and p not in cached_set)
            rows.append((serve, cached, zf))
        tables.append(tuple(rows))
    return tuple(tables)


# Schedule enumeration and verification materialize per-packet state; refuse
# instances past desk scale.
_MAX_PACKETS = 20_000_000


@dataclass(frozen=True)
class SubsetScheme:
    """Parameters plus caching map, with the round/packet enumerators."""

    params: SubsetParams
    caching: CachingMap

    @classmethod
    def build(cls, params):
        missing = (params.K_R - params.t_R) * params.F
        if missing > _MAX_PACKETS:
            raise ValueError(
                f"instance delivers {missing} packets; schedule construction "
                f"is desk-scale only (limit {_MAX_PACKETS})"
            )
        return cls(params=params, caching=build_subset_caching(params))

    def rounds(self, demands):
        return enumerate_subset_rounds(self.params, demands)

    def missing_packets(self, demands):
        """All (receiver, packet) pairs a complete schedule must serve."""
        validate_demands(demands, self.params.K_R, self.params.N)
        for rx in range(1, self.params.K_R + 1):
            file = demands[rx]
            for tx_set, cached_at in self.caching.subfiles:
                if rx in cached_at:
                    continue
                for pkt in split_subset_packets(self.params, file, tx_set, cached_at, rx):
                    yield rx, pkt

    @cached_property
    def _slots(self):
        slots = {}
        for rx in range(1, self.params.K_R + 1):
            for tx_set, cached_at in self.caching.subfiles:
                if rx in cached_at:
                    continue
                for pkt in split_subset_packets(self.params, 0, tx_set, cached_at, rx):
                    slots[(rx, pkt.subfile, pkt.zero_forced_at)] = len(slots)
        return slots

    @property
    def slot_count(self):
        return len(self._slots)

    def slot_of(self, rx, pkt):
        return self._slots[(rx, pkt.subfile, pkt.zero_forced_at)]
