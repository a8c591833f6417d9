"""Projective-geometry cache-aided interference scheme.

Transmitters and receivers are indexed by fixed-base superspaces in GF(q)^k_t
and GF(q)^k_r; subfiles by sets of those subspaces whose sum reaches a target
dimension.  Delivery mirrors the subset scheme: receiver groups are the
independent sets of size m_r + t_T + 1, rotated with the boxplus shift.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

from .errors import ConstraintViolationError, NonIntegerCountError
from .gf import make_field
from .projgeom import (
    Subspace,
    contains,
    enumerate_superspaces,
    subspace_sum,
    theta,
    trivial_subspace,
)
from .scheme_subset import CachingMap, Round, _position_shift_table, validate_demands

# Building families materializes every receiver group; refuse instances where
# that blows past desk scale.
_MAX_ROUND_SETS = 10_000_000


def family_count(k, l, j, q):
    """Number of j-sets of (l-dim, fixed-base) subspaces summing to dim l-1+j."""
    num = 1
    for i in range(j):
        num *= theta(k, q) - theta(l - 1 + i, q)
    den = math.factorial(j) * q ** (j * (l - 1))
    if num % den:
        raise NonIntegerCountError(
            f"family count not integral for k={k}, l={l}, j={j}, q={q}"
        )
    return num // den


@dataclass(frozen=True)
class PGParams:
    """Construction dimensions plus the derived scheme parameters."""

    q: int
    k_t: int
    l_t: int
    m_t: int
    k_r: int
    l_r: int
    m_r: int

    def __post_init__(self):
        make_field(self.q)  # raises NotPrimePowerError for bad q
        checks = (
            (self.l_t >= 1, f"l_t >= 1 violated: l_t={self.l_t}"),
            (self.l_r >= 1, f"l_r >= 1 violated: l_r={self.l_r}"),
            (self.m_t >= 0, f"m_t >= 0 violated: m_t={self.m_t}"),
            (self.m_r >= 0, f"m_r >= 0 violated: m_r={self.m_r}"),
            (self.k_t >= self.m_t + self.l_t,
             f"k_t >= m_t + l_t violated: {self.k_t} < {self.m_t + self.l_t}"),
            (self.k_r >= self.m_r + self.l_r + theta(self.m_t + 1, self.q),
             f"k_r >= m_r + l_r + theta(m_t+1) violated: "
             f"{self.k_r} < {self.m_r + self.l_r + theta(self.m_t + 1, self.q)}"),
        )
        for ok, msg in checks:
            if not ok:
                raise ConstraintViolationError(msg)

    @property
    def K_T(self):
        return theta(self.k_t - self.l_t + 1, self.q)

    @property
    def K_R(self):
        return theta(self.k_r - self.l_r + 1, self.q)

    @property
    def t_T(self):
        return theta(self.m_t + 1, self.q)

    @property
    def t_R(self):
        return theta(self.m_r + 1, self.q)

    @cached_property
    def F_T(self):
        num = self.q ** (self.m_t * (self.m_t + 1) // 2)
        for i in range(self.m_t + 1):
            num *= theta(self.k_t - self.l_t + 1 - i, self.q)
        return self._exact_div(num, math.factorial(self.m_t + 1), "F_T")

    @cached_property
    def F_R(self):
        num = self.q ** (self.m_r * (self.m_r + 1) // 2)
        for i in range(self.m_r + 1):
            num *= theta(self.k_r - self.l_r + 1 - i, self.q)
        return self._exact_div(num, math.factorial(self.m_r + 1), "F_R")

    @cached_property
    def F_P(self):
        num = self.q ** ((self.t_T + 2 * self.m_r + 2) * (self.t_T - 1) // 2)
        for i in range(1, self.t_T):
            num *= theta(self.k_r - self.m_r - self.l_r - i, self.q)
        return self._exact_div(num, math.factorial(self.t_T - 1), "F_P")

    def _exact_div(self, num, den, name):
        if num % den:
            raise NonIntegerCountError(f"{name} formula not integral for {self}")
        return num // den

    @property
    def F_C(self):
        return self.F_T * self.F_R

    @property
    def F(self):
        return self.F_C * self.F_P

    @property
    def dof(self):
        return self.m_r + self.t_T + 1

    @property
    def round_count(self):
        group_count = family_count(self.k_r, self.l_r, self.dof, self.q)
        return self.F_T * group_count * math.comb(self.dof - 1, self.m_r + 1)

    @property
    def tx_fraction(self):
        return Fraction(self.t_T, self.K_T)

    @property
    def rx_fraction(self):
        return Fraction(self.t_R, self.K_R)


def build_pg_params(q, k_t, l_t, m_t, k_r, l_r, m_r):
    return PGParams(q=q, k_t=k_t, l_t=l_t, m_t=m_t, k_r=k_r, l_r=l_r, m_r=m_r)


class PGPacketId(NamedTuple):
    """A delivered packet, index-encoded against the scheme families."""

    file: int
    tx_cache_idx: int  # index into tx_cache_sets
    rx_cache_idx: int  # index into rx_cache_sets
    zf_idx: int        # index into zf_sets

    @property
    def subfile(self):
        return (self.tx_cache_idx, self.rx_cache_idx)


def _fixed_base(k, l, q):
    """Span of the first l-1 standard basis vectors (trivial space for l=1)."""
    if l == 1:
        return trivial_subspace(k, q)
    rows = []
    for i in range(l - 1):
        vec = [0] * k
        vec[i] = 1
        rows.append(tuple(vec))
    return Subspace(k=k, q=q, basis=tuple(rows))


def _rep_vector(member, base):
    """First basis row of `member` outside `base`; the coset representative."""
    for row in member.basis:
        if not base.contains_vector(row):
            return row
    raise AssertionError("member equals its base subspace")


def _reduce(vec, echelon, field):
    vec = list(vec)
    for piv, row in echelon:
        c = vec[piv]
        if c:
            vec = [field.sub(x, field.mul(c, y)) for x, y in zip(vec, row)]
    return vec


def _independent_sets(reps, base_rows, size, field):
    """Ascending index tuples of reps independent modulo the base echelon."""
    n = len(reps)

    def rec(start, echelon, chosen):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        for i in range(start, n - (size - len(chosen)) + 1):
            red = _reduce(reps[i], echelon, field)
            piv = next((j for j, x in enumerate(red) if x), None)
            if piv is None:
                continue
            inv = field.inv(red[piv])
            row = [field.mul(inv, x) for x in red]
            chosen.append(i)
            yield from rec(i + 1, echelon + [(piv, row)], chosen)
            chosen.pop()

    yield from rec(0, base_rows, [])


@dataclass(frozen=True)
class PGFamilies:
    """The subspace families driving caching and delivery, index-encoded.

    Member sets are ascending tuples of indices into the sorted transmitter and
    receiver families, which realizes the canonical subspace order.
    """

    params: PGParams
    transmitters: tuple   # SubspaceFamily members (l_t-dim, containing L_t)
    receivers: tuple      # l_r-dim, containing L_r
    tx_cache_sets: tuple  # (m_t+1)-sets of transmitter indices
    rx_cache_sets: tuple  # (m_r+1)-sets of receiver indices
    zf_sets: tuple        # (t_T-1)-sets of receiver indices
    round_sets: tuple     # (m_r+t_T+1)-sets of receiver indices

    @cached_property
    def tx_cover(self):
        """Per tx_cache_set: sorted 1-based transmitter ids caching it."""
        return self._covers(self.transmitters, self.tx_cache_sets)

    @cached_property
    def rx_cover(self):
        return self._covers(self.receivers, self.rx_cache_sets)

    def _covers(self, members, index_sets):
        covers = []
        for idxs in index_sets:
            total = members[idxs[0]]
            for i in idxs[1:]:
                total = subspace_sum(total, members[i])
            covers.append(tuple(
                j + 1 for j, m in enumerate(members) if contains(total, m)
            ))
        return tuple(covers)

    @cached_property
    def rx_cache_index(self):
        return {s: i for i, s in enumerate(self.rx_cache_sets)}

    @cached_property
    def zf_index(self):
        return {s: i for i, s in enumerate(self.zf_sets)}

    @cached_property
    def round_set_lookup(self):
        return frozenset(self.round_sets)

    @cached_property
    def _split_cache(self):
        return {}

    def split_indices(self, rx, rx_cache_idx):
        """zf_set indices splitting the (rx, rx_cache_idx) subfile into packets."""
        key = (rx, rx_cache_idx)
        got = self._split_cache.get(key)
        if got is None:
            iv = rx - 1
            members = self.rx_cache_sets[rx_cache_idx]
            need = self.params.dof
            lookup = self.round_set_lookup
            found = []
            for y_idx, y in enumerate(self.zf_sets):
                merged = {iv, *members, *y}
                if len(merged) == need and tuple(sorted(merged)) in lookup:
                    found.append(y_idx)
            got = tuple(found)
            self._split_cache[key] = got
        return got


def build_pg_families(params):
    """Enumerate all scheme families; sizes are asserted against the formulas."""
    q = params.q
    field = make_field(q)
    expected_groups = family_count(params.k_r, params.l_r, params.dof, q)
    if expected_groups > _MAX_ROUND_SETS:
        raise ValueError(
            f"instance needs {expected_groups} receiver groups; "
            f"family construction is desk-scale only (limit {_MAX_ROUND_SETS})"
        )

    base_t = _fixed_base(params.k_t, params.l_t, q)
    tx_family = enumerate_superspaces(base_t, params.l_t, role="transmitters")
    tx_reps = [_rep_vector(u, base_t) for u in tx_family]
    echelon_t = [
        (next(i for i, x in enumerate(row) if x), list(row)) for row in base_t.basis
    ]
    tx_cache_sets = tuple(
        _independent_sets(tx_reps, echelon_t, params.m_t + 1, field)
    )

    base_r = _fixed_base(params.k_r, params.l_r, q)
    rx_family = enumerate_superspaces(base_r, params.l_r, role="receivers")
    rx_reps = [_rep_vector(v, base_r) for v in rx_family]
    echelon_r = [
        (next(i for i, x in enumerate(row) if x), list(row)) for row in base_r.basis
    ]
    rx_cache_sets = tuple(
        _independent_sets(rx_reps, echelon_r, params.m_r + 1, field)
    )
    zf_sets = tuple(_independent_sets(rx_reps, echelon_r, params.t_T - 1, field))
    round_sets = tuple(_independent_sets(rx_reps, echelon_r, params.dof, field))

    fam = PGFamilies(
        params=params,
        transmitters=tuple(tx_family),
        receivers=tuple(rx_family),
        tx_cache_sets=tx_cache_sets,
        rx_cache_sets=rx_cache_sets,
        zf_sets=zf_sets,
        round_sets=round_sets,
    )
    assert len(fam.transmitters) == params.K_T
    assert len(fam.receivers) == params.K_R
    assert len(fam.tx_cache_sets) == params.F_T
    assert len(fam.rx_cache_sets) == params.F_R
    assert len(fam.zf_sets) == family_count(params.k_r, params.l_r, params.t_T - 1, q)
    assert len(fam.round_sets) == expected_groups
    return fam


def build_pg_caching(params, families):
    """Caching map keyed by (tx_cache_idx, rx_cache_idx) subfile pairs."""
    tx_sets = [frozenset(c) for c in families.tx_cover]
    rx_sets = [frozenset(c) for c in families.rx_cover]
    for s in tx_sets:
        assert len(s) == params.t_T
    for s in rx_sets:
        assert len(s) == params.t_R
    keys = tuple(
        (a, b) for a in range(len(tx_sets)) for b in range(len(rx_sets))
    )
    return CachingMap(
        n_transmitters=params.K_T,
        n_receivers=params.K_R,
        subfiles=keys,
        subfile_transmitters={(a, b): tx_sets[a] for a, b in keys},
        subfile_receivers={(a, b): rx_sets[b] for a, b in keys},
    )


def split_pg_packets(params, families, file, rx, tx_cache_idx, rx_cache_idx):
    """Packets of one demanded subfile, one per admissible zero-forcing set."""
    if rx in families.rx_cover[rx_cache_idx]:
        raise ValueError(
            f"receiver {rx} caches subfile {(tx_cache_idx, rx_cache_idx)}"
        )
    return [
        PGPacketId(file, tx_cache_idx, rx_cache_idx, y)
        for y in families.split_indices(rx, rx_cache_idx)
    ]


def enumerate_pg_rounds(params, families, demands, n_files=None):
    """Yield every delivery round over (tx_cache_set, receiver group, base set).

    The minimum member of each receiver group anchors the boxplus rotation,
    mirroring the subset scheme.
    """
    validate_demands(demands, params.K_R, n_files if n_files else max(demands.values()))
    n = params.dof
    tables = _position_shift_table(n, params.m_r + 1)
    rx_index = families.rx_cache_index
    zf_index = families.zf_index
    tx_covers = families.tx_cover
    for xt_idx in range(len(families.tx_cache_sets)):
        txs = tx_covers[xt_idx]
        for group in families.round_sets:
            for shifts in tables:
                entries = []
                for serve_pos, cached_pos, zf_pos in shifts:
                    rx = group[serve_pos - 1] + 1
                    xr = rx_index[tuple(group[p - 1] for p in cached_pos)]
                    y = zf_index[tuple(group[p - 1] for p in zf_pos)]
                    entries.append((rx, PGPacketId(demands[rx], xt_idx, xr, y)))
                yield Round(transmitters=txs, entries=tuple(entries))


@dataclass(frozen=True)
class PGScheme:
    """Parameters, families, and caching map with the scheme enumerators."""

    params: PGParams
    families: PGFamilies
    caching: CachingMap
    n_files: int

    @classmethod
    def build(cls, params, n_files):
        families = build_pg_families(params)
        return cls(
            params=params,
            families=families,
            caching=build_pg_caching(params, families),
            n_files=n_files,
        )

    def rounds(self, demands):
        return enumerate_pg_rounds(self.params, self.families, demands, self.n_files)

    def missing_packets(self, demands):
        """All (receiver, packet) pairs a complete schedule must serve."""
        validate_demands(demands, self.params.K_R, self.n_files)
        fam = self.families
        n_tx_sets = len(fam.tx_cache_sets)
        for rx in range(1, self.params.K_R + 1):
            file = demands[rx]
            for xr in range(len(fam.rx_cache_sets)):
                if rx in fam.rx_cover[xr]:
                    continue
                for y in fam.split_indices(rx, xr):
                    for xt in range(n_tx_sets):
                        yield rx, PGPacketId(file, xt, xr, y)

    @property
    def slot_count(self):
        fam = self.families
        return (self.params.K_R * len(fam.tx_cache_sets)
                * len(fam.rx_cache_sets) * len(fam.zf_sets))

    def slot_of(self, rx, pkt):
        fam = self.families
        slot = (rx - 1) * len(fam.tx_cache_sets) + pkt.tx_cache_idx
        slot = slot * len(fam.rx_cache_sets) + pkt.rx_cache_idx
        return slot * len(fam.zf_sets) + pkt.zf_idx
