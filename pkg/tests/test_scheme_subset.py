import itertools
from fractions import Fraction
from math import comb

import pytest

from cachedof.errors import ConstraintViolationError, InvalidDemandError
from cachedof.scheme_subset import (
    SubsetParams,
    SubsetScheme,
    boxplus,
    build_subset_caching,
    split_subset_packets,
)
from cachedof.verify import check_completeness, check_round_valid, compute_rate_dof


class TestBoxplus:
    def test_wraps_modulus(self):
        assert boxplus(5, 3, 6) == 2
        assert boxplus(2, 5, 7) == 7

    def test_zero_shift_is_identity(self):
        for m in range(1, 8):
            for i in range(1, m + 1):
                assert boxplus(i, 0, m) == i

    def test_stays_in_range(self):
        for i, j in itertools.product(range(1, 7), range(12)):
            assert 1 <= boxplus(i, j, 6) <= 6

    def test_rejects_bad_modulus(self):
        with pytest.raises(ValueError):
            boxplus(1, 1, 0)


class TestParams:
    def test_desk_scale_values(self):
        p = SubsetParams(K_T=2, K_R=4, N=4, t_T=1, t_R=1)
        assert (p.F_C, p.F_P, p.F, p.dof) == (8, 1, 8, 2)
        assert p.round_count == 12

    def test_published_row_one(self):
        p = SubsetParams(K_T=7, K_R=31, N=1, t_T=3, t_R=3)
        assert p.F == comb(7, 3) * comb(31, 3) * comb(27, 2) == 55_221_075

    def test_receiver_budget_constraint_named(self):
        with pytest.raises(ConstraintViolationError, match="K_R >= t_T \\+ t_R"):
            SubsetParams(K_T=3, K_R=4, N=2, t_T=3, t_R=2)

    def test_cache_size_constraints(self):
        with pytest.raises(ConstraintViolationError, match="t_T <= K_T"):
            SubsetParams(K_T=2, K_R=9, N=2, t_T=3, t_R=2)

    @pytest.mark.parametrize(
        "kt,tt,kr,tr",
        [(2, 1, 4, 1), (2, 2, 5, 2), (3, 2, 6, 1), (7, 3, 31, 3), (13, 4, 364, 4)],
    )
    def test_round_count_identity(self, kt, tt, kr, tr):
        # S * dof == K_R (1 - t_R/K_R) * F, i.e. rounds cover the missing packets
        p = SubsetParams(K_T=kt, K_R=kr, N=1, t_T=tt, t_R=tr)
        assert p.round_count * p.dof == (kr - tr) * p.F


class TestCaching:
    def test_transmitter_rule(self, desk_subset_scheme):
        caching = desk_subset_scheme.caching
        mine = [key for key in caching.subfiles if 1 in caching.transmitters_of(key)]
        assert mine == [key for key in caching.subfiles if key[0] == (1,)]

    def test_each_subfile_at_t_nodes(self, desk_subset_scheme):
        p = desk_subset_scheme.params
        caching = desk_subset_scheme.caching
        for key in caching.subfiles:
            assert len(caching.transmitters_of(key)) == p.t_T
            assert len(caching.receivers_of(key)) == p.t_R

    def test_cache_fractions(self):
        p = SubsetParams(K_T=3, K_R=6, N=2, t_T=2, t_R=3)
        caching = build_subset_caching(p)
        assert caching.transmitter_fraction() == Fraction(2, 3)
        assert caching.receiver_fraction() == Fraction(3, 6)


class TestSplitting:
    def test_desk_scale_single_packet(self):
        p = SubsetParams(K_T=2, K_R=4, N=4, t_T=1, t_R=1)
        packets = split_subset_packets(p, 2, (1,), (2,), 3)
        assert len(packets) == 1
        assert packets[0].zero_forced_at == ()

    def test_zero_forcing_sets_enumerated(self):
        p = SubsetParams(K_T=2, K_R=6, N=2, t_T=2, t_R=2)
        packets = split_subset_packets(p, 1, (1, 2), (1, 2), 3)
        assert [pkt.zero_forced_at for pkt in packets] == [(4,), (5,), (6,)]

    def test_count_matches_formula(self):
        p = SubsetParams(K_T=7, K_R=31, N=1, t_T=3, t_R=3)
        packets = split_subset_packets(p, 1, (1, 2, 3), (1, 2, 3), 4)
        assert len(packets) == p.F_P == 351

    def test_cached_target_rejected(self):
        p = SubsetParams(K_T=2, K_R=4, N=4, t_T=1, t_R=1)
        with pytest.raises(ValueError):
            split_subset_packets(p, 1, (1,), (2,), 2)


class TestRounds:
    def test_round_count_and_size(self, desk_subset_scheme):
        demands = {1: 1, 2: 2, 3: 3, 4: 4}
        rounds = list(desk_subset_scheme.rounds(demands))
        assert len(rounds) == 12
        assert all(len(r.entries) == 2 for r in rounds)

    def test_all_rounds_valid(self, desk_subset_scheme):
        demands = {1: 4, 2: 3, 3: 2, 4: 1}
        for rnd in desk_subset_scheme.rounds(demands):
            ok, problems = check_round_valid(
                rnd, desk_subset_scheme.caching, desk_subset_scheme.params.t_T
            )
            assert ok, problems

    def test_completeness_distinct_demands(self, desk_subset_scheme):
        demands = {1: 1, 2: 2, 3: 3, 4: 4}
        report = check_completeness(
            desk_subset_scheme.rounds(demands), desk_subset_scheme, demands
        )
        assert report.passed
        assert report.packets_missing == report.packets_served == 24

    def test_completeness_repeated_demands(self, desk_subset_scheme):
        demands = {r: 1 for r in range(1, 5)}
        report = check_completeness(
            desk_subset_scheme.rounds(demands), desk_subset_scheme, demands
        )
        assert report.passed

    def test_packet_served_in_its_unique_group(self, desk_subset_scheme):
        # the round serving (u, T, R, Rp) is built from the group {u} | R | Rp
        demands = {1: 1, 2: 2, 3: 3, 4: 4}
        rounds = list(desk_subset_scheme.rounds(demands))
        for rx, pkt in desk_subset_scheme.missing_packets(demands):
            hosts = [
                r for r in rounds
                if (rx, pkt) in r.entries
            ]
            assert len(hosts) == 1
            group = set(pkt.cached_at) | set(pkt.zero_forced_at) | {rx}
            served = {entry_rx for entry_rx, _ in hosts[0].entries}
            assert served == group

    def test_rate_and_dof(self, desk_subset_scheme):
        demands = {1: 1, 2: 1, 3: 2, 4: 2}
        report = check_completeness(
            desk_subset_scheme.rounds(demands), desk_subset_scheme, demands
        )
        accounting = compute_rate_dof(report, desk_subset_scheme.params)
        assert accounting["rate"] == Fraction(3, 2)
        assert accounting["dof"] == 2

    def test_full_transmitter_cache_edge(self):
        # t_T = K_T: every transmitter participates in every round
        scheme = SubsetScheme.build(SubsetParams(K_T=2, K_R=5, N=3, t_T=2, t_R=2))
        demands = {1: 3, 2: 1, 3: 2, 4: 1, 5: 3}
        rounds = list(scheme.rounds(demands))
        assert len(rounds) == scheme.params.round_count == 15
        report = check_completeness(iter(rounds), scheme, demands)
        assert report.passed
        assert report.dof_observed == 4

    def test_invalid_demands(self, desk_subset_scheme):
        with pytest.raises(InvalidDemandError):
            list(desk_subset_scheme.rounds({1: 1, 2: 2, 3: 3, 4: 5}))
        with pytest.raises(InvalidDemandError):
            list(desk_subset_scheme.rounds({1: 1, 2: 2, 3: 3}))

    def test_enumeration_deterministic(self, desk_subset_scheme):
        demands = {1: 1, 2: 2, 3: 3, 4: 4}
        first = list(desk_subset_scheme.rounds(demands))
        second = list(desk_subset_scheme.rounds(demands))
        assert first == second

    def test_publication_scale_construction_refused(self):
        params = SubsetParams(K_T=7, K_R=31, N=1, t_T=3, t_R=3)
        with pytest.raises(ValueError, match="desk-scale"):
            SubsetScheme.build(params)
