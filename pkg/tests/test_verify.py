from fractions import Fraction

import pytest

from cachedof.errors import InconsistentScheduleError
from cachedof.scheme_pg import PGParams
from cachedof.scheme_subset import Round, SubsetPacketId
from cachedof.verify import (
    TABLE1_MANIFEST,
    check_asymptotic_fractions,
    check_completeness,
    check_qbinom_bounds,
    check_round_valid,
    compute_rate_dof,
    round_to_one_significant_figure,
    table1_report,
)


class TestRoundValidity:
    def test_generated_rounds_pass(self, desk_subset_scheme):
        demands = {1: 2, 2: 2, 3: 1, 4: 4}
        for rnd in desk_subset_scheme.rounds(demands):
            ok, problems = check_round_valid(rnd, desk_subset_scheme.caching, 1)
            assert ok and not problems

    def test_duplicate_receiver_flagged(self, desk_subset_scheme):
        demands = {1: 1, 2: 2, 3: 3, 4: 4}
        rnd = next(iter(desk_subset_scheme.rounds(demands)))
        twisted = Round(
            transmitters=rnd.transmitters,
            entries=(rnd.entries[0], rnd.entries[0]),
        )
        ok, problems = check_round_valid(twisted, desk_subset_scheme.caching, 1)
        assert not ok
        assert any("more than once" in p for p in problems)

    def test_undersupported_packet_flagged(self, desk_subset_scheme):
        # serve receiver 2 a packet cached only at an absent receiver
        pkt_a = SubsetPacketId(1, (1,), (3,), ())
        pkt_b = SubsetPacketId(1, (1,), (4,), ())
        rnd = Round(transmitters=(1,), entries=((1, pkt_a), (2, pkt_b)))
        ok, problems = check_round_valid(rnd, desk_subset_scheme.caching, 1)
        assert not ok
        assert any("n - t_T" in p for p in problems)


class TestCompleteness:
    def test_mutations_detected(self, desk_subset_scheme):
        demands = {1: 1, 2: 2, 3: 3, 4: 4}
        rounds = list(desk_subset_scheme.rounds(demands))

        dropped = check_completeness(iter(rounds[1:]), desk_subset_scheme, demands)
        assert not dropped.passed
        assert dropped.orphan_count == 2
        assert len(dropped.orphans) == 2  # names the packets

        doubled = check_completeness(
            iter(rounds + rounds[:1]), desk_subset_scheme, demands
        )
        assert not doubled.passed
        assert doubled.duplicate_count == 2

    def test_wrong_file_detected(self, desk_subset_scheme):
        demands = {1: 1, 2: 2, 3: 3, 4: 4}
        rounds = list(desk_subset_scheme.rounds(demands))
        rx, pkt = rounds[0].entries[0]
        rounds[0] = Round(
            transmitters=rounds[0].transmitters,
            entries=((rx, pkt._replace(file=pkt.file % 4 + 1)), rounds[0].entries[1]),
        )
        report = check_completeness(iter(rounds), desk_subset_scheme, demands)
        assert report.wrong_file == 1
        assert not report.passed

    def test_report_fields(self, desk_subset_scheme):
        demands = {1: 1, 2: 1, 3: 1, 4: 1}
        report = check_completeness(
            desk_subset_scheme.rounds(demands), desk_subset_scheme, demands
        )
        assert report.rounds_total == report.rounds_valid == 12
        assert report.rate == Fraction(12, 8)
        assert report.cache_fractions == {
            "tx": Fraction(1, 2), "rx": Fraction(1, 4),
        }
        doc = report.to_json_dict()
        assert doc["passed"] is True
        assert doc["rate"] == "3/2"


class TestRateDof:
    def test_desk_accounting(self, desk_subset_scheme):
        demands = {1: 4, 2: 4, 3: 4, 4: 4}
        report = check_completeness(
            desk_subset_scheme.rounds(demands), desk_subset_scheme, demands
        )
        accounting = compute_rate_dof(report, desk_subset_scheme.params)
        assert accounting == {"rate": Fraction(3, 2), "dof": Fraction(2)}

    def test_inconsistent_observation_rejected(self, desk_subset_scheme):
        demands = {1: 1, 2: 2, 3: 3, 4: 4}
        report = check_completeness(
            desk_subset_scheme.rounds(demands), desk_subset_scheme, demands
        )
        report.dof_observed = 3
        with pytest.raises(InconsistentScheduleError):
            compute_rate_dof(report, desk_subset_scheme.params)

    def test_published_dofs(self):
        row = TABLE1_MANIFEST[0]
        assert row.pg.dof == 5
        assert row.subset.dof == 6


class TestQBinomBounds:
    def test_equal_arguments_tight(self):
        assert check_qbinom_bounds(4, 4, 4, 3)

    def test_example_sandwich(self):
        # 2^6 <= 155 <= 2^8
        assert check_qbinom_bounds(5, 2, 5, 2)

    def test_small_sweep(self):
        for q in (2, 3):
            for b in range(1, 5):
                for a in range(b, 7):
                    for f in range(b, 7):
                        assert check_qbinom_bounds(a, b, f, q)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            check_qbinom_bounds(2, 3, 3, 2)
        with pytest.raises(ValueError):
            check_qbinom_bounds(3, 0, 3, 2)


class TestAsymptoticFractions:
    def test_published_row_one(self):
        pg = TABLE1_MANIFEST[0].pg
        assert check_asymptotic_fractions(pg, alpha=1, beta=3)

    def test_defaults_derived_from_dimensions(self):
        pg = TABLE1_MANIFEST[0].pg
        assert pg.k_t - pg.m_t - pg.l_t == 1
        assert pg.k_r - pg.m_r - pg.l_r == 3
        assert check_asymptotic_fractions(pg)

    def test_trivial_bound(self):
        p = PGParams(q=2, k_t=2, l_t=1, m_t=1, k_r=4, l_r=1, m_r=0)
        assert check_asymptotic_fractions(p, alpha=1, beta=1)


class TestRoundingHelper:
    @pytest.mark.parametrize(
        "value,expect",
        [
            (1_874_880, 2 * 10**6),
            (629_959_680, 6 * 10**8),
            (55_221_075, 6 * 10**7),
            (84, 80),
            (85, 90),
            (95, 100),
            (1, 1),
        ],
    )
    def test_round_half_up(self, value, expect):
        assert round_to_one_significant_figure(value) == expect


class TestTable1:
    def test_dofs_match_everywhere(self):
        report = table1_report()
        for row in report.rows:
            assert row.dof_subset_match
            assert row.dof_pg_match

    def test_row_one_exact_values(self):
        report = table1_report()
        row = report.rows[0]
        assert row.F_pg == 1_874_880
        assert row.F_pg_match
        assert row.F_subset == 55_221_075
        assert not row.F_subset_match

    def test_row_two_flagged(self):
        report = table1_report()
        row = report.rows[1]
        assert row.F_pg == 629_959_680
        assert not row.F_pg_match
        assert any("row 2: pg F" in f for f in report.flags)

    def test_reference_only_column(self):
        report = table1_report()
        hyper = [row.spec.printed_F_hypercube for row in report.rows]
        assert hyper == [3 * 10**6, None, None, 3 * 10**16, 3 * 10**18, 7 * 10**21]

    def test_deterministic_rendering(self):
        assert table1_report().to_text() == table1_report().to_text()
        text = table1_report().to_text()
        assert "flag: row 1: subset F 55221075" in text
