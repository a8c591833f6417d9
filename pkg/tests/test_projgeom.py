import itertools

import pytest

import oracles
from cachedof.errors import AmbientMismatchError
from cachedof.projgeom import (
    canonicalize,
    contains,
    count_complements,
    count_li_point_sets,
    enumerate_superspaces,
    gaussian_binomial,
    int_to_vector,
    projective_points,
    subspace_sum,
    theta,
    trivial_subspace,
    vector_to_int,
)


def span_of(member):
    """Full vector set of a subspace, via the oracle closure."""
    return oracles.span(oracles.member_vectors(member), member.k, member.q)


class TestGaussianBinomial:
    def test_b_zero_is_one(self):
        assert gaussian_binomial(7, 0, 2) == 1

    def test_small_counts_match_enumeration(self):
        assert gaussian_binomial(3, 1, 2) == oracles.count_subspaces(3, 1, 2) == 7
        assert gaussian_binomial(5, 2, 2) == oracles.count_subspaces(5, 2, 2) == 155

    def test_rejects_b_above_a(self):
        with pytest.raises(ValueError):
            gaussian_binomial(2, 3, 2)

    @pytest.mark.parametrize("q", [2, 3, 4, 5])
    def test_symmetry(self, q):
        for a in range(9):
            for b in range(a + 1):
                assert gaussian_binomial(a, b, q) == gaussian_binomial(a, a - b, q)


class TestTheta:
    def test_trivial_space_has_no_points(self):
        assert theta(0, 5) == 0

    def test_counts_match_point_enumeration(self):
        assert theta(4, 2) == len(oracles.monic_points(4, 2)) == 15
        assert theta(3, 3) == oracles.count_subspaces(3, 1, 3) == 13


class TestCanonicalize:
    def test_single_vector_already_canonical(self):
        s = canonicalize([(1, 1, 0)], 3, 2)
        assert s.basis == ((1, 1, 0),)
        assert s.dim == 1

    def test_dependent_vector_dropped(self):
        s = canonicalize([(1, 1, 0), (0, 1, 1), (1, 0, 1)], 3, 2)
        assert s.dim == 2

    def test_empty_input_gives_trivial_space(self):
        assert canonicalize([], 3, 2) == trivial_subspace(3, 2)

    def test_idempotent_on_canonical_bases(self):
        for member in enumerate_superspaces(trivial_subspace(3, 2), 2):
            assert canonicalize(member.basis, 3, 2) == member

    def test_span_representatives_collapse(self):
        # every generating set of the same subspace canonicalizes identically
        target = canonicalize([(1, 0, 1), (0, 1, 1)], 3, 2)
        vecs = sorted(span_of(target) - {0})
        for pair in itertools.combinations(vecs, 2):
            got = canonicalize([int_to_vector(v, 3, 2) for v in pair], 3, 2)
            if got.dim == 2:
                assert got == target


class TestSumAndContains:
    def test_sum_idempotent(self):
        a = canonicalize([(1, 0, 1)], 3, 2)
        assert subspace_sum(a, a) == a

    def test_distinct_points_span_a_plane(self):
        pts = projective_points(3, 2)
        for a, b in itertools.combinations(pts, 2):
            assert subspace_sum(a, b).dim == 2

    def test_echelon_of_stacked_basis(self):
        e1 = canonicalize([(1, 0, 0)], 3, 2)
        mixed = canonicalize([(1, 1, 0)], 3, 2)
        assert subspace_sum(e1, mixed) == canonicalize([(1, 0, 0), (0, 1, 0)], 3, 2)

    def test_commutative_and_associative(self):
        pts = list(projective_points(3, 2))
        for a, b in itertools.combinations(pts, 2):
            assert subspace_sum(a, b) == subspace_sum(b, a)
        for a, b, c in itertools.combinations(pts, 3):
            assert (subspace_sum(subspace_sum(a, b), c)
                    == subspace_sum(a, subspace_sum(b, c)))

    def test_ambient_mismatch_rejected(self):
        with pytest.raises(AmbientMismatchError):
            subspace_sum(trivial_subspace(3, 2), trivial_subspace(4, 2))
        with pytest.raises(AmbientMismatchError):
            contains(trivial_subspace(3, 2), trivial_subspace(3, 3))

    def test_contains_trivial_always(self):
        plane = canonicalize([(1, 0, 0), (0, 1, 0)], 3, 2)
        assert contains(plane, trivial_subspace(3, 2))

    def test_contains_sum_vector(self):
        plane = canonicalize([(1, 0, 0), (0, 1, 0)], 3, 2)
        assert contains(plane, canonicalize([(1, 1, 0)], 3, 2))
        assert not contains(
            canonicalize([(1, 0, 0)], 3, 2), canonicalize([(0, 1, 0)], 3, 2)
        )


class TestEnumerateSuperspaces:
    def test_point_counts(self):
        assert len(projective_points(3, 2)) == 7
        assert len(projective_points(5, 2)) == 31  # receiver count of the desk instance

    def test_superspaces_of_itself(self):
        line = canonicalize([(1, 1, 0)], 3, 2)
        fam = enumerate_superspaces(line, 1)
        assert tuple(fam) == (line,)

    @pytest.mark.parametrize("q", [2, 3])
    def test_counts_match_quotient_formula(self, q):
        for k in range(1, 5):
            for base_dim in range(k + 1):
                base = canonicalize(
                    [tuple(1 if i == j else 0 for i in range(k)) for j in range(base_dim)],
                    k, q,
                )
                for d in range(base_dim, k + 1):
                    fam = enumerate_superspaces(base, d)
                    assert len(fam) == gaussian_binomial(k - base_dim, d - base_dim, q)

    @pytest.mark.parametrize("q", [2, 3])
    def test_full_enumeration_matches_oracle_sets(self, q):
        for k in range(1, 5):
            for d in range(k + 1):
                fam = enumerate_superspaces(trivial_subspace(k, q), d)
                got = {span_of(m) for m in fam}
                assert len(got) == len(fam)
                assert got == oracles.all_subspaces(k, d, q)

    def test_members_sorted_and_unique(self):
        fam = enumerate_superspaces(trivial_subspace(4, 3), 2)
        keys = [m.sort_key for m in fam]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            enumerate_superspaces(trivial_subspace(3, 2), 4)


class TestCountingLemmas:
    def test_li_point_set_examples(self):
        assert count_li_point_sets(3, 0, 2, 2) == 21
        assert count_li_point_sets(3, 1, 2, 2) == 12
        assert count_li_point_sets(4, 1, 0, 2) == 1

    @pytest.mark.parametrize("q", [2, 3])
    def test_li_point_sets_match_bruteforce(self, q):
        for k in range(1, 4):
            for a in range(k + 1):
                for b in range(k - a + 1):
                    if a + b < 1:
                        continue
                    assert count_li_point_sets(k, a, b, q) == \
                        oracles.count_extending_point_sets(k, a, b, q)

    def test_li_point_sets_rejects_overflow(self):
        with pytest.raises(ValueError):
            count_li_point_sets(3, 2, 2, 2)

    def test_complement_examples(self):
        assert count_complements(1, 2) == 1
        assert count_complements(2, 2) == oracles.count_direct_complements(2, 2) == 2
        assert count_complements(3, 3) == oracles.count_direct_complements(3, 3) == 9

    @pytest.mark.parametrize("q", [2, 3])
    def test_complements_match_bruteforce(self, q):
        for a in range(2, 5):
            assert count_complements(a, q) == oracles.count_direct_complements(a, q)

    def test_complements_rejects_trivial(self):
        with pytest.raises(ValueError):
            count_complements(0, 2)


def test_vector_int_roundtrip():
    for q, k in ((2, 5), (3, 4)):
        for n in range(q**k):
            assert vector_to_int(int_to_vector(n, k, q), q) == n
