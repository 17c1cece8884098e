import numpy as np
import pytest
from scipy.cluster.hierarchy import cophenet
from scipy.spatial.distance import squareform

from photoseg.agglo import (
    LINKAGES,
    MONOTONE_LINKAGES,
    AggloParams,
    cluster_frames,
    cosine_distance,
    cosine_distance_matrix,
    cut_merge_sequence,
    linkage_merge_sequence,
)
from photoseg.datamodel import Segmentation, ValidationError

from oracles import naive_merge_sequence


class TestCosineDistance:
    def test_identical_nonzero(self):
        assert cosine_distance([1.0, 2.0], [1.0, 2.0]) == pytest.approx(0.0)

    def test_orthogonal(self):
        assert cosine_distance([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)

    def test_opposite(self):
        assert cosine_distance([1.0, 0.0], [-1.0, 0.0]) == pytest.approx(2.0)

    def test_zero_vector_convention(self):
        assert cosine_distance([0.0, 0.0], [1.0, 0.0]) == 1.0
        assert cosine_distance([0.0, 0.0], [0.0, 0.0]) == 1.0

    def test_matrix_agrees_with_scalar(self):
        rng = np.random.default_rng(0)
        rows = rng.normal(size=(6, 4))
        rows[2] = 0.0
        d = cosine_distance_matrix(rows)
        for i in range(6):
            for j in range(6):
                if i == j:
                    assert d[i, j] == 0.0
                else:
                    assert d[i, j] == pytest.approx(
                        cosine_distance(rows[i], rows[j]), abs=1e-12)


class TestMergeSequence:
    def test_matches_naive_oracle_all_linkages(self):
        rng = np.random.default_rng(42)
        for trial in range(100):
            n = int(rng.integers(2, 9))
            rows = rng.normal(size=(n, 4))
            dist = cosine_distance_matrix(rows)
            for linkage in LINKAGES:
                got = linkage_merge_sequence(dist, linkage)
                want = naive_merge_sequence(dist, linkage)
                got_pairs = [(int(a), int(b)) for a, b, _, _ in got]
                want_pairs = [(a, b) for a, b, _ in want]
                assert got_pairs == want_pairs, f"{linkage}, trial {trial}"
                np.testing.assert_allclose(
                    got[:, 2], [h for _, _, h in want], rtol=1e-9, atol=1e-12)

    def test_cophenetic_matches_scipy(self):
        from scipy.cluster.hierarchy import linkage as scipy_linkage
        rng = np.random.default_rng(3)
        rows = rng.normal(size=(10, 5))
        dist = cosine_distance_matrix(rows)
        condensed = squareform(dist, checks=False)
        for linkage in LINKAGES:
            mine = linkage_merge_sequence(dist, linkage)
            theirs = scipy_linkage(condensed, method=linkage)
            np.testing.assert_allclose(cophenet(mine), cophenet(theirs),
                                       rtol=1e-8, atol=1e-10)

    def test_tie_break_prefers_lowest_pair(self):
        # four identical points: all pairs at distance 0
        rows = np.tile([1.0, 2.0], (4, 1))
        merges = linkage_merge_sequence(cosine_distance_matrix(rows), "single")
        assert [(int(a), int(b)) for a, b, _, _ in merges] == [(0, 1), (2, 3), (4, 5)]


class TestClusterFrames:
    def test_single_frame(self):
        seg = cluster_frames(np.array([[1.0, 0.0]]), AggloParams())
        assert seg == Segmentation(1, (0,))

    def test_cutoff_above_all_merges_gives_one_segment(self):
        rng = np.random.default_rng(1)
        rows = rng.uniform(0.5, 1.0, size=(12, 6))
        seg = cluster_frames(rows, AggloParams(linkage="complete", cutoff=10.0))
        assert seg == Segmentation(12, (0,))

    def test_two_blocks_split_by_cutoff(self):
        u, v = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        rows = np.array([u, u, u, v, v, v])
        seg = cluster_frames(rows, AggloParams(linkage="single", cutoff=0.5))
        assert seg == Segmentation(6, (0, 3))

    def test_duplicates_always_co_clustered(self):
        rng = np.random.default_rng(9)
        base = rng.normal(size=(5, 4))
        rows = np.vstack([base, base[2]])       # frame 5 duplicates frame 2
        for linkage in LINKAGES:
            dist = cosine_distance_matrix(rows)
            merges = linkage_merge_sequence(dist, linkage)
            labels = cut_merge_sequence(merges, rows.shape[0], cutoff=0.3)
            assert labels[2] == labels[5], linkage

    def test_boundaries_scale_invariant(self):
        rng = np.random.default_rng(4)
        rows = rng.normal(size=(20, 5))
        for linkage in LINKAGES:
            params = AggloParams(linkage=linkage, cutoff=0.6)
            a = cluster_frames(rows, params)
            b = cluster_frames(123.456 * rows, params)
            assert a.starts == b.starts, linkage

    def test_monotone_cutoff_for_monotone_linkages(self):
        rng = np.random.default_rng(8)
        rows = rng.normal(size=(18, 4))
        for linkage in MONOTONE_LINKAGES:
            dist = cosine_distance_matrix(rows)
            merges = linkage_merge_sequence(dist, linkage)
            counts = []
            for cutoff in (0.1, 0.3, 0.6, 0.9, 1.4):
                labels = cut_merge_sequence(merges, 18, cutoff)
                counts.append(len(set(labels.tolist())))
            assert counts == sorted(counts, reverse=True), linkage

    def test_rejects_unknown_linkage(self):
        with pytest.raises(ValidationError, match="linkage"):
            AggloParams(linkage="euclid")

    def test_rejects_nonpositive_cutoff(self):
        with pytest.raises(ValidationError, match="cutoff"):
            AggloParams(cutoff=0.0)
