import numpy as np
import pytest

from diachron import (
    AlignedSeries,
    DataError,
    Epoch,
    RotationMatrix,
    SynthPlan,
    align_series,
    cross_epoch_pair,
    gen_series,
    knn_oracle,
    normalize_rows,
    similar_by_vector,
    temporal_analogues,
    vector_of,
)
from diachron.prng import Pcg32

from conftest import make_embedding, random_embedding


def _random_instance(seed, max_vocab=300, max_dim=24):
    """Seeded random query instance with occasional zero rows and duplicates."""
    g = Pcg32(seed, 17)
    n = 1 + int(g.next_u32() % max_vocab)
    d = 1 + int(g.next_u32() % max_dim)
    m = g.normals(n * d).reshape(n, d).astype(np.float32)
    if seed % 3 == 0 and n >= 4:
        m[n // 2] = m[0]
        m[n - 1] = m[0]
    if seed % 4 == 0:
        m[int(g.next_u32()) % n] = 0.0
    e = make_embedding([f"w{i}" for i in range(n)], m)
    q = g.normals(d)
    exclude = None
    if seed % 5 == 0:
        exclude = {f"w{int(g.next_u32()) % n}", "not-present"}
    return e, q, exclude


class TestSimilarByVector:
    def test_self_similarity_top1(self):
        e = random_embedding(1, 30, 6)
        q = vector_of(e, "w7")
        top = similar_by_vector(e, q, 1)
        assert top[0].word == "w7"
        assert abs(top[0].score - 1.0) < 1e-6

    def test_exact_ties_break_by_vocab_index(self):
        row = [0.6, 0.8]
        e = make_embedding(["dup2", "other", "dup1"], [row, [0.8, -0.6], row])
        got = similar_by_vector(e, np.array([0.6, 0.8]), 3)
        assert [nb.word for nb in got] == ["dup2", "dup1", "other"]
        assert got[0].score == got[1].score

    def test_matches_oracle_exactly_on_random_instances(self):
        for seed in range(40):
            e, q, exclude = _random_instance(seed)
            expected = knn_oracle(e, q, len(e.vocab), exclude)
            got = similar_by_vector(e, q, len(e.vocab), exclude)
            assert got == expected  # words, order, and score bits

    def test_top_k_prefix_matches_oracle(self):
        for seed in (3, 6, 12, 15):
            e, q, exclude = _random_instance(seed)
            full = knn_oracle(e, q, len(e.vocab), exclude)
            for k in (1, 2, 5):
                assert similar_by_vector(e, q, k, exclude) == full[:k]

    def test_scores_bounded_and_sorted(self):
        e, q, _ = _random_instance(7)
        got = similar_by_vector(e, q, len(e.vocab))
        scores = [nb.score for nb in got]
        assert all(-1.0 - 1e-6 <= s <= 1.0 + 1e-6 for s in scores)
        assert all(a >= b for a, b in zip(scores, scores[1:]))

    def test_exclusion_shifts_list(self):
        e = random_embedding(2, 50, 5)
        q = Pcg32(3, 1).normals(5)
        base = similar_by_vector(e, q, 10)
        shifted = similar_by_vector(e, q, 9, exclude={base[0].word})
        assert shifted == base[1:]

    def test_zero_rows_ineligible(self):
        e = make_embedding(["zero", "one"], [[0.0, 0.0], [1.0, 0.0]])
        got = similar_by_vector(e, np.array([1.0, 1.0]), 5)
        assert [nb.word for nb in got] == ["one"]

    def test_fewer_eligible_than_n(self):
        e = make_embedding(["a", "b"], [[1.0], [2.0]])
        assert len(similar_by_vector(e, np.array([1.0]), 10)) == 2

    def test_errors(self):
        e = random_embedding(4, 5, 3)
        with pytest.raises(DataError) as exc:
            similar_by_vector(e, np.zeros(3), 1)
        assert exc.value.kind == "zero-query-vector"
        with pytest.raises(DataError) as exc:
            similar_by_vector(e, np.ones(4), 1)
        assert exc.value.kind == "dim-mismatch"
        with pytest.raises(DataError) as exc:
            similar_by_vector(e, np.ones(3), 0)
        assert exc.value.kind == "bad-count"


class TestKnnOracle:
    def test_result_length(self):
        e, q, _ = _random_instance(9)
        zero_rows = int((e.row_sq_norms == 0.0).sum())
        assert len(knn_oracle(e, q, 10**9)) == len(e.vocab) - zero_rows

    def test_query_row_is_top1(self):
        e = random_embedding(10, 20, 4)
        got = knn_oracle(e, vector_of(e, "w3"), 1)
        assert got[0].word == "w3"


def _aligned_fixture(seed=90, epochs=4, vocab=60, dim=8, sigma=0.05, analogues=None):
    plan = SynthPlan(
        seed=seed,
        epochs=epochs,
        vocab_size=vocab,
        dim=dim,
        noise_sigma=sigma,
        planted_analogues=analogues,
    )
    series = gen_series(plan)
    return plan, align_series(series, plan.reference_epoch)


class TestTemporalAnalogues:
    def test_planted_chain_is_top1_everywhere(self):
        chain = {"w0": tuple(f"w{10 + t}" for t in range(3)) + ("w0",)}
        plan, aligned = _aligned_fixture(analogues=chain)
        table = temporal_analogues(aligned, "w0", 2)
        assert table.concept == "w0"
        assert [ep for ep, _ in table.per_epoch] == list(aligned.epochs)
        expected = dict(zip(plan.epoch_labels(), chain["w0"]))
        for ep, neighbors in table.per_epoch:
            assert neighbors[0].word == expected[ep]

    def test_reference_epoch_self_top1(self):
        plan, aligned = _aligned_fixture(seed=91)
        table = temporal_analogues(aligned, "w5", 3)
        ref_row = dict(table.per_epoch)[plan.reference_epoch]
        assert ref_row[0].word == "w5"
        assert abs(ref_row[0].score - 1.0) < 1e-6

    def test_concept_not_excluded_by_default(self):
        plan, aligned = _aligned_fixture(seed=92, sigma=0.0)
        table = temporal_analogues(aligned, "w1", 1)
        words = [nbs[0].word for _, nbs in table.per_epoch]
        assert "w1" in words

    def test_exclude_concept_flag(self):
        plan, aligned = _aligned_fixture(seed=93)
        table = temporal_analogues(aligned, "w2", 2, exclude_concept=True)
        for _, neighbors in table.per_epoch:
            assert all(nb.word != "w2" for nb in neighbors)

    def test_oov_concept(self):
        plan, aligned = _aligned_fixture(seed=94)
        with pytest.raises(DataError) as exc:
            temporal_analogues(aligned, "missing", 2)
        assert exc.value.kind == "out-of-vocabulary"
        assert str(plan.reference_epoch) in exc.value.detail

    def test_query_epoch_override(self):
        plan, aligned = _aligned_fixture(seed=95)
        table = temporal_analogues(aligned, "w4", 1, query_epoch=Epoch(1800))
        assert table.reference == Epoch(1800)
        assert dict(table.per_epoch)[Epoch(1800)][0].word == "w4"


def _manual_aligned(vectors_by_epoch, reference):
    members = {}
    rotations = {}
    dim = len(next(iter(vectors_by_epoch.values()))[1][0])
    for year, (words, rows) in vectors_by_epoch.items():
        ep = Epoch(year)
        members[ep] = normalize_rows(make_embedding(words, rows, year=year))
        rotations[ep] = (
            RotationMatrix.identity(dim, ep)
            if ep == reference
            else RotationMatrix(np.eye(dim), ep, reference)
        )
    return AlignedSeries(reference, members, rotations)


class TestCrossEpochPair:
    def test_same_word_same_epoch(self):
        aligned = _manual_aligned(
            {1990: (["a", "b"], [[1.0, 0.0], [0.5, 0.5]])}, Epoch(1990)
        )
        score = cross_epoch_pair(aligned, "a", Epoch(1990), "a", Epoch(1990))
        assert abs(score - 1.0) < 1e-6

    def test_orthogonal_planted_vectors(self):
        aligned = _manual_aligned(
            {
                1800: (["x"], [[1.0, 0.0]]),
                1990: (["y"], [[0.0, 1.0]]),
            },
            Epoch(1990),
        )
        assert abs(cross_epoch_pair(aligned, "x", Epoch(1800), "y", Epoch(1990))) < 1e-6

    def test_oov(self):
        aligned = _manual_aligned({1990: (["a"], [[1.0, 0.0]])}, Epoch(1990))
        with pytest.raises(DataError) as exc:
            cross_epoch_pair(aligned, "nope", Epoch(1990), "a", Epoch(1990))
        assert exc.value.kind == "out-of-vocabulary"
