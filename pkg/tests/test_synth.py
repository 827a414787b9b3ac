import io

import numpy as np
import pytest

from diachron import (
    DataError,
    Epoch,
    ParseError,
    SynthPlan,
    align_series,
    gen_series,
    load_plan,
    orthogonality_defect,
    random_orthogonal,
    save_plan,
)
from diachron.synth import _ROT_STREAM_BASE


class TestRandomOrthogonal:
    @pytest.mark.parametrize("d", [1, 2, 5, 20, 50])
    def test_defect_small(self, d):
        assert orthogonality_defect(random_orthogonal(1234, d)) < 1e-6

    def test_d1_is_unit(self):
        q = random_orthogonal(5, 1)
        assert q.shape == (1, 1)
        assert abs(abs(float(q[0, 0])) - 1.0) < 1e-12

    def test_deterministic(self):
        assert np.array_equal(random_orthogonal(9, 8), random_orthogonal(9, 8))
        assert not np.array_equal(random_orthogonal(9, 8), random_orthogonal(10, 8))

    def test_bad_dim(self):
        with pytest.raises(DataError):
            random_orthogonal(1, 0)


class TestGenSeries:
    def test_identity_rotations_zero_noise_all_epochs_identical(self):
        d = 6
        plan = SynthPlan(
            seed=3,
            epochs=4,
            vocab_size=30,
            dim=d,
            noise_sigma=0.0,
            planted_rotations=tuple(np.eye(d) for _ in range(4)),
        )
        series = gen_series(plan)
        mats = [e.matrix.tobytes() for e in series]
        assert all(m == mats[0] for m in mats)

    def test_bit_identical_reproduction(self):
        plan = SynthPlan(seed=11, epochs=3, vocab_size=25, dim=5, noise_sigma=0.07)
        s1, s2 = gen_series(plan), gen_series(plan)
        for e1, e2 in zip(s1, s2):
            assert e1.matrix.tobytes() == e2.matrix.tobytes()

    def test_epoch_labels_and_reference(self):
        plan = SynthPlan(seed=1, epochs=3, vocab_size=5, dim=2, start_year=1900, step=5)
        assert plan.epoch_labels() == (Epoch(1900), Epoch(1905), Epoch(1910))
        assert plan.reference_epoch == Epoch(1910)

    def test_planted_rotation_recovery_end_to_end(self):
        plan = SynthPlan(seed=21, epochs=2, vocab_size=120, dim=12, noise_sigma=0.0)
        aligned = align_series(gen_series(plan), plan.reference_epoch)
        recovered = aligned.rotation(Epoch(1800)).q
        planted = random_orthogonal(21, 12, stream=_ROT_STREAM_BASE + 0)
        assert np.linalg.norm(recovered - planted) < 1e-4
        ref = aligned[plan.reference_epoch].matrix.astype(np.float64)
        rot = aligned[Epoch(1800)].matrix.astype(np.float64)
        assert np.einsum("ij,ij->i", ref, rot).mean() > 0.999

    def test_planted_analogue_rows_are_exact_images(self):
        chain = {"w2": ("w7", "w2")}
        plan = SynthPlan(
            seed=31, epochs=2, vocab_size=20, dim=4, noise_sigma=0.2,
            planted_analogues=chain,
        )
        series = gen_series(plan)
        rot = random_orthogonal(31, 4, stream=_ROT_STREAM_BASE + 0)
        ref = series[plan.reference_epoch]
        concept_row = ref.matrix[ref.vocab.index["w2"]].astype(np.float64)
        # reference row of the concept is noise-free, so its planted image in
        # epoch 0 must match concept_row rotated, up to float32 rounding
        image = series[Epoch(1800)].matrix[ref.vocab.index["w7"]].astype(np.float64)
        expected = concept_row @ rot.T
        expected /= np.linalg.norm(expected)
        cos = float(image @ expected / np.linalg.norm(image))
        assert cos > 1 - 1e-9

    def test_analogue_token_not_in_vocab(self):
        plan = SynthPlan(
            seed=1, epochs=2, vocab_size=5, dim=2,
            planted_analogues={"w0": ("w1", "nope")},
        )
        with pytest.raises(DataError) as exc:
            gen_series(plan)
        assert exc.value.kind == "missing-token"

    def test_noise_increases_recovery_error_on_average(self):
        errs = []
        for sigma in (0.0, 0.01, 0.1):
            total = 0.0
            for seed in (41, 42, 43):
                plan = SynthPlan(
                    seed=seed, epochs=2, vocab_size=80, dim=10, noise_sigma=sigma
                )
                aligned = align_series(gen_series(plan), plan.reference_epoch)
                planted = random_orthogonal(seed, 10, stream=_ROT_STREAM_BASE + 0)
                total += float(np.linalg.norm(aligned.rotation(Epoch(1800)).q - planted))
            errs.append(total / 3)
        assert errs[0] < errs[1] < errs[2]

    def test_plan_validation(self):
        with pytest.raises(DataError):
            SynthPlan(seed=-1, epochs=1, vocab_size=1, dim=1)
        with pytest.raises(DataError):
            SynthPlan(seed=0, epochs=0, vocab_size=1, dim=1)
        with pytest.raises(DataError):
            SynthPlan(seed=0, epochs=2, vocab_size=1, dim=1, noise_sigma=-0.5)
        with pytest.raises(DataError):
            SynthPlan(
                seed=0, epochs=2, vocab_size=3, dim=1,
                planted_analogues={"w0": ("w1",)},
            )


class TestPlanFiles:
    def test_roundtrip(self):
        plan = SynthPlan(
            seed=77, epochs=3, vocab_size=40, dim=6, noise_sigma=0.125,
            start_year=1850, step=20,
            planted_analogues={"w1": ("w2", "w3", "w1")},
        )
        sink = io.StringIO()
        save_plan(plan, sink)
        loaded = load_plan(io.StringIO(sink.getvalue()))
        assert loaded == plan

    def test_parse_with_comments(self):
        text = "# comment\nseed=5\nepochs=2\nvocab_size=4\ndim=3 # inline\n"
        plan = load_plan(io.StringIO(text))
        assert (plan.seed, plan.epochs, plan.vocab_size, plan.dim) == (5, 2, 4, 3)

    def test_parse_errors(self):
        for text, kind in [
            ("seed=5\nepochs=2\nvocab_size=4\n", "bad-plan"),  # missing dim
            ("seed=x\nepochs=2\nvocab_size=4\ndim=3\n", "bad-plan"),
            ("seed=5\nepochs=2\nvocab_size=4\ndim=3\nwat=1\n", "bad-plan"),
            ("seed 5\n", "bad-plan"),
        ]:
            with pytest.raises(ParseError) as exc:
                load_plan(io.StringIO(text))
            assert exc.value.kind == kind
