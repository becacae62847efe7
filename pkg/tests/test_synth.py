import math

import pytest

from pmiseg.sentencer import TokenSequence
from pmiseg.synth import (
    LabeledPool,
    PoolUtterance,
    load_pool,
    read_manifest,
    save_pool,
    synth_emotion_change,
    synth_gender_change,
    synth_markov,
    write_manifest,
)


def pool_utt(utt_id, speaker, gender, emotion, tokens=(0, 1, 2, 3)):
    return PoolUtterance(
        seq=TokenSequence(utt_id, tokens, 50.0, 8),
        speaker_id=speaker,
        gender=gender,
        emotion=emotion,
    )


@pytest.fixture()
def small_pool():
    return LabeledPool(
        utterances=[
            pool_utt("m1_neu_0", "m1", "male", "neutral", (0, 1, 2)),
            pool_utt("m1_neu_1", "m1", "male", "neutral", (3, 4)),
            pool_utt("m1_ang_0", "m1", "male", "angry", (5, 6, 7)),
            pool_utt("f1_neu_0", "f1", "female", "neutral", (1, 2)),
            pool_utt("f1_hap_0", "f1", "female", "happy", (2, 3, 4, 5)),
        ]
    )


class TestPool:
    def test_round_trip(self, small_pool, tmp_path):
        path = tmp_path / "pool.jsonl"
        save_pool(small_pool, str(path))
        loaded = load_pool(str(path))
        assert loaded.utterances == small_pool.utterances

    def test_rejects_mixed_frame_rate(self):
        bad = PoolUtterance(
            seq=TokenSequence("x", (0,), 16.0, 8),
            speaker_id="s",
            gender="male",
            emotion="neutral",
        )
        with pytest.raises(ValueError, match="disagrees"):
            LabeledPool(utterances=[pool_utt("a", "s", "male", "neutral"), bad])

    def test_rejects_unknown_gender(self):
        with pytest.raises(ValueError, match="gender"):
            LabeledPool(utterances=[pool_utt("a", "s", "robot", "neutral")])


class TestEmotionChange:
    def test_single_speaker_per_file(self, small_pool):
        ds = synth_emotion_change(small_pool, n_files=20, seg_range=(4, 8), rng_seed=1)
        assert ds.generator == "emotion-change"
        # each file sticks to one speaker's emotion set (m1 or f1)
        for _, ref in ds.files:
            labels = {s.label for s in ref.segments}
            assert labels <= {"neutral", "angry"} or labels <= {"neutral", "happy"}

    def test_adjacent_labels_differ_after_merge(self, small_pool):
        ds = synth_emotion_change(small_pool, n_files=30, seg_range=(4, 10), rng_seed=2)
        for _, ref in ds.files:
            labels = [s.label for s in ref.segments]
            assert all(a != b for a, b in zip(labels, labels[1:]))

    def test_keep_raw_joins_retains_every_concatenation(self, small_pool):
        ds = synth_emotion_change(
            small_pool, n_files=10, seg_range=(5, 5), rng_seed=3, keep_raw_joins=True
        )
        for _, ref in ds.files:
            assert len(ref.segments) == 5

    def test_tokens_match_annotation_extent(self, small_pool):
        ds = synth_emotion_change(small_pool, n_files=10, seg_range=(4, 8), rng_seed=4)
        for seq, ref in ds.files:
            assert math.isclose(seq.duration_s, ref.duration_s)

    def test_deterministic(self, small_pool):
        a = synth_emotion_change(small_pool, n_files=5, rng_seed=9)
        b = synth_emotion_change(small_pool, n_files=5, rng_seed=9)
        assert [s.tokens for s, _ in a.files] == [s.tokens for s, _ in b.files]

    def test_requires_a_multi_emotion_speaker(self):
        pool = LabeledPool(utterances=[pool_utt("a", "s", "male", "neutral")])
        with pytest.raises(ValueError, match="no speaker has >= 2 emotions"):
            synth_emotion_change(pool, n_files=1)


class TestGenderChange:
    def test_alternation(self, small_pool):
        ds = synth_gender_change(small_pool, n_files=20, seg_range=(4, 9), rng_seed=5)
        for i, (_, ref) in enumerate(ds.files):
            labels = [s.label for s in ref.segments]
            first = "male" if i % 2 == 0 else "female"
            expected = [first if j % 2 == 0 else ("female" if first == "male" else "male")
                        for j in range(len(labels))]
            assert labels == expected

    def test_requires_shared_emotion(self):
        pool = LabeledPool(
            utterances=[
                pool_utt("a", "m1", "male", "angry"),
                pool_utt("b", "f1", "female", "happy"),
            ]
        )
        with pytest.raises(ValueError, match="shares an emotion"):
            synth_gender_change(pool, n_files=1)


class TestMarkov:
    def test_deterministic_per_file(self):
        ds5, _ = synth_markov(2, 10, n_files=5, n_corpus_tokens=500, rng_seed=11)
        ds9, _ = synth_markov(2, 10, n_files=9, n_corpus_tokens=500, rng_seed=11)
        # file i depends only on (seed, i), not on how many files were asked for
        assert ds5.files[3][0].tokens == ds9.files[3][0].tokens

    def test_seed_changes_data(self):
        a, _ = synth_markov(2, 10, n_files=3, n_corpus_tokens=500, rng_seed=1)
        b, _ = synth_markov(2, 10, n_files=3, n_corpus_tokens=500, rng_seed=2)
        assert a.files[0][0].tokens != b.files[0][0].tokens

    def test_styles_emit_disjoint_token_sets(self):
        ds, _ = synth_markov(2, 10, n_files=20, n_corpus_tokens=500, rng_seed=3)
        emitted = {}
        for seq, ref in ds.files:
            fr = seq.frame_rate_hz
            for seg in ref.segments:
                a, b = round(seg.start_s * fr), round(seg.end_s * fr)
                emitted.setdefault(seg.label, set()).update(seq.tokens[a:b])
        labels = sorted(emitted)
        assert len(labels) == 2
        assert not (emitted[labels[0]] & emitted[labels[1]])
        assert len(emitted[labels[0]]) <= 5 and len(emitted[labels[1]]) <= 5

    def test_identical_styles_share_one_subset(self):
        ds, _ = synth_markov(
            4, 12, n_files=20, n_corpus_tokens=500, rng_seed=4, identical_styles=True
        )
        seen = set()
        for seq, _ in ds.files:
            seen.update(seq.tokens)
        assert len(seen) <= 3  # 12 tokens over 4 styles = 3 per subset

    def test_segment_count_range_inclusive(self):
        ds, _ = synth_markov(
            2, 10, seg_range=(2, 4), n_files=80, n_corpus_tokens=500, rng_seed=6
        )
        # counts before merging are not observable; merged counts stay in range
        counts = {len(r.segments) for _, r in ds.files}
        assert max(counts) == 4
        assert min(counts) >= 1

    def test_quantized_segment_lengths(self):
        ds, _ = synth_markov(
            3,
            12,
            seg_len_range_s=(2.0, 6.0),
            seg_len_step_s=0.5,
            n_files=15,
            n_corpus_tokens=500,
            rng_seed=7,
        )
        for _, ref in ds.files:
            for b in ref.boundaries:
                assert (b * 2) == pytest.approx(round(b * 2), abs=1e-9)

    def test_continuous_lengths_by_default(self):
        ds, _ = synth_markov(3, 12, n_files=15, n_corpus_tokens=500, rng_seed=7)
        off_grid = [
            b
            for _, ref in ds.files
            for b in ref.boundaries
            if abs(b * 2 - round(b * 2)) > 1e-9
        ]
        assert off_grid  # uniform lengths land between half-second marks

    def test_corpus_reaches_requested_size(self):
        _, corpus = synth_markov(2, 10, n_files=1, n_corpus_tokens=5000, rng_seed=8)
        total = sum(len(s.tokens) for s in corpus)
        assert total >= 5000
        assert total - len(corpus[-1].tokens) < 5000  # stops at first crossing
        assert corpus[0].utterance_id == "corpus_00000"

    def test_vocab_validation(self):
        with pytest.raises(ValueError, match="vocab_size >= n_styles"):
            synth_markov(5, 3, n_files=1, n_corpus_tokens=10)


class TestManifest:
    def test_round_trip_with_and_without_refs(self, tmp_path):
        ds, corpus = synth_markov(2, 10, n_files=3, n_corpus_tokens=300, rng_seed=12)
        path = tmp_path / "data.jsonl"
        write_manifest(list(ds.files), str(path), generator="markov", seed=12)
        loaded = read_manifest(str(path))
        assert [s.tokens for s, _ in loaded] == [s.tokens for s, _ in ds.files]
        assert [r.segments for _, r in loaded] == [r.segments for _, r in ds.files]

        cpath = tmp_path / "corpus.jsonl"
        write_manifest(
            [(s, None) for s in corpus], str(cpath), generator="markov-corpus", seed=12
        )
        assert all(r is None for _, r in read_manifest(str(cpath)))
