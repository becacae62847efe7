import json
import math

import pytest

from pmiseg.lm import ExternalScores, SchemaError, ScoreRecord, train_ngram
from pmiseg.scorer import (
    EmbeddingRecord,
    SentenceEmbeddings,
    cosine_scores,
    load_sentence_embeddings,
    pmi_scores,
    save_sentence_embeddings,
    span_log_probs,
)
from pmiseg.sentencer import TokenSequence, chunk_fixed


@pytest.fixture()
def bigram_0101():
    train = TokenSequence("t", (0, 1, 0, 1), 1.0, 2)
    return train_ngram([train], order=2, smoothing_alpha=1.0)


def one_token_chunks(tokens, vocab=2):
    seq = TokenSequence("u", tuple(tokens), 1.0, vocab)
    return chunk_fixed(seq, 1.0)


class TestPmiScores:
    def test_hand_computed_value(self, bigram_0101):
        # chunks [0] and [1]:
        #   logP([0,1]) = ln(2/3) + ln(3/4)
        #   logP([0])   = ln(2/3)
        #   logP([1])   = ln(1/3)
        # PMI = ln(3/4) - ln(1/3) = ln(9/4)
        scores = pmi_scores(bigram_0101, one_token_chunks([0, 1]))
        assert scores.scorer_kind == "pmi"
        assert scores.scores == pytest.approx((math.log(2.25),), abs=1e-12)

    def test_span_log_probs(self, bigram_0101):
        singles, pairs = span_log_probs(bigram_0101, one_token_chunks([0, 1]))
        assert singles == pytest.approx([math.log(2 / 3), math.log(1 / 3)])
        assert pairs == pytest.approx([math.log(2 / 3) + math.log(0.75)])

    def test_score_count(self, bigram_0101):
        chunks = one_token_chunks([0, 1, 0, 0, 1])
        assert len(pmi_scores(bigram_0101, chunks).scores) == 4

    def test_single_chunk_is_empty(self, bigram_0101):
        assert pmi_scores(bigram_0101, one_token_chunks([0])).scores == ()

    def test_no_sentences(self, bigram_0101):
        with pytest.raises(ValueError):
            pmi_scores(bigram_0101, [])

    def test_external_provider_matches_model(self, bigram_0101):
        chunks = one_token_chunks([0, 1, 1])
        singles, pairs = span_log_probs(bigram_0101, chunks)
        external = ExternalScores(
            records={
                "u": ScoreRecord("u", 1.0, 1.0, 3, tuple(singles), tuple(pairs), False)
            }
        )
        assert (
            pmi_scores(external, chunks).scores
            == pmi_scores(bigram_0101, chunks).scores
        )

    def test_external_missing_utterance(self):
        with pytest.raises(ValueError, match="do not cover"):
            pmi_scores(ExternalScores(), one_token_chunks([0, 1]))

    def test_external_chunk_count_mismatch(self):
        external = ExternalScores(
            records={"u": ScoreRecord("u", 1.0, 1.0, 5, (-1.0,) * 5, (-1.0,) * 4, False)}
        )
        with pytest.raises(ValueError, match="5 chunks"):
            pmi_scores(external, one_token_chunks([0, 1]))


class TestCosineScores:
    def test_hand_computed(self):
        rec = EmbeddingRecord("u", 0.5, 2, ((1.0, 0.0), (1.0, 1.0), (-1.0, 0.0)))
        scores = cosine_scores(rec)
        assert scores.scorer_kind == "cosine"
        assert scores.scores == pytest.approx(
            (1 / math.sqrt(2), -1 / math.sqrt(2)), abs=1e-12
        )

    def test_orthogonal_is_zero(self):
        rec = EmbeddingRecord("u", 0.5, 2, ((1.0, 0.0), (0.0, 3.0)))
        assert cosine_scores(rec).scores == pytest.approx((0.0,))

    def test_zero_norm_rejected(self):
        rec = EmbeddingRecord("u", 0.5, 2, ((1.0, 0.0), (0.0, 0.0)))
        with pytest.raises(ValueError, match="zero-norm"):
            cosine_scores(rec)


class TestEmbeddingsFile:
    def test_round_trip(self, tmp_path):
        rec = EmbeddingRecord("u", 0.5, 3, ((0.5, -1.0, 2.0), (1.0, 1.0, 1.0)))
        path = tmp_path / "e.jsonl"
        save_sentence_embeddings(SentenceEmbeddings(records={"u": rec}), str(path))
        loaded = load_sentence_embeddings(str(path))
        assert loaded["u"] == rec

    def emb_line(self, **overrides):
        doc = {
            "utterance_id": "u",
            "sentence_len_s": 0.5,
            "m": 2,
            "dim": 2,
            "vectors": [[1.0, 0.0], [0.0, 1.0]],
        }
        doc.update(overrides)
        return json.dumps(doc)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"vectors": [[1.0, 0.0]]},  # m mismatch
            {"vectors": [[1.0], [0.0, 1.0]]},  # dim mismatch
            {"vectors": [[1.0, 0.0], [1e999, 1.0]]},  # non-finite
        ],
    )
    def test_schema_violations(self, tmp_path, overrides):
        path = tmp_path / "e.jsonl"
        path.write_text(self.emb_line(**overrides) + "\n")
        with pytest.raises(SchemaError):
            load_sentence_embeddings(str(path))

    def test_duplicate_utterance(self, tmp_path):
        path = tmp_path / "e.jsonl"
        path.write_text(self.emb_line() + "\n" + self.emb_line() + "\n")
        with pytest.raises(SchemaError, match="duplicate"):
            load_sentence_embeddings(str(path))
