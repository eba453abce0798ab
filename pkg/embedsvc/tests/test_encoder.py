import numpy as np
import pytest

from embedsvc.encoder import EncoderError, HashingEncoder, get_encoder


def cosine(a, b):
    return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))


class TestHashingEncoder:
    def test_identical_texts_identical_vectors(self):
        enc = HashingEncoder(dim=128)
        v = enc.encode(["SQL injection in the login form"] * 2)
        np.testing.assert_array_equal(v[0], v[1])
        assert cosine(v[0], v[1]) == pytest.approx(1.0, abs=1e-6)

    def test_deterministic_across_instances(self):
        a = HashingEncoder(dim=64).encode(["buffer overflow"])
        b = HashingEncoder(dim=64).encode(["buffer overflow"])
        np.testing.assert_array_equal(a, b)

    def test_empty_list_rejected(self):
        with pytest.raises(EncoderError):
            HashingEncoder().encode([])

    def test_empty_text_rejected(self):
        with pytest.raises(EncoderError):
            HashingEncoder().encode(["ok", "  "])

    def test_related_sentences_closer_than_unrelated(self):
        # regression fixture: recorded from the hash:256 encoder
        enc = HashingEncoder(dim=256)
        v = enc.encode([
            "sql injection",
            "improper neutralization of sql command",
            "the weather is nice today",
        ])
        related = cosine(v[0], v[1])
        unrelated = cosine(v[0], v[2])
        assert related > unrelated
        assert related == pytest.approx(0.4472135955, abs=1e-6)
        assert unrelated == pytest.approx(0.0, abs=1e-6)

    def test_truncation_at_max_seq(self):
        enc = HashingEncoder(dim=64, max_seq=4)
        base = enc.encode(["alpha beta gamma delta"])
        longer = enc.encode(["alpha beta gamma delta epsilon zeta"])
        np.testing.assert_array_equal(base, longer)

    def test_normalized_rows_unit_length(self):
        v = HashingEncoder(dim=128).encode(["integer overflow in parser"], normalize=True)
        assert np.linalg.norm(v[0]) == pytest.approx(1.0, abs=1e-12)

    def test_bad_dim(self):
        with pytest.raises(EncoderError):
            HashingEncoder(dim=0)


class TestGetEncoder:
    def test_hash_spec(self):
        enc = get_encoder("hash:96")
        assert enc.dim == 96
        assert enc.name == "hash:96"

    def test_default_hash_dim(self):
        assert get_encoder("hash:").dim == 256

    def test_st_spec_requires_model(self):
        with pytest.raises(EncoderError):
            get_encoder("st:")

    def test_unknown_spec(self):
        with pytest.raises(EncoderError):
            get_encoder("word2vec:100")
