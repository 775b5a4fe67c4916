import os
import tempfile
import unittest

import numpy as np

from src.shared.errors import ConfigError, ValidationError
from src.shared.records import Corpus, EmbeddingMatrix, SentenceRecord
from src.corpus.io import write_embeddings
from src.bpe.model import learn_bpe
from src.embed_backends.hashed import EMPTY_TOKEN, HashedBaselineEncoder
from src.embed_backends.provider import (EMBED_BLOCK_ROWS, EmbedConfig, cosine_distance, embed_corpus,
                                         embed_sentence, make_provider)


class TestHashedEncoder(unittest.TestCase):
    def setUp(self):
        self.enc = HashedBaselineEncoder(dim=1024, seed=42)

    def test_unit_norm_and_dtype(self):
        v = embed_sentence(self.enc, ["hello", "world"])
        self.assertEqual(v.dtype, np.float32)
        self.assertEqual(v.shape, (1024,))
        self.assertAlmostEqual(float(np.linalg.norm(v)), 1.0, places=5)

    def test_deterministic_across_instances(self):
        a = HashedBaselineEncoder(dim=64, seed=7).embed_sentence(["x", "y"])
        b = HashedBaselineEncoder(dim=64, seed=7).embed_sentence(["x", "y"])
        np.testing.assert_array_equal(a, b)

    def test_seed_changes_vectors(self):
        a = HashedBaselineEncoder(dim=64, seed=1).embed_sentence(["x", "y"])
        b = HashedBaselineEncoder(dim=64, seed=2).embed_sentence(["x", "y"])
        self.assertFalse(np.array_equal(a, b))

    def test_order_and_repeats_do_not_matter(self):
        a = self.enc.embed_sentence(["a", "b", "c"])
        b = self.enc.embed_sentence(["c", "a", "b", "a"])
        np.testing.assert_array_equal(a, b)

    def test_token_vectors_in_range(self):
        v = self.enc.token_vector("token")
        self.assertTrue(np.all(v >= -1.0) and np.all(v < 1.0))
        self.assertEqual(len(self.enc.token_vector("")), 1024)

    def test_unrelated_sentences_near_orthogonal(self):
        rng = np.random.default_rng(0)
        sims = []
        for i in range(1000):
            n1, n2 = rng.integers(3, 20, size=2)
            left = [f"a{i}_{j}" for j in range(n1)]
            right = [f"b{i}_{j}" for j in range(n2)]
            sims.append(float(self.enc.embed_sentence(left) @ self.enc.embed_sentence(right)))
        self.assertTrue(all(-0.2 <= s <= 0.2 for s in sims), (min(sims), max(sims)))

    def test_shared_tokens_are_closer(self):
        a = self.enc.embed_sentence("the cat sat on the mat".split())
        b = self.enc.embed_sentence("the cat sat on a mat".split())
        c = self.enc.embed_sentence("dogs run fast".split())
        self.assertLess(cosine_distance(a, b), cosine_distance(a, c))

    def test_empty_tokens_rejected(self):
        with self.assertRaises(ValidationError):
            self.enc.embed_sentence([])

    def test_bad_dimension(self):
        with self.assertRaises(ValidationError):
            HashedBaselineEncoder(dim=0)


class TestCosineDistance(unittest.TestCase):
    def test_range(self):
        v = np.array([1.0, 0.0])
        self.assertEqual(cosine_distance(v, v), 0.0)
        self.assertEqual(cosine_distance(v, -v), 2.0)
        self.assertAlmostEqual(cosine_distance(v, np.array([0.0, 1.0])), 1.0)


class TestEmbedCorpus(unittest.TestCase):
    def test_rows_follow_corpus_and_empty_text(self):
        enc = HashedBaselineEncoder(dim=32, seed=3)
        c = Corpus.from_texts("en", ["hello world", "", "world hello"])
        m = embed_corpus(enc, c)
        self.assertEqual(list(m.ids), c.ids())
        np.testing.assert_array_equal(m.rows[0], m.rows[2])
        np.testing.assert_array_equal(m.rows[1], enc.embed_sentence([EMPTY_TOKEN]))

    def test_thread_count_does_not_change_output(self):
        rng = np.random.default_rng(5)
        words = [f"w{i}" for i in range(300)]
        texts = [" ".join(rng.choice(words, size=int(rng.integers(1, 12)))) for _ in range(EMBED_BLOCK_ROWS + 300)]
        c = Corpus.from_texts("en", texts)
        enc = HashedBaselineEncoder(dim=48, seed=9)
        one = embed_corpus(enc, c, threads=1)
        many = embed_corpus(HashedBaselineEncoder(dim=48, seed=9), c, threads=6)
        self.assertEqual(one.rows.tobytes(), many.rows.tobytes())

    def test_bpe_tokens(self):
        c = Corpus.from_texts("en", ["lower newest", "low low lower"])
        bpe = learn_bpe([c], 10)
        enc = make_provider(EmbedConfig(mode="hashed", dim=16, seed=1), bpe)
        m = embed_corpus(enc, c, bpe=bpe)
        self.assertEqual(m.rows.shape, (2, 16))


class TestProviders(unittest.TestCase):
    def test_unknown_mode(self):
        with self.assertRaises(ConfigError):
            make_provider(EmbedConfig(mode="neural"))

    def test_file_backed_selects_corpus_ids(self):
        rng = np.random.default_rng(1)
        m = EmbeddingMatrix.from_rows(["a", "b", "c"], rng.standard_normal((3, 8)))
        with tempfile.TemporaryDirectory() as d:
            p = os.path.join(d, "pre.bmem")
            write_embeddings(m, p)
            provider = make_provider(EmbedConfig(mode="file", source_path=p))
            c = Corpus("en", (SentenceRecord("c", "en", "x"), SentenceRecord("a", "en", "y")))
            out = embed_corpus(provider, c)
        self.assertEqual(out.ids, ("c", "a"))
        np.testing.assert_array_equal(out.rows[0], m.rows[2])
        with self.assertRaises(ValidationError):
            provider.embed_sentence(["x"])

    def test_file_mode_needs_a_path(self):
        with self.assertRaises(ConfigError):
            make_provider(EmbedConfig(mode="file"))


if __name__ == '__main__':
    unittest.main()
