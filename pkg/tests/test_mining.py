import random
import unittest

import numpy as np

from src.shared.errors import ValidationError
from src.shared.records import CandidatePair, Corpus, EmbeddingMatrix
from src.search.exact import SearchParams
from src.search.ivf import build_ivf
from src.mining.filtering import filter_by_threshold, score_bitext, sweep, threshold_grid
from src.mining.miner import best_match_pairs, best_matches, mine, predict_bucc
from src.mining.stats import histogram_table, length_histogram


def random_side(lang, n, d, rng, rows=None):
    c = Corpus.from_texts(lang, [f"{lang} sentence {i}" for i in range(n)])
    if rows is None:
        rows = rng.standard_normal((n, d))
    return c, EmbeddingMatrix.from_rows(c.ids(), rows)


class TestScoreBitext(unittest.TestCase):
    def test_identical_embeddings_score_zero(self):
        rng = np.random.default_rng(1)
        rows = rng.standard_normal((20, 16))
        src, es = random_side("en", 20, 16, rng, rows)
        tgt, et = random_side("de", 20, 16, rng, rows)
        pairs = score_bitext(src, tgt, es, et)
        self.assertEqual([p.src_id for p in pairs], src.ids())
        self.assertTrue(all(abs(p.distance) < 1e-6 for p in pairs))

    def test_matches_per_pair_dot(self):
        rng = np.random.default_rng(2)
        src, es = random_side("en", 30, 8, rng)
        tgt, et = random_side("de", 30, 8, rng)
        for i, p in enumerate(score_bitext(src, tgt, es, et)):
            want = 1.0 - float(np.dot(es.rows[i].astype(np.float64), et.rows[i].astype(np.float64)))
            self.assertAlmostEqual(p.distance, want, delta=1e-6)
            self.assertTrue(0.0 <= p.distance <= 2.0)

    def test_length_mismatch(self):
        rng = np.random.default_rng(3)
        src, es = random_side("en", 3, 4, rng)
        tgt, et = random_side("de", 2, 4, rng)
        with self.assertRaises(ValidationError):
            score_bitext(src, tgt, es, et)

    def test_misaligned_embeddings(self):
        rng = np.random.default_rng(4)
        src, es = random_side("en", 3, 4, rng)
        tgt, et = random_side("de", 3, 4, rng)
        with self.assertRaises(ValidationError):
            score_bitext(src, tgt, et, es)


class TestFilterAndSweep(unittest.TestCase):
    def setUp(self):
        rng = random.Random(7)
        self.pairs = [CandidatePair(f"s{i}", f"t{i}", round(rng.uniform(0.0, 2.0), 6)) for i in range(1000)]

    def test_extreme_thresholds(self):
        self.assertEqual(filter_by_threshold(self.pairs, 2.0), self.pairs)
        zero = [CandidatePair("a", "b", 0.0)]
        self.assertEqual(filter_by_threshold(self.pairs + zero, 0.0), zero)

    def test_filter_keeps_order_and_bound(self):
        kept = filter_by_threshold(self.pairs, 0.9)
        self.assertTrue(all(p.distance <= 0.9 for p in kept))
        self.assertEqual(kept, [p for p in self.pairs if p.distance <= 0.9])

    def test_threshold_out_of_range(self):
        with self.assertRaises(ValidationError):
            filter_by_threshold(self.pairs, 2.5)

    def test_sweep_is_monotone_and_matches_filter(self):
        grid = threshold_grid(0.0, 2.0, 2.0 / 49)
        self.assertEqual(len(grid), 50)
        curve = sweep(self.pairs, grid)
        counts = curve.counts()
        self.assertEqual(counts, sorted(counts))
        for t, c in curve.points:
            self.assertEqual(c, len(filter_by_threshold(self.pairs, t)))
        self.assertEqual(counts[-1], 1000)

    def test_sweep_needs_sorted_thresholds(self):
        with self.assertRaises(ValidationError):
            sweep(self.pairs, [0.9, 0.8])

    def test_sweep_tsv(self):
        curve = sweep([CandidatePair("a", "b", 0.5)], [0.4, 0.5])
        self.assertEqual(curve.to_tsv(), "threshold\tpairs\tpercent\n0.400000\t0\t0.0\n0.500000\t1\t100.0\n")

    def test_grid(self):
        self.assertEqual(threshold_grid(0.8, 1.0, 0.05), [0.8, 0.85, 0.9, 0.95, 1.0])
        with self.assertRaises(ValidationError):
            threshold_grid(1.0, 0.8, 0.05)


class TestMine(unittest.TestCase):
    def test_recovers_copies(self):
        rng = np.random.default_rng(10)
        rows = rng.standard_normal((40, 32))
        src, es = random_side("en", 40, 32, rng, rows)
        perm = rng.permutation(40)
        tgt, et = random_side("de", 40, 32, rng, rows[perm])
        pairs = mine(src, es, tgt, et, SearchParams(k=5), t=0.01)
        want = {(src.ids()[perm[j]], tgt.ids()[j]) for j in range(40)}
        self.assertEqual({(p.src_id, p.tgt_id) for p in pairs}, want)

    def test_threshold_below_every_distance(self):
        rng = np.random.default_rng(11)
        src, es = random_side("en", 10, 16, rng)
        tgt, et = random_side("de", 10, 16, rng)
        self.assertEqual(mine(src, es, tgt, et, SearchParams(k=3), t=0.0), [])

    def test_full_cross_product_at_max_threshold(self):
        rng = np.random.default_rng(12)
        src, es = random_side("en", 30, 8, rng)
        tgt, et = random_side("de", 25, 8, rng)
        pairs = mine(src, es, tgt, et, SearchParams(k=25), t=2.0)
        self.assertEqual(len(pairs), 30 * 25)
        oracle = {}
        for i, s in enumerate(src.ids()):
            for j, g in enumerate(tgt.ids()):
                oracle[(s, g)] = 1.0 - float(np.dot(es.rows[i].astype(np.float64), et.rows[j].astype(np.float64)))
        for p in pairs:
            self.assertAlmostEqual(p.distance, oracle[(p.src_id, p.tgt_id)], delta=1e-6)
        keys = [(p.distance, p.src_id, p.tgt_id) for p in pairs]
        self.assertEqual(keys, sorted(keys))

    def test_target_order_does_not_matter(self):
        rng = np.random.default_rng(13)
        src, es = random_side("en", 50, 16, rng)
        tgt, et = random_side("de", 60, 16, rng)
        order = list(rng.permutation(60))
        tgt2 = tgt.select([tgt.ids()[i] for i in order])
        et2 = et.select(tgt2.ids())
        a = mine(src, es, tgt, et, SearchParams(k=4), t=1.2)
        b = mine(src, es, tgt2, et2, SearchParams(k=4), t=1.2)
        self.assertEqual(a, b)

    def test_threads_do_not_change_output(self):
        rng = np.random.default_rng(14)
        src, es = random_side("en", 300, 16, rng)
        tgt, et = random_side("de", 200, 16, rng)
        params = SearchParams(k=5, block_rows=17)
        self.assertEqual(mine(src, es, tgt, et, params, t=1.0, threads=1),
                         mine(src, es, tgt, et, params, t=1.0, threads=8))

    def test_full_probe_ivf_equals_exact(self):
        rng = np.random.default_rng(15)
        src, es = random_side("en", 80, 16, rng)
        tgt, et = random_side("de", 120, 16, rng)
        index = build_ivf(et, nlist=8, seed=3)
        exact = mine(src, es, tgt, et, SearchParams(k=6), t=1.0)
        ivf = mine(src, es, tgt, et, SearchParams(k=6, nprobe=8), t=1.0, index=index)
        self.assertEqual([(p.src_id, p.tgt_id) for p in exact], [(p.src_id, p.tgt_id) for p in ivf])
        for a, b in zip(exact, ivf):
            self.assertAlmostEqual(a.distance, b.distance, delta=1e-6)

    def test_bidirectional_is_a_subset(self):
        rng = np.random.default_rng(16)
        src, es = random_side("en", 60, 8, rng)
        tgt, et = random_side("de", 60, 8, rng)
        params = SearchParams(k=2)
        fwd = set(mine(src, es, tgt, et, params, t=2.0))
        both = set(mine(src, es, tgt, et, params, t=2.0, bidirectional=True))
        self.assertTrue(both <= fwd)
        self.assertLess(len(both), len(fwd))

    def test_empty_target_rejected(self):
        rng = np.random.default_rng(17)
        src, es = random_side("en", 3, 4, rng)
        tgt = Corpus("de")
        et = EmbeddingMatrix.from_rows([], np.zeros((0, 4)), dim=4)
        with self.assertRaises(ValidationError):
            mine(src, es, tgt, et)

    def test_index_over_other_targets_rejected(self):
        rng = np.random.default_rng(18)
        src, es = random_side("en", 10, 4, rng)
        tgt, et = random_side("de", 10, 4, rng)
        _, other = random_side("fr", 10, 4, rng)
        with self.assertRaises(ValidationError):
            mine(src, es, tgt, et, SearchParams(nprobe=2), index=build_ivf(other, nlist=2))


class TestBestMatches(unittest.TestCase):
    def test_one_prediction_per_source(self):
        rng = np.random.default_rng(20)
        src, es = random_side("en", 50, 8, rng)
        tgt, et = random_side("de", 40, 8, rng)
        pred = predict_bucc(src, es, tgt, et, t=2.0)
        self.assertEqual(len(pred), 50)
        self.assertEqual(len({s for s, _ in pred}), 50)
        matches = best_matches(src, es, tgt, et)
        tight = predict_bucc(src, es, tgt, et, t=0.5)
        self.assertEqual(tight, {(s, g) for s, (g, d) in matches.items() if d <= 0.5})

    def test_best_match_pairs_sorted(self):
        pairs = best_match_pairs({"b": ("x", 0.2), "a": ("y", 0.2), "c": ("z", 0.1)})
        self.assertEqual([p.src_id for p in pairs], ["c", "a", "b"])


class TestLengthHistogram(unittest.TestCase):
    def test_small_corpus(self):
        h = length_histogram(Corpus.from_texts("en", ["a b", "c d e f"]))
        self.assertEqual(h.mean_length, 3.0)
        self.assertEqual(h.bins, {2: 1, 4: 1})
        self.assertEqual(h.to_tsv(), "length\tsentences\n2\t1\n4\t1\n")

    def test_empty_corpus(self):
        h = length_histogram(Corpus("en"))
        self.assertTrue(h.empty)
        self.assertEqual(h.total, 0)

    def test_table(self):
        table = histogram_table({
            "en": length_histogram(Corpus.from_texts("en", ["a b", "c"])),
            "de": length_histogram(Corpus("de")),
        })
        self.assertEqual(table, "length\ten\tde\n1\t1\t0\n2\t1\t0\nmean\t1.50\tNA\n")


if __name__ == '__main__':
    unittest.main()
