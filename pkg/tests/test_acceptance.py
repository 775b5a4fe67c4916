"""End-to-end recovery of planted pairs on the default synthetic corpus.

The threshold is tuned on a disjoint corpus (next seed) and then applied
unchanged to the main one.  Takes tens of seconds: exact 10k x 10k search at d=1024.
"""
import unittest

from src.search.exact import SearchParams
from src.mining.miner import best_matches, mine, predict_bucc
from src.evaluation.bucc import score, tune_threshold
from src.evaluation.synthetic import SyntheticSpec, generate_synthetic, tuning_spec


class TestPlantedRecovery(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.spec = SyntheticSpec(n_src=10000, n_tgt=10000, n_planted=5000, dim=1024, noise_sigma=0.1, seed=42)
        tune = generate_synthetic(tuning_spec(cls.spec, 1000))
        candidates = best_matches(tune.src, tune.src_emb, tune.tgt, tune.tgt_emb, threads=4)
        cls.threshold, cls.tune_report = tune_threshold(candidates, tune.gold)
        cls.main = generate_synthetic(cls.spec)

    def test_tuned_threshold_separates_planted_pairs(self):
        self.assertGreater(self.tune_report.f1, 95.0)
        self.assertTrue(0.5 < self.threshold < 1.0, self.threshold)

    def test_best_match_prediction(self):
        m = self.main
        pred = predict_bucc(m.src, m.src_emb, m.tgt, m.tgt_emb, self.threshold, threads=4)
        report = score(pred, m.gold, self.threshold)
        self.assertGreaterEqual(report.recall, 95.0)
        self.assertGreaterEqual(report.precision, 95.0)

    def test_knn_mining_recall(self):
        m = self.main
        pairs = mine(m.src, m.src_emb, m.tgt, m.tgt_emb, SearchParams(k=20), t=self.threshold, threads=4)
        report = score(pairs, m.gold, self.threshold)
        self.assertGreaterEqual(report.recall, 95.0)
        self.assertGreaterEqual(report.precision, 95.0)


if __name__ == '__main__':
    unittest.main()
