import unittest

from src.shared.errors import ConfigError, ValidationError
from src.shared.records import Corpus
from src.preprocess.lid import bundled_seed_paths, load_seed_samples, read_seed_file, train_lid
from src.preprocess.rules import (PreprocessConfig, count_commas, count_words, preprocess_bitext,
                                  preprocess_corpus)

_LID = None


def bundled_lid():
    global _LID
    if _LID is None:
        _LID = train_lid(load_seed_samples(bundled_seed_paths()))
    return _LID


def seeds(lang):
    return read_seed_file(bundled_seed_paths()[lang])


class TestCounting(unittest.TestCase):
    def test_commas(self):
        self.assertEqual(count_commas("a, b, c, d"), 3)
        self.assertEqual(count_commas(""), 0)
        self.assertEqual(count_commas("一，二，三，四，五"), 4)
        self.assertEqual(count_commas("甲、乙"), 1)

    def test_words(self):
        self.assertEqual(count_words("Hello world"), 2)
        self.assertEqual(count_words("  a   b  "), 2)
        self.assertEqual(count_words(""), 0)


class TestConfig(unittest.TestCase):
    def test_invalid_values(self):
        for cfg in (PreprocessConfig(max_commas=-1), PreprocessConfig(max_words=0),
                    PreprocessConfig(lid_min_confidence=1.5)):
            with self.assertRaises(ConfigError):
                cfg.validate()

    def test_lid_needs_a_model(self):
        with self.assertRaises(ConfigError):
            preprocess_corpus(Corpus.from_texts("en", ["x"]), PreprocessConfig())


class TestPreprocessCorpus(unittest.TestCase):
    def test_four_sentence_example(self):
        en = seeds("en")
        clean = next(s for s in en if count_commas(s) == 0)
        texts = [
            clean,
            "one, two, three, four, five, six",          # 5 commas
            " ".join(["word"] * 60),                      # 60 words
            seeds("de")[0],                               # wrong language
        ]
        out, report = preprocess_corpus(Corpus.from_texts("en", texts), PreprocessConfig(), bundled_lid())
        self.assertEqual(report.as_tuple(), (4, 3, 2, 1))
        self.assertEqual(out.texts(), [clean])

    def test_empty_corpus(self):
        out, report = preprocess_corpus(Corpus("en"), PreprocessConfig(), bundled_lid())
        self.assertEqual(out.size, 0)
        self.assertEqual(report.as_tuple(), (0, 0, 0, 0))

    def test_thousand_sentence_report(self):
        en = [s for s in seeds("en") if count_commas(s) == 0]
        de = seeds("de")
        texts = []
        texts += [en[i % len(en)] for i in range(825)]
        texts += [en[i % len(en)].replace(" ", ", ", 4) for i in range(100)]
        long_en = " ".join(en[:6])
        self.assertGreaterEqual(count_words(long_en), 50)
        texts += [long_en] * 50
        texts += [de[i % len(de)] for i in range(25)]
        corpus = Corpus.from_texts("en", texts)

        out, report = preprocess_corpus(corpus, PreprocessConfig(), bundled_lid())
        self.assertEqual(report.as_tuple(), (1000, 900, 850, 825))
        self.assertEqual(out.ids(), corpus.ids()[:825])

    def test_idempotent(self):
        texts = seeds("en")[:10] + seeds("fr")[:5] + ["a, b, c, d, e"]
        once, _ = preprocess_corpus(Corpus.from_texts("en", texts), PreprocessConfig(), bundled_lid())
        twice, report = preprocess_corpus(once, PreprocessConfig(), bundled_lid())
        self.assertEqual(once, twice)
        self.assertEqual(report.as_tuple(), (once.size,) * 4)

    def test_length_cap_is_strict(self):
        cfg = PreprocessConfig(max_words=5, lid_enabled=False)
        out, _ = preprocess_corpus(Corpus.from_texts("en", ["a b c d", "a b c d e"]), cfg)
        self.assertEqual(out.texts(), ["a b c d"])

    def test_report_tsv(self):
        _, report = preprocess_corpus(Corpus.from_texts("en", ["a"]), PreprocessConfig(lid_enabled=False))
        self.assertEqual(report.to_tsv(), "input\tafter_commas\tafter_length\tafter_lid\n1\t1\t1\t1\n")


class TestPreprocessBitext(unittest.TestCase):
    cfg = PreprocessConfig(lid_enabled=False)

    def test_target_commas_drop_pair(self):
        src = Corpus.from_texts("en", ["fine sentence", "another one"])
        tgt = Corpus.from_texts("de", ["a, b, c, d, e", "noch einer"])
        pairs, report = preprocess_bitext(src, tgt, self.cfg)
        self.assertEqual([(s.text, t.text) for s, t in pairs], [("another one", "noch einer")])
        self.assertEqual(report.as_tuple(), (2, 1, 1, 1))

    def test_clean_is_identity(self):
        src = Corpus.from_texts("en", ["x y", "z"])
        tgt = Corpus.from_texts("de", ["u v", "w"])
        pairs, _ = preprocess_bitext(src, tgt, self.cfg)
        self.assertEqual(pairs, list(zip(src.records, tgt.records)))

    def test_length_mismatch(self):
        with self.assertRaises(ValidationError):
            preprocess_bitext(Corpus.from_texts("en", ["a", "b", "c"]), Corpus.from_texts("de", ["a", "b"]), self.cfg)

    def test_lid_applies_to_both_sides(self):
        en, de = seeds("en"), seeds("de")
        src = Corpus.from_texts("en", [en[1], en[2]])
        tgt = Corpus.from_texts("de", [de[1], en[3]])
        pairs, report = preprocess_bitext(src, tgt, PreprocessConfig(), bundled_lid())
        self.assertEqual(len(pairs), 1)
        self.assertEqual(report.after_lid, 1)


if __name__ == '__main__':
    unittest.main()
