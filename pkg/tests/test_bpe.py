import os
import random
import tempfile
import unittest

from src.shared.errors import ParseError, ValidationError
from src.shared.records import Corpus
from src.bpe.model import (END_OF_WORD, BpeModel, apply_bpe, detokenize, learn_bpe, read_bpe,
                           write_bpe)


def brute_force_merges(texts, num_merges):
    """Recount every pair from scratch after each merge."""
    freq = {}
    for t in texts:
        for w in t.split():
            freq[w] = freq.get(w, 0) + 1
    segs = {w: tuple(w[:-1]) + (w[-1] + END_OF_WORD,) for w in freq}
    merges, done = [], set()
    while len(merges) < num_merges:
        counts = {}
        for w, seg in segs.items():
            for a, b in zip(seg, seg[1:]):
                counts[(a, b)] = counts.get((a, b), 0) + freq[w]
        options = [(-c, p) for p, c in counts.items() if p not in done]
        if not options:
            break
        neg, best = min(options)
        if -neg < 2:
            break
        merges.append(best)
        done.add(best)
        for w, seg in segs.items():
            out, i = [], 0
            while i < len(seg):
                if i + 1 < len(seg) and (seg[i], seg[i + 1]) == best:
                    out.append(seg[i] + seg[i + 1])
                    i += 2
                else:
                    out.append(seg[i])
                    i += 1
            segs[w] = tuple(out)
    return merges


TOY_CORPORA = [
    ["low low low low low", "lower lower newest newest newest", "widest widest newest"],
    ["aaaa aaa aa a", "aaaa aaaa b ab ab"],
    ["der die das", "the these those there", "les des mes tes", "derrière dessous là"],
]


class TestLearn(unittest.TestCase):
    def test_matches_brute_force(self):
        for texts in TOY_CORPORA:
            for budget in (1, 5, 50):
                model = learn_bpe([Corpus.from_texts("xx", texts)], budget)
                self.assertEqual(list(model.merges), brute_force_merges(texts, budget), (texts, budget))

    def test_joint_over_languages(self):
        en = Corpus.from_texts("en", ["newest lowest", "newest"])
        de = Corpus.from_texts("de", ["neuester", "lowest"])
        joint = learn_bpe([en, de], 30)
        self.assertEqual(list(joint.merges), brute_force_merges(en.texts() + de.texts(), 30))

    def test_budget_is_respected(self):
        texts = ["the cat sat on the mat with the hat"] * 3
        model = learn_bpe([Corpus.from_texts("en", texts)], 3)
        self.assertEqual(len(model.merges), 3)
        self.assertEqual(model.num_merges, 3)

    def test_stops_when_pairs_are_rare(self):
        model = learn_bpe([Corpus.from_texts("en", ["abc"])], 100)
        self.assertEqual(model.merges, ())

    def test_empty_corpus_rejected(self):
        with self.assertRaises(ValidationError):
            learn_bpe([Corpus.from_texts("en", ["", "   "])], 10)

    def test_duplicate_merge_rejected(self):
        with self.assertRaises(ValidationError):
            BpeModel((("a", "b"), ("a", "b")))

    def test_mid_word_marker_merge_rejected(self):
        with self.assertRaises(ValidationError):
            BpeModel((("a<", "/w>"),))
        BpeModel((("a", "b" + END_OF_WORD),))

    def test_marker_text_in_words(self):
        texts = ["x</w>y a</w>b</w> </w>"] * 4
        model = learn_bpe([Corpus.from_texts("en", texts)], 50)
        self.assertGreater(len(model.merges), 0)
        for text in texts + ["see a</w>b here", "</w></w>"]:
            tokens = apply_bpe(model, text)
            self.assertEqual(detokenize(tokens), " ".join(text.split()))
            self.assertEqual(sum(t.endswith(END_OF_WORD) for t in tokens), len(text.split()))


class TestApply(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.model = learn_bpe([Corpus.from_texts("en", TOY_CORPORA[0] + TOY_CORPORA[2])], 40)

    def test_known_word(self):
        tokens = apply_bpe(self.model, "low")
        self.assertEqual("".join(tokens), "low" + END_OF_WORD)
        self.assertTrue(tokens[-1].endswith(END_OF_WORD))

    def test_empty_text(self):
        self.assertEqual(apply_bpe(self.model, ""), [])

    def test_marker_text_survives(self):
        text = "see a</w>b here"
        self.assertEqual(detokenize(apply_bpe(self.model, text)), text)

    def test_round_trip_fuzz(self):
        rng = random.Random(1234)
        alphabet = "lowerstnidabc éßçàü</>" + "  \t"
        for _ in range(1000):
            s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 40)))
            self.assertEqual(detokenize(apply_bpe(self.model, s)), " ".join(s.split()))

    def test_lowercase(self):
        self.assertEqual(apply_bpe(self.model, "LOW", lowercase=True), apply_bpe(self.model, "low"))


class TestModelFile(unittest.TestCase):
    def test_write_read(self):
        model = learn_bpe([Corpus.from_texts("en", TOY_CORPORA[0])], 10)
        with tempfile.TemporaryDirectory() as d:
            p = os.path.join(d, "m.bpe")
            write_bpe(model, p)
            back = read_bpe(p)
        self.assertEqual(back.merges, model.merges)
        self.assertEqual(back.num_merges, 10)

    def test_bad_header(self):
        with tempfile.TemporaryDirectory() as d:
            p = os.path.join(d, "m.bpe")
            with open(p, "w", encoding="utf-8") as f:
                f.write("not a model\n")
            with self.assertRaises(ParseError):
                read_bpe(p)


if __name__ == '__main__':
    unittest.main()
