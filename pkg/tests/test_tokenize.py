import numpy as np
import pytest

from apxsel.tokenize import (
    PadCollisionWarning,
    TokenizerConfig,
    qgram_tokenize,
    word_qgrams,
    word_tokenize,
)


class TestQgramTokenize:
    def test_db_lab_trigrams_unpadded(self):
        cfg = TokenizerConfig(q=3, padded=False, case_fold=False)
        assert dict(qgram_tokenize("db lab", cfg)) == {"db ": 1, "b l": 1, " la": 1, "lab": 1}

    def test_empty_string_unpadded(self):
        assert qgram_tokenize("", TokenizerConfig(q=2, padded=False)) == {}

    def test_padded_fold(self):
        cfg = TokenizerConfig(q=2, padded=True, case_fold=True)
        assert dict(qgram_tokenize("ab", cfg)) == {"$A": 1, "AB": 1, "B$": 1}

    def test_empty_string_padded_yields_nothing(self):
        # pure-padding grams would make all empty strings maximally similar
        assert qgram_tokenize("", TokenizerConfig(q=2)) == {}

    def test_whitespace_run_collapses_to_pads(self):
        cfg = TokenizerConfig(q=2, padded=True, case_fold=False)
        assert qgram_tokenize("a  b", cfg) == qgram_tokenize("a b", cfg)

    def test_unpadded_gram_count_exact(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = int(rng.integers(0, 15))
            s = "".join(rng.choice(list("abcd"), size=n))
            for q in (1, 2, 3, 5):
                counts = qgram_tokenize(s, TokenizerConfig(q=q, padded=False))
                assert sum(counts.values()) == max(0, len(s) - q + 1)

    def test_padded_gram_count_matches_join_bound(self):
        # total grams == L + q - 1 where L is the length after replacing
        # each whitespace run with q-1 pad symbols
        rng = np.random.default_rng(1)
        for _ in range(100):
            words = [
                "".join(rng.choice(list("abcd"), size=rng.integers(1, 6)))
                for _ in range(rng.integers(1, 4))
            ]
            s = " ".join(words)
            for q in (2, 3):
                counts = qgram_tokenize(s, TokenizerConfig(q=q))
                L = len(s.replace(" ", "$" * (q - 1)))
                assert sum(counts.values()) == L + q - 1

    def test_padded_two_word_set_is_order_insensitive(self):
        rng = np.random.default_rng(2)
        cfg = TokenizerConfig(q=2)
        for _ in range(50):
            a = "".join(rng.choice(list("abcdef"), size=rng.integers(1, 7)))
            b = "".join(rng.choice(list("abcdef"), size=rng.integers(1, 7)))
            if a == b:
                continue
            assert set(qgram_tokenize(f"{a} {b}", cfg)) == set(qgram_tokenize(f"{b} {a}", cfg))

    def test_determinism(self):
        cfg = TokenizerConfig(q=3)
        assert qgram_tokenize("Morgan Stanley", cfg) == qgram_tokenize("Morgan Stanley", cfg)

    def test_pad_collision_warns(self):
        with pytest.warns(PadCollisionWarning):
            qgram_tokenize("a$b", TokenizerConfig(q=2))

    def test_q_must_be_positive(self):
        with pytest.raises(ValueError):
            TokenizerConfig(q=0)

    def test_pad_char_single(self):
        with pytest.raises(ValueError):
            TokenizerConfig(pad_char="$$")


class TestWordTokenize:
    def test_sample_tuple(self):
        assert word_tokenize("Morgan Stanley Group Inc.") == [
            "MORGAN", "STANLEY", "GROUP", "INC.",
        ]

    def test_empty(self):
        assert word_tokenize("") == []

    def test_whitespace_run(self):
        assert word_tokenize("a  b") == ["A", "B"]

    def test_no_fold(self):
        cfg = TokenizerConfig(case_fold=False)
        assert word_tokenize("Ab cD", cfg) == ["Ab", "cD"]

    def test_order_and_duplicates_preserved(self):
        assert word_tokenize("b a b") == ["B", "A", "B"]


class TestWordQgrams:
    def test_two_words(self):
        got = word_qgrams("ab cd", TokenizerConfig(q=2))
        assert got == {
            ("AB", "$A"), ("AB", "AB"), ("AB", "B$"),
            ("CD", "$C"), ("CD", "CD"), ("CD", "D$"),
        }

    def test_empty(self):
        assert word_qgrams("", TokenizerConfig(q=2)) == set()

    def test_duplicate_word_collapses(self):
        assert len(word_qgrams("aa aa", TokenizerConfig(q=2))) == 3
