import math

import numpy as np
import pytest

from apxsel.corpus import Record
from apxsel.index import build_index, minhash_signature, sim_mh
from apxsel.predicates import GESParams, SoftTFIDFParams
from apxsel.tokenize import TokenizerConfig
from apxsel import strdist

from oracles import (
    OracleWordStats,
    edit_sim_ref,
    jw_ref,
    lev_ref,
    o_edit_all,
    o_ges,
    o_word_gram_set,
)


def build(strings, **kw):
    return build_index([Record(i + 1, s) for i, s in enumerate(strings)], **kw)


class TestLevenshtein:
    def test_identical(self):
        assert strdist.levenshtein("abc", "abc") == 0

    def test_kitten_sitting(self):
        assert strdist.levenshtein("kitten", "sitting") == 3

    def test_empty_vs_abc(self):
        assert strdist.levenshtein("", "abc") == 3

    def test_matches_reference_on_random_pairs(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            a = "".join(rng.choice(list("abcd"), size=rng.integers(0, 10)))
            b = "".join(rng.choice(list("abcd"), size=rng.integers(0, 10)))
            assert strdist.levenshtein(a, b) == lev_ref(a, b)

    def test_symmetry_and_triangle(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            a, b, c = (
                "".join(rng.choice(list("abc"), size=rng.integers(0, 8))) for _ in range(3)
            )
            assert strdist.levenshtein(a, b) == strdist.levenshtein(b, a)
            assert strdist.levenshtein(a, c) <= (
                strdist.levenshtein(a, b) + strdist.levenshtein(b, c)
            )


class TestEditSimilarity:
    def test_identical(self):
        assert strdist.edit_similarity("abc", "abc") == 1.0

    def test_kitten_sitting(self):
        assert strdist.edit_similarity("kitten", "sitting") == pytest.approx(1 - 3 / 7)

    def test_disjoint_equal_length(self):
        assert strdist.edit_similarity("aaa", "bbb") == 0.0

    def test_both_empty(self):
        assert strdist.edit_similarity("", "") == 1.0


class TestJaroWinkler:
    def test_identical(self):
        assert strdist.jaro_winkler("HELLO", "HELLO") == 1.0

    def test_one_empty(self):
        assert strdist.jaro_winkler("", "ABC") == 0.0

    def test_martha_marhta(self):
        # frozen from the reference formula: jaro 17/18, prefix 3
        assert strdist.jaro_winkler("MARTHA", "MARHTA") == pytest.approx(0.9611111111111111)

    def test_matches_reference_on_random_pairs(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            a = "".join(rng.choice(list("abcde"), size=rng.integers(0, 9)))
            b = "".join(rng.choice(list("abcde"), size=rng.integers(0, 9)))
            assert strdist.jaro_winkler(a, b) == pytest.approx(jw_ref(a, b), abs=1e-12)


class TestQgramCountFilter:
    def test_theta_validated(self):
        idx = build(["abc", "abd"])
        with pytest.raises(ValueError):
            strdist.qgram_count_filter(idx, "abc", 0.0)

    def test_requires_padded_index(self):
        idx = build(["abc"], cfg=TokenizerConfig(q=2, padded=False))
        with pytest.raises(ValueError, match="padded"):
            strdist.qgram_count_filter(idx, "abc", 0.8)

    def test_exact_match_always_admitted(self):
        idx = build(["abcdef", "zzzzzz"])
        assert 1 in strdist.qgram_count_filter(idx, "abcdef", 1.0).tolist()

    def test_low_theta_admits_all_joined(self):
        idx = build(["abc", "abd", "zzb"])
        cands = strdist.qgram_count_filter(idx, "ab", 1e-9)
        # every tuple sharing at least one padded gram appears ("zzb" shares "B$")
        assert set(cands.tolist()) == {1, 2, 3}

    def test_completeness_no_false_negatives(self):
        rng = np.random.default_rng(6)
        strings = [
            " ".join(
                "".join(rng.choice(list("abcde"), size=rng.integers(1, 8)))
                for _ in range(rng.integers(1, 3))
            )
            for _ in range(200)
        ]
        idx = build(strings)
        for theta in (0.7, 0.8, 0.9):
            for qi in rng.choice(len(strings), size=20, replace=False):
                query = strings[int(qi)]
                cands = set(strdist.qgram_count_filter(idx, query, theta).tolist())
                for tid, s in enumerate(strings, start=1):
                    if edit_sim_ref(query.upper(), s.upper()) >= theta:
                        assert tid in cands


class TestScoreEdit:
    def test_self_query_first_with_one(self):
        idx = build(["hello world", "other thing", "hello word"])
        ranked = strdist.score_edit(idx, "hello world", 0.7)
        assert ranked.pairs()[0] == (1, 1.0)

    def test_matches_brute_force_above_theta(self):
        rng = np.random.default_rng(7)
        strings = [
            "".join(rng.choice(list("abcd"), size=rng.integers(2, 9))) for _ in range(40)
        ]
        idx = build(strings)
        corpus_pairs = list(enumerate(strings, start=1))
        for qi in range(0, 40, 7):
            query = strings[qi]
            got = dict(strdist.score_edit(idx, query, 0.7).pairs())
            want = {t: edit_sim_ref(query.upper(), s.upper()) for t, s in corpus_pairs}
            for tid, sim in want.items():
                if sim >= 0.7:
                    assert got[tid] == pytest.approx(sim, abs=1e-9)
            for tid, sim in got.items():
                assert sim == pytest.approx(want[tid], abs=1e-9)


class TestGESExact:
    def test_identical_strings(self):
        w = {"FOO": 2.0, "BAR": 1.0}
        assert strdist.ges_exact("foo bar", "foo bar", lambda t: w.get(t, 1.0)) == 1.0

    def test_single_word_pair_hand_dp(self):
        # replace AB -> AD: (1 - 1/2) * w(AB) = 0.5 * 2 = 1; wt(Q)=2
        score = strdist.ges_exact("ab", "ad", lambda t: 2.0, c_ins=0.5)
        assert score == pytest.approx(1.0 - 1.0 / 2.0)

    def test_cost_above_weight_clamps_to_zero(self):
        assert strdist.ges_exact("ab", "xy zz qq", lambda t: 1.0, c_ins=1.0) == 0.0

    def test_zero_query_weight(self):
        assert strdist.ges_exact("ab", "ab", lambda t: 0.0) == 0.0

    def test_ranking_matches_oracle(self):
        rng = np.random.default_rng(8)
        strings = [
            " ".join(
                "".join(rng.choice(list("abcd"), size=rng.integers(1, 6)))
                for _ in range(rng.integers(1, 4))
            )
            for _ in range(25)
        ]
        idx = build(strings)
        stats = OracleWordStats(list(enumerate(strings, start=1)))
        for qi in (0, 5, 11):
            got = dict(strdist.ges_score(idx, strings[qi]).pairs())
            want = o_ges(stats, strings[qi])
            assert set(got) == set(want)
            for tid in want:
                assert got[tid] == pytest.approx(want[tid], abs=1e-9)

    def test_self_score_one_and_range(self):
        rng = np.random.default_rng(9)
        strings = ["aa bb", "cc dd", "ab cd", "zz"]
        idx = build(strings)
        for qi, s in enumerate(strings):
            ranked = strdist.ges_score(idx, s)
            scores = dict(ranked.pairs())
            assert scores[qi + 1] == pytest.approx(1.0)
            assert all(0.0 <= v <= 1.0 for v in scores.values())


class TestMinHash:
    def test_identical_words_agree(self):
        s1 = minhash_signature({"$A", "AB", "B$"}, h=5, seed=3)
        s2 = minhash_signature({"$A", "AB", "B$"}, h=5, seed=3)
        assert sim_mh(s1, s2) == 1.0

    def test_signature_length(self):
        assert minhash_signature({"AB"}, h=7, seed=0).shape == (7,)

    def test_deterministic_given_seed(self):
        a = minhash_signature({"AB", "BC"}, h=5, seed=11)
        b = minhash_signature({"AB", "BC"}, h=5, seed=11)
        np.testing.assert_array_equal(a, b)

    def test_disjoint_sets_rarely_agree(self):
        agree = 0
        for seed in range(200):
            s1 = minhash_signature({"$A", "AX", "X$"}, h=5, seed=seed)
            s2 = minhash_signature({"$B", "BY", "Y$"}, h=5, seed=seed)
            agree += sim_mh(s1, s2)
        assert agree / 200 < 0.01

    def test_estimator_tracks_jaccard(self):
        # mean agreement over seeds approximates the true Jaccard
        pairs = [("STANLEY", "STANLEYS"), ("MORGAN", "MORGEN"), ("GROUP", "GROVE")]
        for a, b in pairs:
            ga, gb = o_word_gram_set(a), o_word_gram_set(b)
            true_j = len(ga & gb) / len(ga | gb)
            est = np.mean(
                [sim_mh(minhash_signature(ga, 5, s), minhash_signature(gb, 5, s))
                 for s in range(500)]
            )
            assert abs(est - true_j) <= 0.06

    def test_index_signatures_match_standalone(self):
        idx = build(["stanley morgan", "grove group"])
        mh = idx.ensure_minhash(2, h=5, seed=9)
        word = idx.word
        for wid, token in enumerate(word.vocab.tokens):
            expect = minhash_signature(o_word_gram_set(token), h=5, seed=9)
            np.testing.assert_array_equal(mh.sigs[wid], expect)


class TestGesApxConvergence:
    def test_large_h_converges_to_jaccard_variant(self):
        rng = np.random.default_rng(10)
        strings = [
            " ".join(
                "".join(rng.choice(list("abcde"), size=rng.integers(2, 7)))
                for _ in range(rng.integers(1, 4))
            )
            for _ in range(20)
        ]
        idx = build(strings)
        for qi in range(0, 20, 3):
            exact = dict(strdist.ges_jaccard_score(idx, strings[qi]).pairs())
            apx = dict(strdist.ges_apx_score(idx, strings[qi], h=256, seed=1).pairs())
            # candidate sets agree and scores converge (rank flips remain
            # possible only between genuine near-ties)
            assert set(exact) == set(apx)
            for tid in exact:
                assert apx[tid] == pytest.approx(exact[tid], abs=0.05)

    def test_identical_string_scores_one_capped(self):
        idx = build(["stanley morgan", "grove group"])
        jac = dict(strdist.ges_jaccard_score(idx, "stanley morgan").pairs())
        apx = dict(strdist.ges_apx_score(idx, "stanley morgan", h=5, seed=0).pairs())
        assert jac[1] == pytest.approx(1.0)
        assert apx[1] == pytest.approx(1.0)

    def test_uncapped_debug_value_exceeds_one_on_self_match(self):
        idx = build(["stanley morgan", "grove group"])
        capped, uncapped = strdist.ges_jaccard_score(idx, "stanley morgan", debug=True)
        # exact word matches contribute 1 + 1/q each
        assert dict(uncapped.pairs())[1] == pytest.approx(1.5)
        assert dict(capped.pairs())[1] == pytest.approx(1.0)


class TestSoftTFIDF:
    def test_identical_strings_score_one(self):
        idx = build(["stanley morgan", "grove group", "misc thing"])
        got = dict(strdist.soft_tfidf_score(idx, "stanley morgan").pairs())
        assert got[1] == pytest.approx(1.0, abs=1e-9)

    def test_near_one_theta_reduces_to_word_cosine(self):
        idx = build(["alpha beta", "beta gamma", "delta eps"])
        strict = strdist.soft_tfidf_score(
            idx, "alpha beta", SoftTFIDFParams(theta=1 - 1e-9)
        )
        # only exact word matches survive: equals word-level cosine
        stats = OracleWordStats([(1, "alpha beta"), (2, "beta gamma"), (3, "delta eps")])
        qw = stats.tfidf(1)
        for tid, score in strict.pairs():
            dw = stats.tfidf(tid)
            expect = sum(qw[w] * dw[w] for w in set(qw) & set(dw))
            assert score == pytest.approx(expect, abs=1e-9)

    def test_self_query_scores_bounded(self):
        # when each close query word has a distinct best match (always true
        # for self-queries), the score is a cosine-style dot product <= 1;
        # several query words sharing one best match can legitimately push
        # the raw formula above 1
        rng = np.random.default_rng(11)
        strings = [
            " ".join(
                "".join(rng.choice(list("abc"), size=rng.integers(1, 5)))
                for _ in range(rng.integers(1, 4))
            )
            for _ in range(30)
        ]
        idx = build(strings)
        for qi in range(0, 30, 3):
            got = dict(strdist.soft_tfidf_score(idx, strings[qi]).pairs())
            assert got.get(qi + 1, 0.0) <= 1.0 + 1e-9


class TestGesOverestimation:
    def test_ges_jaccard_usually_dominates_exact(self):
        # statistical property: the over-estimate is rarely below exact GES
        rng = np.random.default_rng(12)
        strings = [
            " ".join(
                "".join(rng.choice(list("abcd"), size=rng.integers(2, 7)))
                for _ in range(rng.integers(1, 4))
            )
            for _ in range(30)
        ]
        idx = build(strings)
        below = total = 0
        for qi in range(0, 30, 3):
            exact = dict(strdist.ges_score(idx, strings[qi], GESParams(c_ins=0.5)).pairs())
            over = dict(strdist.ges_jaccard_score(idx, strings[qi], debug=True)[1].pairs())
            for tid, s in exact.items():
                if tid in over:
                    total += 1
                    if over[tid] < s - 1e-9:
                        below += 1
        assert total > 50
        assert below / total < 0.15
