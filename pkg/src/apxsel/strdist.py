"""Character- and word-level similarity: edit distance with q-gram count
filtering, Jaro-Winkler, generalized edit similarity (exact, Jaccard
over-estimate, and min-hash approximation), and SoftTFIDF.

Pairwise functions operate on raw strings.  Index-level scorers fold case
according to the index tokenizer config so their semantics line up with the
token predicates.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .index import (
    ApproxIndex,
    MinHashIndex,
    gram_base_hash,
    minhash_signature,
    sim_mh,
)
from .predicates import GESParams, SoftTFIDFParams
from .ranking import RankedResult, empty_result, rank_rows
from .tokenize import TokenizerConfig, qgram_tokenize, qgrams_of_word, word_tokenize


def build_minhash(index: ApproxIndex, h: int = 5, seed: int = 0, q: Optional[int] = None) -> MinHashIndex:
    """Materialize (or fetch) per-word min-hash signatures on the index."""
    return index.ensure_minhash(q, h=h, seed=seed)


# ---------------------------------------------------------------------------
# pairwise distances
# ---------------------------------------------------------------------------


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (copy free; insert/delete/substitute cost 1)."""
    return _kernels.levenshtein_codes(_kernels.str_codes(a), _kernels.str_codes(b))


def edit_similarity(a: str, b: str) -> float:
    """1 - tc/max(|a|,|b|); two empty strings are identical, so 1.0."""
    m = max(len(a), len(b))
    if m == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / m


def jaro_winkler(a: str, b: str) -> float:
    """Jaro-Winkler similarity (window floor(max/2)-1, transpositions
    halved, prefix scale 0.1 capped at 4)."""
    return _kernels.jaro_winkler_codes(_kernels.str_codes(a), _kernels.str_codes(b))


def ges_exact(
    query: str,
    d: str,
    weight_of: Callable[[str], float],
    c_ins: float = 0.5,
    case_fold: bool = True,
) -> float:
    """Generalized edit similarity between two strings.

    Word-sequence alignment with replace cost (1-sim_edit(t1,t2))*w(t1),
    insert cost c_ins*w(t) and delete cost w(t), normalized by the total
    query word weight and clamped into [0, 1].
    """
    cfg = TokenizerConfig(case_fold=case_fold)
    qwords = word_tokenize(query, cfg)
    dwords = word_tokenize(d, cfg)
    qw = np.array([weight_of(w) for w in qwords], dtype=np.float64)
    wtq = float(qw.sum())
    if wtq <= 0.0:
        return 0.0
    dw = np.array([weight_of(w) for w in dwords], dtype=np.float64)
    qflat, qoffs = _kernels.flatten_codes(qwords)
    dflat, doffs = _kernels.flatten_codes(dwords)
    tc = _kernels.ges_transform_cost(qflat, qoffs, qw, dflat, doffs, dw, c_ins)
    return 1.0 - min(tc / wtq, 1.0)


# ---------------------------------------------------------------------------
# edit-distance selection with q-gram count filtering
# ---------------------------------------------------------------------------


def _folded(index: ApproxIndex, s: str) -> str:
    return s.upper() if index.cfg.case_fold else s


def _edit_candidate_rows(index: ApproxIndex, query: str, theta: float) -> np.ndarray:
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"edit similarity threshold must be in (0, 1], got {theta}")
    if not index.cfg.padded:
        raise ValueError("edit filtering requires a padded q-gram index")
    t = index.tables.table
    vocab = index.tables.vocab
    alive = index.tables.stats.alive
    counts = qgram_tokenize(query, index.cfg)
    rows_parts = []
    vals_parts = []
    for tok, qtf in counts.items():
        i = vocab.get(tok)
        if i < 0 or not alive[i]:
            continue
        s, e = int(t.token_ptr[i]), int(t.token_ptr[i + 1])
        rows_parts.append(t.rows[s:e])
        vals_parts.append(np.minimum(t.tfs[s:e], qtf).astype(np.float64))
    if not rows_parts:
        return np.empty(0, dtype=np.int64)
    rows = np.concatenate(rows_parts)
    shared = _kernels.accumulate_scores(rows, np.concatenate(vals_parts), index.n_records)
    cand = np.unique(rows)
    qlen = len(_folded(index, query))
    maxlen = np.maximum(index.strlen[cand], qlen)
    k = np.ceil((1.0 - theta) * maxlen)
    bound = maxlen + index.cfg.q - 1 - k * index.cfg.q
    return cand[shared[cand] >= bound]


def qgram_count_filter(index: ApproxIndex, query: str, theta: float) -> np.ndarray:
    """Candidate tids that can reach edit similarity theta: tuples sharing at
    least max(|Q|,|D|) + q - 1 - ceil((1-theta)*max(|Q|,|D|))*q padded q-grams
    with the query.  Guaranteed superset of the true answer set."""
    rows = _edit_candidate_rows(index, query, theta)
    return np.sort(index.tids[rows])


def score_edit(index: ApproxIndex, query: str, theta: float = 0.7) -> RankedResult:
    """Count-filter candidates, then rank them by exact edit similarity."""
    cand = _edit_candidate_rows(index, query, theta)
    if cand.size == 0:
        return empty_result()
    qs = _folded(index, query)
    qc = _kernels.str_codes(qs)
    flat, offs = _kernels.flatten_codes([_folded(index, index.strings[r]) for r in cand])
    dists = _kernels.levenshtein_batch(qc, flat, offs)
    maxlen = np.maximum(index.strlen[cand], len(qs))
    with np.errstate(invalid="ignore"):
        sims = np.where(maxlen > 0, 1.0 - dists / maxlen, 1.0)
    return rank_rows(index.tids, cand, sims)


# ---------------------------------------------------------------------------
# generalized edit similarity over the index
# ---------------------------------------------------------------------------


def ges_score(
    index: ApproxIndex,
    query: str,
    params: Optional[GESParams] = None,
    prefilter: Optional[str] = None,
    h: int = 5,
    seed: int = 0,
) -> RankedResult:
    """Exact GES ranking (tuples scoring 0 are dropped).

    With ``prefilter`` set to "jaccard" or "apx", records are first reduced
    to the candidates whose over-estimated score reaches ``params.theta``
    and only those are ranked, mirroring the filter-then-exact evaluation
    pipeline; without it every record is scored.
    """
    params = params or GESParams()
    word = index.ensure_word()
    qwords = word_tokenize(query, index.cfg)
    if not qwords:
        return empty_result()
    qw = np.array([word.weight_of(w) for w in qwords], dtype=np.float64)
    wtq = float(qw.sum())
    if wtq <= 0.0:
        return empty_result()

    if prefilter is None:
        rows = range(index.n_records)
    else:
        if prefilter == "jaccard":
            cand_result = ges_jaccard_score(index, query, params)
        elif prefilter == "apx":
            cand_result = ges_apx_score(index, query, params, h=h, seed=seed)
        else:
            raise ValueError(f"unknown prefilter {prefilter!r} (use 'jaccard' or 'apx')")
        rows = sorted(index.row_of_tid[int(t)] for t in cand_result.tids)

    qflat, qoffs = _kernels.flatten_codes(qwords)
    kept_rows = []
    kept_scores = []
    for row in rows:
        seq = word.seq_flat[word.seq_ptr[row] : word.seq_ptr[row + 1]]
        parts = [word.codes_of(int(w)) for w in seq]
        dflat, doffs = _kernels.flatten_codes(parts)
        dw = word.idf[seq].astype(np.float64)
        tc = _kernels.ges_transform_cost(qflat, qoffs, qw, dflat, doffs, dw, params.c_ins)
        score = 1.0 - min(tc / wtq, 1.0)
        if score > 0.0:
            kept_rows.append(row)
            kept_scores.append(score)
    cand = np.asarray(kept_rows, dtype=np.int64)
    return rank_rows(index.tids, cand, np.asarray(kept_scores))


def _ges_aggregate(index, qwords, per_word_max, q, theta, debug):
    """Combine per-query-word best token similarities into Eq-style scores:
    score = sum_t w(t) * min(1, (2/q)*max_sim + (1-1/q)) / wt(Q).

    The theta cut applies to the raw over-estimate (whose per-word terms
    reach 1 + 1/q on exact word matches, as in the declarative HAVING
    clause); reported scores cap each per-word term at 1.0 so the result
    reads as a similarity in [0, 1].
    """
    word = index.word
    dq = 1.0 - 1.0 / q
    weights = np.array([word.weight_of(w) for w in qwords], dtype=np.float64)
    wtq = float(weights.sum())
    if wtq <= 0.0:
        return empty_result() if not debug else (empty_result(), empty_result())
    touched = set()
    for dense in per_word_max.values():
        touched.update(np.flatnonzero(dense > 0.0).tolist())
    if not touched:
        return empty_result() if not debug else (empty_result(), empty_result())
    cand = np.array(sorted(touched), dtype=np.int64)
    capped = np.zeros(cand.size)
    uncapped = np.zeros(cand.size)
    for t, w in zip(qwords, weights):
        dense = per_word_max.get(t)
        best = dense[cand] if dense is not None else np.zeros(cand.size)
        term = (2.0 / q) * best + dq
        uncapped += w * term
        capped += w * np.minimum(term, 1.0)
    capped /= wtq
    uncapped /= wtq
    keep = uncapped >= theta
    result = rank_rows(index.tids, cand[keep], capped[keep])
    if debug:
        return result, rank_rows(index.tids, cand[keep], uncapped[keep])
    return result


def ges_jaccard_score(
    index: ApproxIndex, query: str, params: Optional[GESParams] = None, debug: bool = False
):
    """GES over-estimate: per query word, the best Jaccard similarity between
    word q-gram sets, idf-weighted and normalized by the total query weight.
    Per-word contributions are capped at 1.0 (an exact word match would
    otherwise contribute 1 + 1/q); pass debug=True for the uncapped ranking.
    """
    params = params or GESParams()
    q = params.q or index.cfg.q
    gt = index.ensure_word_grams(q)
    word = index.word
    qwords = word_tokenize(query, index.cfg)
    if not qwords:
        return empty_result() if not debug else (empty_result(), empty_result())
    gcfg = TokenizerConfig(
        q=q, padded=index.cfg.padded, case_fold=index.cfg.case_fold, pad_char=index.cfg.pad_char
    )
    per_word_max: dict[str, np.ndarray] = {}
    n = index.n_records
    for t in dict.fromkeys(qwords):
        grams = qgrams_of_word(t, gcfg)
        gids = [g for g in (gt.gram_vocab.get(x) for x in grams) if g >= 0]
        if not gids:
            continue
        parts = [gt.post_words[gt.post_ptr[g] : gt.post_ptr[g + 1]] for g in gids]
        hits = np.concatenate(parts)
        inter = _kernels.accumulate_scores(hits, np.ones(hits.size), len(word.vocab))
        wids = np.flatnonzero(inter > 0.0)
        if wids.size == 0:
            continue
        sims = inter[wids] / (len(grams) + gt.sizes[wids] - inter[wids])
        per_word_max[t] = _word_max_to_rows(word, wids, sims, n)
    return _ges_aggregate(index, qwords, per_word_max, q, params.theta, debug)


def ges_apx_score(
    index: ApproxIndex,
    query: str,
    params: Optional[GESParams] = None,
    h: int = 5,
    seed: int = 0,
    debug: bool = False,
):
    """GES over-estimate with min-hash signature agreement in place of the
    exact word-level Jaccard."""
    params = params or GESParams()
    q = params.q or index.cfg.q
    mh = index.ensure_minhash(q, h=h, seed=seed)
    word = index.word
    qwords = word_tokenize(query, index.cfg)
    if not qwords:
        return empty_result() if not debug else (empty_result(), empty_result())
    gcfg = TokenizerConfig(
        q=q, padded=index.cfg.padded, case_fold=index.cfg.case_fold, pad_char=index.cfg.pad_char
    )
    per_word_max: dict[str, np.ndarray] = {}
    n = index.n_records
    for t in dict.fromkeys(qwords):
        grams = qgrams_of_word(t, gcfg)
        if not grams:
            continue
        gh = np.array(sorted(gram_base_hash(g) for g in grams), dtype=np.uint64)
        qsig = (mh.mult[:, None] * gh[None, :] + mh.add[:, None]).min(axis=1)
        matches = (mh.sigs == qsig[None, :]).sum(axis=1)
        matches[~mh.has_grams] = 0
        wids = np.flatnonzero(matches > 0)
        if wids.size == 0:
            continue
        sims = matches[wids] / float(h)
        per_word_max[t] = _word_max_to_rows(word, wids, sims, n)
    return _ges_aggregate(index, qwords, per_word_max, q, params.theta, debug)


def _word_max_to_rows(word, wids, sims, n) -> np.ndarray:
    """Spread per-word similarities to the records containing each word,
    keeping the per-record maximum."""
    rows_parts = []
    sims_parts = []
    for wid, s in zip(wids, sims):
        lo, hi = int(word.word_ptr[wid]), int(word.word_ptr[wid + 1])
        rows_parts.append(word.rows[lo:hi])
        sims_parts.append(np.full(hi - lo, s))
    rows = np.concatenate(rows_parts)
    return _kernels.max_accumulate(rows, np.concatenate(sims_parts), n)


# ---------------------------------------------------------------------------
# SoftTFIDF
# ---------------------------------------------------------------------------


def soft_tfidf_score(
    index: ApproxIndex, query: str, params: Optional[SoftTFIDFParams] = None
) -> RankedResult:
    """Cosine-style aggregation over word pairs whose Jaro-Winkler similarity
    strictly exceeds theta.

    For each close query word the single best-matching record word is used
    (ties on similarity broken by lexicographically smallest word), weighted
    by both normalized word-level tf-idf vectors.  Query words absent from
    the corpus vocabulary carry no idf and are dropped.
    """
    params = params or SoftTFIDFParams()
    word = index.ensure_word()
    qwords = word_tokenize(query, index.cfg)
    if not qwords:
        return empty_result()
    counts: dict[str, int] = {}
    for w in qwords:
        counts[w] = counts.get(w, 0) + 1
    present = [(w, c) for w, c in counts.items() if word.vocab.get(w) >= 0]
    if not present:
        return empty_result()
    qidf = np.array([word.idf[word.vocab.get(w)] for w, _ in present])
    qtf = np.array([c for _, c in present], dtype=np.float64)
    raw = qidf * qtf
    norm = math.sqrt(float(raw @ raw))
    qw = raw / norm if norm > 0.0 else np.zeros_like(raw)

    n = index.n_records
    dense = np.zeros(n)
    touched = np.zeros(n, dtype=bool)
    for (t, _), wq_t in zip(present, qw):
        sims = _kernels.jaro_winkler_batch(
            _kernels.str_codes(t), word.codes_flat, word.codes_ptr
        )
        close = np.flatnonzero(sims > params.theta)
        if close.size == 0:
            continue
        rows_parts = []
        sim_parts = []
        weight_parts = []
        lex_parts = []
        for wid in close:
            lo, hi = int(word.word_ptr[wid]), int(word.word_ptr[wid + 1])
            rows_parts.append(word.rows[lo:hi])
            sim_parts.append(np.full(hi - lo, sims[wid]))
            weight_parts.append(word.tfidf[lo:hi])
            lex_parts.append(np.full(hi - lo, word.lex_rank[wid], dtype=np.int64))
        rows = np.concatenate(rows_parts)
        simv = np.concatenate(sim_parts)
        wv = np.concatenate(weight_parts)
        lexv = np.concatenate(lex_parts)
        order = np.lexsort((lexv, -simv, rows))
        rows_sorted = rows[order]
        first = np.unique(rows_sorted, return_index=True)[1]
        sel = order[first]
        dense[rows[sel]] += wq_t * wv[sel] * simv[sel]
        touched[rows[sel]] = True
    cand = np.flatnonzero(touched)
    if cand.size == 0:
        return empty_result()
    return rank_rows(index.tids, cand, dense[cand])
