"""Query-time scoring for the token-based similarity predicates.

Every scorer returns the full ranking of tuples that share at least one
token with the query (thresholding and top-k cuts are left to
``approximate_select``).  Scores follow the inverted-index join: per query
token, the token's postings contribute factor * row_weight to each record,
accumulated densely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .index import ApproxIndex
from .ranking import RankedResult, empty_result, rank_rows, truncate
from .tokenize import qgram_tokenize


@dataclass
class PredicateParams:
    k1: float = 1.5
    k3: float = 8.0
    b: float = 0.675
    a0: float = 0.2
    weight_scheme: str = "rs"  # for WeightedMatch / WeightedJaccard

    def __post_init__(self):
        if self.k1 <= 0:
            raise ValueError("k1 must be > 0")
        if self.k3 < 0:
            raise ValueError("k3 must be >= 0")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError("b must be in [0, 1]")
        if not 0.0 < self.a0 < 1.0:
            raise ValueError("a0 must be in (0, 1)")
        if self.weight_scheme not in ("rs", "idf"):
            raise ValueError("weight_scheme must be 'rs' or 'idf'")


@dataclass
class GESParams:
    c_ins: float = 0.5
    q: Optional[int] = None  # word q-gram size; None = tokenizer q
    theta: float = 0.0  # candidate threshold (0 keeps every joined tuple)

    def __post_init__(self):
        if not 0.0 <= self.c_ins <= 1.0:
            raise ValueError("c_ins must be in [0, 1]")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must be in [0, 1]")


@dataclass
class SoftTFIDFParams:
    theta: float = 0.8

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must be in (0, 1)")


class Selector:
    """Read-only query interface over a built index."""

    def __init__(
        self,
        index: ApproxIndex,
        params: Optional[PredicateParams] = None,
        ges: Optional[GESParams] = None,
        soft: Optional[SoftTFIDFParams] = None,
        edit_theta: float = 0.7,
        minhash_h: int = 5,
        minhash_seed: int = 0,
    ):
        self.index = index
        self.params = params or PredicateParams()
        self.ges = ges or GESParams()
        self.soft = soft or SoftTFIDFParams()
        self.edit_theta = edit_theta
        self.minhash_h = minhash_h
        self.minhash_seed = minhash_seed

    # ------------------------------------------------------------------
    # shared query machinery
    # ------------------------------------------------------------------

    def _query_tokens(self, query: str) -> tuple[np.ndarray, np.ndarray]:
        """Distinct query tokens present in the (possibly pruned) vocabulary,
        with their query term frequencies."""
        counts = qgram_tokenize(query, self.index.cfg)
        vocab = self.index.tables.vocab
        alive = self.index.tables.stats.alive
        ids = []
        tfs = []
        for tok, tf in counts.items():
            i = vocab.get(tok)
            if i >= 0 and alive[i]:
                ids.append(i)
                tfs.append(tf)
        return np.asarray(ids, dtype=np.int64), np.asarray(tfs, dtype=np.int64)

    def _score_sum(self, ids, factor=None, row_values=None):
        """Accumulate factor[t] * row_values over the postings of each token.

        Returns (candidate rows, dense score array).
        """
        t = self.index.tables.table
        n = self.index.n_records
        if ids.size == 0:
            return np.empty(0, dtype=np.int64), np.zeros(n)
        rows_parts = []
        vals_parts = []
        for k in range(ids.size):
            s, e = int(t.token_ptr[ids[k]]), int(t.token_ptr[ids[k] + 1])
            rows_parts.append(t.rows[s:e])
            if row_values is None:
                v = np.ones(e - s)
            else:
                v = row_values[s:e]
            if factor is not None:
                v = v * factor[k]
            vals_parts.append(v)
        rows = np.concatenate(rows_parts)
        vals = np.concatenate(vals_parts)
        dense = _kernels.accumulate_scores(rows, np.asarray(vals, dtype=np.float64), n)
        return np.unique(rows), dense

    def _ranked(self, cand, scores, sort_key=None) -> RankedResult:
        return rank_rows(self.index.tids, cand, scores, sort_key)

    # ------------------------------------------------------------------
    # overlap predicates (distinct-token semantics)
    # ------------------------------------------------------------------

    def score_intersect(self, query: str) -> RankedResult:
        ids, _ = self._query_tokens(query)
        cand, dense = self._score_sum(ids)
        return self._ranked(cand, dense[cand])

    def score_jaccard(self, query: str) -> RankedResult:
        ids, _ = self._query_tokens(query)
        cand, inter = self._score_sum(ids)
        if cand.size == 0:
            return empty_result()
        ddl = self.index.tables.tuples.ddl[cand]
        i = inter[cand]
        return self._ranked(cand, i / (ddl + ids.size - i))

    def score_weighted_match(self, query: str, scheme: Optional[str] = None) -> RankedResult:
        ids, _ = self._query_tokens(query)
        w = self.index.tables.stats.token_weights(scheme or self.params.weight_scheme)[ids]
        cand, dense = self._score_sum(ids, factor=w)
        return self._ranked(cand, dense[cand])

    def score_weighted_jaccard(self, query: str, scheme: Optional[str] = None) -> RankedResult:
        scheme = scheme or self.params.weight_scheme
        ids, _ = self._query_tokens(query)
        w = self.index.tables.stats.token_weights(scheme)[ids]
        wsum_d = self.index.ensure_wsum(scheme)
        cand, num = self._score_sum(ids, factor=w)
        if cand.size == 0:
            return empty_result()
        n = num[cand]
        den = wsum_d[cand] + w.sum() - n
        scores = np.divide(n, den, out=np.zeros_like(n), where=den != 0.0)
        return self._ranked(cand, scores)

    # ------------------------------------------------------------------
    # aggregate weighted predicates
    # ------------------------------------------------------------------

    def score_cosine(self, query: str) -> RankedResult:
        cw = self.index.ensure_cosine().values
        ids, tfs = self._query_tokens(query)
        idf = self.index.tables.stats.idf[ids]
        raw = idf * tfs
        norm = math.sqrt(float(raw @ raw))
        qw = raw / norm if norm > 0.0 else np.zeros_like(raw)
        cand, dense = self._score_sum(ids, factor=qw, row_values=cw)
        return self._ranked(cand, dense[cand])

    def score_bm25(self, query: str) -> RankedResult:
        bw = self.index.ensure_bm25(self.params.k1, self.params.b).values
        ids, tfs = self._query_tokens(query)
        k3 = self.params.k3
        qf = (k3 + 1.0) * tfs / (k3 + tfs)
        cand, dense = self._score_sum(ids, factor=qf, row_values=bw)
        return self._ranked(cand, dense[cand])

    # ------------------------------------------------------------------
    # language modeling predicates
    # ------------------------------------------------------------------

    def score_lm(self, query: str) -> RankedResult:
        """Rewritten Ponte-Croft score: per matched query occurrence
        log pm - log(1-pm) - log(cf/cs), plus the stored per-record
        sum of log(1-pm); exponentiated at the end."""
        lm = self.index.ensure_lm()
        ids, tfs = self._query_tokens(query)
        cand, acc = self._score_sum(ids, factor=tfs.astype(np.float64), row_values=lm.log_term)
        if cand.size == 0:
            return empty_result()
        log_score = acc[cand] + lm.sumcompm[cand]
        return self._ranked(cand, np.exp(log_score), sort_key=log_score)

    def score_lm_reference(self, query: str) -> RankedResult:
        """Un-rewritten language-model score, evaluated tuple by tuple.

        Keeps the query-constant factor that ``score_lm`` drops; exposed for
        audits and rewrite-safety tests, not meant for bulk use.
        """
        lm = self.index.ensure_lm()
        t = self.index.tables.table
        st = self.index.tables.stats
        ids, tfs = self._query_tokens(query)
        if ids.size == 0:
            return empty_result()
        pm_of: dict[tuple[int, int], float] = {}
        cand_set = set()
        for i in ids:
            s, e = int(t.token_ptr[i]), int(t.token_ptr[i + 1])
            for k in range(s, e):
                row = int(t.rows[k])
                pm_of[(row, int(i))] = float(lm.pm[k])
                cand_set.add(row)
        cand = np.array(sorted(cand_set), dtype=np.int64)
        log_scores = np.empty(cand.size)
        for c, row in enumerate(cand):
            acc = float(lm.sumcompm[row])  # log prod_{t in D} (1 - pm)
            for i, m in zip(ids, tfs):
                pm = pm_of.get((int(row), int(i)))
                if pm is None:
                    acc += m * math.log(st.cf[i] / st.cs)
                else:
                    acc += m * (math.log(pm) - math.log1p(-pm))
            log_scores[c] = acc
        return self._ranked(cand, np.exp(log_scores), sort_key=log_scores)

    def score_hmm(self, query: str) -> RankedResult:
        self.index.ensure_hmm(self.params.a0)
        ids, tfs = self._query_tokens(query)
        cand, acc = self._score_sum(
            ids, factor=tfs.astype(np.float64), row_values=self.index.hmm_logw
        )
        if cand.size == 0:
            return empty_result()
        log_score = acc[cand]
        return self._ranked(cand, np.exp(log_score), sort_key=log_score)

    # ------------------------------------------------------------------
    # dispatch
    # ------------------------------------------------------------------

    def score(self, predicate: str, query: str) -> RankedResult:
        from . import strdist  # deferred: strdist imports this module's types

        if predicate == "intersect":
            return self.score_intersect(query)
        if predicate == "jaccard":
            return self.score_jaccard(query)
        if predicate == "weighted_match":
            return self.score_weighted_match(query)
        if predicate == "weighted_jaccard":
            return self.score_weighted_jaccard(query)
        if predicate == "cosine":
            return self.score_cosine(query)
        if predicate == "bm25":
            return self.score_bm25(query)
        if predicate == "lm":
            return self.score_lm(query)
        if predicate == "hmm":
            return self.score_hmm(query)
        if predicate == "edit":
            return strdist.score_edit(self.index, query, self.edit_theta)
        if predicate == "ges":
            return strdist.ges_score(self.index, query, self.ges)
        if predicate == "ges_jaccard":
            return strdist.ges_jaccard_score(self.index, query, self.ges)
        if predicate == "ges_apx":
            return strdist.ges_apx_score(
                self.index, query, self.ges, h=self.minhash_h, seed=self.minhash_seed
            )
        if predicate == "soft_tfidf":
            return strdist.soft_tfidf_score(self.index, query, self.soft)
        from .index import PREDICATE_NAMES

        raise ValueError(
            f"unknown predicate {predicate!r}; valid: {', '.join(PREDICATE_NAMES)}"
        )

    def select(self, predicate: str, query: str, top_k=None, min_score=None) -> RankedResult:
        return truncate(self.score(predicate, query), top_k=top_k, min_score=min_score)


def approximate_select(
    selector: Selector, predicate: str, query: str, top_k=None, min_score=None
) -> RankedResult:
    """Run a named predicate and truncate by count or score threshold."""
    return selector.select(predicate, query, top_k=top_k, min_score=min_score)
