"""Corpus preprocessing: token tables, global statistics, weight tables.

Everything downstream of tokenization is kept in flat numpy arrays in
token-major order (sorted by token id, then record row), so that the rows
for one token form a contiguous postings slice.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .tokenize import TokenizerConfig, qgram_tokenize

PM_EPS = 1e-12  # clamp for the language-model token probability


class DuplicateTidError(ValueError):
    pass


@dataclass
class Record:
    tid: int
    string: str
    cluster_id: Optional[int] = None


class Vocabulary:
    """Interned token strings with dense integer ids (first-seen order)."""

    def __init__(self):
        self.tokens: list[str] = []
        self._ids: dict[str, int] = {}

    def intern(self, token: str) -> int:
        tid = self._ids.get(token)
        if tid is None:
            tid = len(self.tokens)
            self._ids[token] = tid
            self.tokens.append(token)
        return tid

    def get(self, token: str) -> int:
        """Id of ``token`` or -1 when unknown."""
        return self._ids.get(token, -1)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass
class TokenTable:
    """(record row, token, tf) rows in token-major order plus a CSR pointer."""

    token_ids: np.ndarray  # int32, ascending
    rows: np.ndarray  # int32, record row per entry
    tfs: np.ndarray  # int64
    token_ptr: np.ndarray  # int64, len = |vocab| + 1

    @property
    def n_rows(self) -> int:
        return self.token_ids.size

    def postings(self, token_id: int) -> slice:
        return slice(self.token_ptr[token_id], self.token_ptr[token_id + 1])


@dataclass
class TupleStats:
    dl: np.ndarray  # tokens per record (tf-weighted)
    ddl: np.ndarray  # distinct tokens per record


@dataclass
class CorpusStats:
    n_records: int
    cs: int  # total token occurrences
    avgdl: float
    df: np.ndarray  # records containing each token
    cf: np.ndarray  # total occurrences of each token
    idf: np.ndarray  # log N - log df (0 for pruned-away tokens)
    rs_weight: np.ndarray  # log((N - df + 0.5) / (df + 0.5))
    alive: np.ndarray  # bool, False for tokens pruned from the table

    def token_weights(self, scheme: str) -> np.ndarray:
        if scheme == "rs":
            return self.rs_weight
        if scheme == "idf":
            return self.idf
        raise ValueError(f"unknown weight scheme {scheme!r} (use 'rs' or 'idf')")


@dataclass
class CorpusTables:
    vocab: Vocabulary
    table: TokenTable
    tuples: TupleStats
    stats: CorpusStats

    def __iter__(self):  # allows table, tuples, stats unpacking
        return iter((self.table, self.tuples, self.stats))


@dataclass
class WeightTable:
    """Per-(record, token) weights aligned with TokenTable rows."""

    scheme: str
    values: np.ndarray


@dataclass
class LMModel:
    """Language-model artifacts: smoothed token probabilities per row."""

    pm: np.ndarray  # clamped to [PM_EPS, 1 - PM_EPS]
    cfcs: np.ndarray  # cf/cs per row's token
    sumcompm: np.ndarray  # per record: sum of log(1 - pm) over its tokens
    log_term: np.ndarray  # log pm - log(1-pm) - log cfcs, per row


@dataclass
class PruningPolicy:
    rate: float

    def threshold(self, idf: np.ndarray) -> float:
        lo = float(idf.min())
        hi = float(idf.max())
        return lo + self.rate * (hi - lo)


def _assemble(counters: list[Counter], vocab: Vocabulary, n_records: int) -> CorpusTables:
    rows_l: list[int] = []
    toks_l: list[int] = []
    tfs_l: list[int] = []
    for row, counts in enumerate(counters):
        for token, tf in counts.items():
            rows_l.append(row)
            toks_l.append(vocab.intern(token))
            tfs_l.append(tf)
    rows = np.asarray(rows_l, dtype=np.int32)
    toks = np.asarray(toks_l, dtype=np.int32)
    tfs = np.asarray(tfs_l, dtype=np.int64)
    order = np.lexsort((rows, toks))
    rows, toks, tfs = rows[order], toks[order], tfs[order]
    nv = len(vocab)
    counts_per_token = np.bincount(toks, minlength=nv)
    token_ptr = np.zeros(nv + 1, dtype=np.int64)
    np.cumsum(counts_per_token, out=token_ptr[1:])
    table = TokenTable(toks, rows, tfs, token_ptr)
    return CorpusTables(vocab, table, _tuple_stats(table, n_records),
                        _corpus_stats(table, n_records, nv))


def _tuple_stats(table: TokenTable, n_records: int) -> TupleStats:
    dl = np.bincount(table.rows, weights=table.tfs, minlength=n_records).astype(np.int64)
    ddl = np.bincount(table.rows, minlength=n_records).astype(np.int64)
    return TupleStats(dl=dl, ddl=ddl)


def _corpus_stats(table: TokenTable, n_records: int, n_vocab: int) -> CorpusStats:
    df = np.bincount(table.token_ids, minlength=n_vocab).astype(np.int64)
    cf = np.bincount(table.token_ids, weights=table.tfs, minlength=n_vocab).astype(np.int64)
    alive = df > 0
    n = float(n_records)
    idf = np.zeros(n_vocab, dtype=np.float64)
    rs = np.zeros(n_vocab, dtype=np.float64)
    if n_records > 0 and alive.any():
        idf[alive] = math.log(n) - np.log(df[alive])
        rs[alive] = np.log(n - df[alive] + 0.5) - np.log(df[alive] + 0.5)
    cs = int(cf.sum())
    avgdl = cs / n if n_records else 0.0
    return CorpusStats(n_records=n_records, cs=cs, avgdl=avgdl, df=df, cf=cf,
                       idf=idf, rs_weight=rs, alive=alive)


def build_corpus(records: list[Record], cfg: TokenizerConfig) -> CorpusTables:
    """Tokenize records and compute all base statistics in one pass."""
    seen: dict[int, int] = {}
    for i, rec in enumerate(records):
        if rec.tid in seen:
            raise DuplicateTidError(
                f"duplicate tid {rec.tid} at positions {seen[rec.tid]} and {i}"
            )
        seen[rec.tid] = i
    vocab = Vocabulary()
    counters = [qgram_tokenize(rec.string, cfg) for rec in records]
    return _assemble(counters, vocab, len(records))


def compute_cosine_weights(tables: CorpusTables) -> WeightTable:
    """Per-record L2-normalized tf-idf weights (records with all-zero idf
    keep explicit zero rows)."""
    t, st = tables.table, tables.stats
    raw = st.idf[t.token_ids] * t.tfs
    norm_sq = np.bincount(t.rows, weights=raw * raw, minlength=st.n_records)
    norm = np.sqrt(norm_sq)
    safe = np.where(norm > 0.0, norm, 1.0)
    return WeightTable("cosine", raw / safe[t.rows])


def compute_bm25_weights(tables: CorpusTables, k1: float = 1.5, b: float = 0.675) -> WeightTable:
    t, tu, st = tables.table, tables.tuples, tables.stats
    kd = k1 * ((1.0 - b) + b * tu.dl / st.avgdl)
    w1 = st.rs_weight[t.token_ids]
    tf = t.tfs.astype(np.float64)
    return WeightTable("bm25", w1 * (k1 + 1.0) * tf / (kd[t.rows] + tf))


def compute_lm_model(tables: CorpusTables) -> LMModel:
    t, tu, st = tables.table, tables.tuples, tables.stats
    tf = t.tfs.astype(np.float64)
    pml = tf / tu.dl[t.rows]
    # mean probability of the token over the records containing it
    pavg_tok = np.zeros(len(tables.vocab))
    np.divide(
        np.bincount(t.token_ids, weights=pml, minlength=len(tables.vocab)),
        st.df,
        out=pavg_tok,
        where=st.df > 0,
    )
    pavg = pavg_tok[t.token_ids]
    fbar = pavg * tu.dl[t.rows]
    risk = (1.0 / (1.0 + fbar)) * (fbar / (1.0 + fbar)) ** tf
    pm = pml ** (1.0 - risk) * pavg**risk
    pm = np.clip(pm, PM_EPS, 1.0 - PM_EPS)
    cfcs = st.cf[t.token_ids] / st.cs
    sumcompm = np.bincount(t.rows, weights=np.log1p(-pm), minlength=st.n_records)
    log_term = np.log(pm) - np.log1p(-pm) - np.log(cfcs)
    return LMModel(pm=pm, cfcs=cfcs, sumcompm=sumcompm, log_term=log_term)


def compute_hmm_weights(tables: CorpusTables, a0: float = 0.2) -> WeightTable:
    if not 0.0 < a0 < 1.0:
        raise ValueError(f"a0 must be in (0, 1), got {a0}")
    t, tu, st = tables.table, tables.tuples, tables.stats
    a1 = 1.0 - a0
    pml = t.tfs / tu.dl[t.rows]
    ptge = st.cf[t.token_ids] / st.cs
    return WeightTable("hmm", 1.0 + a1 * pml / (a0 * ptge))


def prune_by_idf(tables: CorpusTables, policy: PruningPolicy | float) -> CorpusTables:
    """Drop tokens with idf below MIN(idf) + rate*(MAX(idf)-MIN(idf)).

    The pruned table keeps the original vocabulary ids (dropped tokens get
    empty postings and alive=False); all derived statistics are recomputed
    from the surviving rows so downstream weights see the pruned corpus.
    """
    if isinstance(policy, (int, float)):
        policy = PruningPolicy(rate=float(policy))
    if not 0.0 <= policy.rate <= 1.0:
        raise ValueError(f"pruning rate must be in [0, 1], got {policy.rate}")
    t, st = tables.table, tables.stats
    if t.n_rows == 0 or policy.rate == 0.0:
        return tables
    threshold = policy.threshold(st.idf[st.alive])
    keep_tok = st.idf >= threshold
    keep = keep_tok[t.token_ids]
    toks = t.token_ids[keep]
    nv = len(tables.vocab)
    counts = np.bincount(toks, minlength=nv)
    token_ptr = np.zeros(nv + 1, dtype=np.int64)
    np.cumsum(counts, out=token_ptr[1:])
    table = TokenTable(toks, t.rows[keep], t.tfs[keep], token_ptr)
    return CorpusTables(tables.vocab, table, _tuple_stats(table, st.n_records),
                        _corpus_stats(table, st.n_records, nv))
