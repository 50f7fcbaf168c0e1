"""Selection index: corpus tables plus per-predicate artifacts.

The index is built once (single writer) and then queried read-only.  Word
level artifacts (for the combination predicates) and min-hash signatures
are materialized on demand and cached.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .corpus import (
    CorpusTables,
    LMModel,
    Record,
    Vocabulary,
    WeightTable,
    build_corpus,
    compute_bm25_weights,
    compute_cosine_weights,
    compute_hmm_weights,
    compute_lm_model,
    prune_by_idf,
)
from .tokenize import TokenizerConfig, qgrams_of_word, word_tokenize
from . import _kernels

MINHASH_SENTINEL = np.uint64(0xFFFFFFFFFFFFFFFF)

PREDICATE_NAMES = (
    "intersect",
    "jaccard",
    "weighted_match",
    "weighted_jaccard",
    "cosine",
    "bm25",
    "lm",
    "hmm",
    "edit",
    "ges",
    "ges_jaccard",
    "ges_apx",
    "soft_tfidf",
)


def gram_base_hash(gram: str) -> int:
    """Stable 64-bit hash of a q-gram (independent of process hashing)."""
    return int.from_bytes(hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest(), "little")


@dataclass
class WordGramTable:
    """Distinct q-grams per word plus gram -> word postings."""

    q: int
    gram_vocab: Vocabulary
    wg_ptr: np.ndarray  # int64, n_words + 1
    wg_grams: np.ndarray  # int32, sorted within each word
    sizes: np.ndarray  # int64, distinct gram count per word
    post_ptr: np.ndarray  # int64, n_grams + 1
    post_words: np.ndarray  # int32
    gram_hash: np.ndarray  # uint64 base hash per gram id

    def grams_of(self, word_id: int) -> np.ndarray:
        return self.wg_grams[self.wg_ptr[word_id] : self.wg_ptr[word_id + 1]]


@dataclass
class MinHashIndex:
    """Per-word min-hash signatures over word q-gram sets."""

    h: int
    seed: int
    q: int
    mult: np.ndarray  # uint64[h], odd multipliers
    add: np.ndarray  # uint64[h]
    sigs: np.ndarray  # uint64[n_words, h]
    has_grams: np.ndarray  # bool per word


def _minhash_params(h: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.Generator(np.random.Philox(seed))
    mult = rng.integers(0, 2**64, size=h, dtype=np.uint64) | np.uint64(1)
    add = rng.integers(0, 2**64, size=h, dtype=np.uint64)
    return mult, add


def minhash_signature(grams, h: int, seed: int) -> np.ndarray:
    """Signature of a q-gram set: per hash function, the minimum hash value."""
    mult, add = _minhash_params(h, seed)
    return _signature_from_hashes(
        np.array(sorted(gram_base_hash(g) for g in grams), dtype=np.uint64), mult, add
    )


def _signature_from_hashes(hashes: np.ndarray, mult: np.ndarray, add: np.ndarray) -> np.ndarray:
    if hashes.size == 0:
        return np.full(mult.size, MINHASH_SENTINEL, dtype=np.uint64)
    vals = mult[:, None] * hashes[None, :] + add[:, None]
    return vals.min(axis=1)


def sim_mh(sig1: np.ndarray, sig2: np.ndarray) -> float:
    """Fraction of agreeing signature components (estimates Jaccard)."""
    if sig1[0] == MINHASH_SENTINEL or sig2[0] == MINHASH_SENTINEL:
        return 0.0
    return float(np.mean(sig1 == sig2))


@dataclass
class WordIndex:
    """Word-level tables for the combination predicates."""

    vocab: Vocabulary
    word_ids: np.ndarray  # canonical word-major rows, like TokenTable
    rows: np.ndarray
    tfs: np.ndarray
    word_ptr: np.ndarray
    df: np.ndarray
    idf: np.ndarray
    avg_idf: float
    tfidf: np.ndarray  # normalized word tf-idf per canonical row
    seq_flat: np.ndarray  # word id sequences per record (order preserved)
    seq_ptr: np.ndarray
    codes_flat: np.ndarray  # char codes per word id
    codes_ptr: np.ndarray
    lex_rank: np.ndarray  # rank of each word id in lexicographic order
    grams: dict = field(default_factory=dict)  # q -> WordGramTable
    minhash: dict = field(default_factory=dict)  # (q, h, seed) -> MinHashIndex

    def weight_of(self, word: str) -> float:
        """idf of a word, falling back to the corpus-average idf."""
        wid = self.vocab.get(word)
        return float(self.idf[wid]) if wid >= 0 else self.avg_idf

    def codes_of(self, word_id: int) -> np.ndarray:
        return self.codes_flat[self.codes_ptr[word_id] : self.codes_ptr[word_id + 1]]


def _build_word_index(strings: list[str], cfg: TokenizerConfig) -> WordIndex:
    vocab = Vocabulary()
    seq_ptr = np.zeros(len(strings) + 1, dtype=np.int64)
    seq_l: list[int] = []
    counts: list[dict[int, int]] = []
    for i, s in enumerate(strings):
        per: dict[int, int] = {}
        for w in word_tokenize(s, cfg):
            wid = vocab.intern(w)
            seq_l.append(wid)
            per[wid] = per.get(wid, 0) + 1
        counts.append(per)
        seq_ptr[i + 1] = len(seq_l)
    seq_flat = np.asarray(seq_l, dtype=np.int32)

    rows_l: list[int] = []
    wids_l: list[int] = []
    tfs_l: list[int] = []
    for row, per in enumerate(counts):
        for wid, tf in per.items():
            rows_l.append(row)
            wids_l.append(wid)
            tfs_l.append(tf)
    rows = np.asarray(rows_l, dtype=np.int32)
    wids = np.asarray(wids_l, dtype=np.int32)
    tfs = np.asarray(tfs_l, dtype=np.int64)
    order = np.lexsort((rows, wids))
    rows, wids, tfs = rows[order], wids[order], tfs[order]
    nv = len(vocab)
    word_ptr = np.zeros(nv + 1, dtype=np.int64)
    np.cumsum(np.bincount(wids, minlength=nv), out=word_ptr[1:])

    n = len(strings)
    df = np.bincount(wids, minlength=nv).astype(np.int64)
    idf = np.zeros(nv)
    if n > 0 and nv > 0:
        idf[df > 0] = np.log(float(n)) - np.log(df[df > 0])
    avg_idf = float(idf.mean()) if nv else 0.0

    raw = idf[wids] * tfs
    norm = np.sqrt(np.bincount(rows, weights=raw * raw, minlength=n))
    safe = np.where(norm > 0.0, norm, 1.0)
    tfidf = raw / safe[rows]

    codes_flat, codes_ptr = _kernels.flatten_codes(vocab.tokens)
    lex_rank = np.empty(nv, dtype=np.int32)
    lex_rank[np.argsort(np.asarray(vocab.tokens, dtype=object), kind="stable")] = np.arange(
        nv, dtype=np.int32
    )
    return WordIndex(
        vocab=vocab,
        word_ids=wids,
        rows=rows,
        tfs=tfs,
        word_ptr=word_ptr,
        df=df,
        idf=idf,
        avg_idf=avg_idf,
        tfidf=tfidf,
        seq_flat=seq_flat,
        seq_ptr=seq_ptr,
        codes_flat=codes_flat,
        codes_ptr=codes_ptr,
        lex_rank=lex_rank,
    )


def _build_word_grams(word: WordIndex, cfg: TokenizerConfig, q: int) -> WordGramTable:
    gcfg = TokenizerConfig(q=q, padded=cfg.padded, case_fold=cfg.case_fold, pad_char=cfg.pad_char)
    gram_vocab = Vocabulary()
    nv = len(word.vocab)
    wg_ptr = np.zeros(nv + 1, dtype=np.int64)
    grams_l: list[int] = []
    for wid, w in enumerate(word.vocab.tokens):
        # intern in sorted string order: set iteration order is not stable
        # across processes and gram ids must be reproducible
        gids = sorted(gram_vocab.intern(g) for g in sorted(qgrams_of_word(w, gcfg)))
        grams_l.extend(gids)
        wg_ptr[wid + 1] = len(grams_l)
    wg_grams = np.asarray(grams_l, dtype=np.int32)
    sizes = np.diff(wg_ptr)
    ng = len(gram_vocab)
    owner = np.repeat(np.arange(nv, dtype=np.int32), sizes)
    order = np.argsort(wg_grams, kind="stable")
    post_words = owner[order]
    post_ptr = np.zeros(ng + 1, dtype=np.int64)
    np.cumsum(np.bincount(wg_grams, minlength=ng), out=post_ptr[1:])
    gram_hash = np.array([gram_base_hash(g) for g in gram_vocab.tokens], dtype=np.uint64)
    return WordGramTable(
        q=q,
        gram_vocab=gram_vocab,
        wg_ptr=wg_ptr,
        wg_grams=wg_grams,
        sizes=sizes,
        post_ptr=post_ptr,
        post_words=post_words,
        gram_hash=gram_hash,
    )


def _build_minhash(word: WordIndex, gt: WordGramTable, h: int, seed: int) -> MinHashIndex:
    mult, add = _minhash_params(h, seed)
    nv = len(word.vocab)
    sigs = np.full((nv, h), MINHASH_SENTINEL, dtype=np.uint64)
    for wid in range(nv):
        gh = gt.gram_hash[gt.grams_of(wid)]
        if gh.size:
            sigs[wid] = (mult[:, None] * gh[None, :] + add[:, None]).min(axis=1)
    return MinHashIndex(
        h=h, seed=seed, q=gt.q, mult=mult, add=add, sigs=sigs, has_grams=gt.sizes > 0
    )


@dataclass
class ApproxIndex:
    cfg: TokenizerConfig
    tids: np.ndarray
    strings: list[str]
    row_of_tid: dict
    strlen: np.ndarray
    tables: CorpusTables
    prune_rate: float = 0.0
    cosine: Optional[WeightTable] = None
    bm25: Optional[WeightTable] = None
    bm25_k1: float = 1.5
    bm25_b: float = 0.675
    lm: Optional[LMModel] = None
    hmm: Optional[WeightTable] = None
    hmm_logw: Optional[np.ndarray] = None
    hmm_a0: float = 0.2
    wsum: dict = field(default_factory=dict)  # scheme -> per-record weight sums
    word: Optional[WordIndex] = None

    @property
    def n_records(self) -> int:
        return len(self.strings)

    # -- artifact builders (idempotent; call before concurrent querying) --

    def ensure_cosine(self):
        if self.cosine is None:
            self.cosine = compute_cosine_weights(self.tables)
        return self.cosine

    def ensure_bm25(self, k1: float = 1.5, b: float = 0.675):
        if self.bm25 is None or (self.bm25_k1, self.bm25_b) != (k1, b):
            self.bm25 = compute_bm25_weights(self.tables, k1=k1, b=b)
            self.bm25_k1, self.bm25_b = k1, b
        return self.bm25

    def ensure_lm(self):
        if self.lm is None:
            self.lm = compute_lm_model(self.tables)
        return self.lm

    def ensure_hmm(self, a0: float = 0.2):
        if self.hmm is None or self.hmm_a0 != a0:
            self.hmm = compute_hmm_weights(self.tables, a0=a0)
            self.hmm_logw = np.log(self.hmm.values)
            self.hmm_a0 = a0
        return self.hmm

    def ensure_wsum(self, scheme: str) -> np.ndarray:
        if scheme not in self.wsum:
            t, st = self.tables.table, self.tables.stats
            w = st.token_weights(scheme)[t.token_ids]
            self.wsum[scheme] = np.bincount(t.rows, weights=w, minlength=st.n_records)
        return self.wsum[scheme]

    def ensure_word(self) -> WordIndex:
        if self.word is None:
            self.word = _build_word_index(self.strings, self.cfg)
        return self.word

    def ensure_word_grams(self, q: Optional[int] = None) -> WordGramTable:
        q = q or self.cfg.q
        word = self.ensure_word()
        if q not in word.grams:
            word.grams[q] = _build_word_grams(word, self.cfg, q)
        return word.grams[q]

    def ensure_minhash(self, q: Optional[int] = None, h: int = 5, seed: int = 0) -> MinHashIndex:
        q = q or self.cfg.q
        word = self.ensure_word()
        key = (q, h, seed)
        if key not in word.minhash:
            word.minhash[key] = _build_minhash(word, self.ensure_word_grams(q), h, seed)
        return word.minhash[key]


def build_index(
    records: list[Record],
    cfg: TokenizerConfig = TokenizerConfig(),
    predicates=None,
    prune_rate: float = 0.0,
    k1: float = 1.5,
    b: float = 0.675,
    a0: float = 0.2,
    ges_q: Optional[int] = None,
    minhash_h: int = 5,
    minhash_seed: int = 0,
) -> ApproxIndex:
    """Build the artifacts needed by the listed predicates (all by default)."""
    names = set(PREDICATE_NAMES if predicates is None else predicates)
    unknown = names - set(PREDICATE_NAMES)
    if unknown:
        raise ValueError(
            f"unknown predicates {sorted(unknown)}; valid: {', '.join(PREDICATE_NAMES)}"
        )
    tables = build_corpus(records, cfg)
    if prune_rate:
        tables = prune_by_idf(tables, prune_rate)
    tids = np.array([r.tid for r in records], dtype=np.int64)
    strings = [r.string for r in records]
    idx = ApproxIndex(
        cfg=cfg,
        tids=tids,
        strings=strings,
        row_of_tid={int(t): i for i, t in enumerate(tids)},
        strlen=np.array([len(s) for s in strings], dtype=np.int64),
        tables=tables,
        prune_rate=prune_rate,
    )
    if "cosine" in names:
        idx.ensure_cosine()
    if "bm25" in names:
        idx.ensure_bm25(k1=k1, b=b)
    if "lm" in names:
        idx.ensure_lm()
    if "hmm" in names:
        idx.ensure_hmm(a0=a0)
    if names & {"weighted_match", "weighted_jaccard"}:
        idx.ensure_wsum("rs")
        idx.ensure_wsum("idf")
    if names & {"ges", "ges_jaccard", "ges_apx", "soft_tfidf"}:
        idx.ensure_word()
    if names & {"ges_jaccard", "ges_apx"}:
        idx.ensure_word_grams(ges_q)
    if "ges_apx" in names:
        idx.ensure_minhash(ges_q, h=minhash_h, seed=minhash_seed)
    return idx
