"""Brute-force reference implementations for every predicate.

Everything here is deliberately independent of the package internals: plain
dict/set/loop code evaluating the defining formulas directly, tuple by
tuple.  Tests compare the engine's inverted-index implementations against
these oracles.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter

PM_EPS = 1e-12
_WS = re.compile(r"\s+")


# ---------------------------------------------------------------------------
# tokenization (re-derived, not imported)
# ---------------------------------------------------------------------------


def o_qgrams(s: str, q: int = 2, padded: bool = True, fold: bool = True, pad: str = "$") -> Counter:
    if fold:
        s = s.upper()
    if padded:
        if s == "":
            return Counter()
        body = _WS.sub(pad * (q - 1), s)
        s = pad * (q - 1) + body + pad * (q - 1)
    return Counter(s[i : i + q] for i in range(len(s) - q + 1))


def o_words(s: str, fold: bool = True) -> list[str]:
    return [w.upper() if fold else w for w in s.split()]


def o_word_gram_set(word: str, q: int = 2, padded: bool = True, pad: str = "$") -> set:
    if padded:
        word = pad * (q - 1) + word + pad * (q - 1)
    return set(word[i : i + q] for i in range(len(word) - q + 1))


# ---------------------------------------------------------------------------
# corpus statistics
# ---------------------------------------------------------------------------


class OracleCorpus:
    """Token statistics over a tiny corpus, computed the slow obvious way."""

    def __init__(self, records, q=2, padded=True, fold=True):
        self.records = list(records)  # (tid, string)
        self.q, self.padded, self.fold = q, padded, fold
        self.tokens = {tid: o_qgrams(s, q, padded, fold) for tid, s in self.records}
        self.n = len(self.records)
        self.df = Counter()
        self.cf = Counter()
        for counts in self.tokens.values():
            for t, c in counts.items():
                self.df[t] += 1
                self.cf[t] += c
        self.dl = {tid: sum(c.values()) for tid, c in self.tokens.items()}
        self.cs = sum(self.dl.values())
        self.avgdl = self.cs / self.n if self.n else 0.0
        self.idf = {t: math.log(self.n) - math.log(d) for t, d in self.df.items()}
        self.rs = {
            t: math.log(self.n - d + 0.5) - math.log(d + 0.5) for t, d in self.df.items()
        }

    def weight(self, token, scheme):
        table = self.rs if scheme == "rs" else self.idf
        return table.get(token, 0.0)

    def shared(self, query):
        """tids sharing at least one known token with the query."""
        qtoks = set(o_qgrams(query, self.q, self.padded, self.fold))
        return {
            tid
            for tid, counts in self.tokens.items()
            if qtoks & set(counts)
        }


# ---------------------------------------------------------------------------
# token predicates
# ---------------------------------------------------------------------------


def o_intersect(corpus: OracleCorpus, query: str) -> dict:
    q = set(o_qgrams(query, corpus.q, corpus.padded, corpus.fold))
    out = {}
    for tid, counts in corpus.tokens.items():
        inter = len(q & set(counts))
        if inter > 0:
            out[tid] = float(inter)
    return out


def o_jaccard(corpus: OracleCorpus, query: str) -> dict:
    q = set(o_qgrams(query, corpus.q, corpus.padded, corpus.fold))
    # tokens unknown to the corpus are dropped from the query (join semantics)
    q = {t for t in q if t in corpus.df}
    out = {}
    for tid, counts in corpus.tokens.items():
        d = set(counts)
        inter = len(q & d)
        if inter > 0:
            out[tid] = inter / len(q | d)
    return out


def o_weighted_match(corpus: OracleCorpus, query: str, scheme: str = "rs") -> dict:
    q = {t for t in o_qgrams(query, corpus.q, corpus.padded, corpus.fold) if t in corpus.df}
    out = {}
    for tid, counts in corpus.tokens.items():
        common = q & set(counts)
        if common:
            out[tid] = sum(corpus.weight(t, scheme) for t in common)
    return out


def o_weighted_jaccard(corpus: OracleCorpus, query: str, scheme: str = "rs") -> dict:
    q = {t for t in o_qgrams(query, corpus.q, corpus.padded, corpus.fold) if t in corpus.df}
    wq = sum(corpus.weight(t, scheme) for t in q)
    out = {}
    for tid, counts in corpus.tokens.items():
        d = set(counts)
        common = q & d
        if not common:
            continue
        num = sum(corpus.weight(t, scheme) for t in common)
        den = wq + sum(corpus.weight(t, scheme) for t in d) - num
        out[tid] = num / den if den != 0.0 else 0.0
    return out


def o_cosine(corpus: OracleCorpus, query: str) -> dict:
    def normalized(counts, idf_lookup):
        raw = {t: idf_lookup(t) * c for t, c in counts.items()}
        norm = math.sqrt(sum(v * v for v in raw.values()))
        if norm == 0.0:
            return {t: 0.0 for t in raw}
        return {t: v / norm for t, v in raw.items()}

    qcounts = o_qgrams(query, corpus.q, corpus.padded, corpus.fold)
    qcounts = Counter({t: c for t, c in qcounts.items() if t in corpus.df})
    qw = normalized(qcounts, lambda t: corpus.idf[t])
    out = {}
    for tid, counts in corpus.tokens.items():
        dw = normalized(counts, lambda t: corpus.idf[t])
        common = set(qw) & set(dw)
        if common:
            out[tid] = sum(qw[t] * dw[t] for t in common)
    return out


def o_bm25(corpus: OracleCorpus, query: str, k1=1.5, k3=8.0, b=0.675) -> dict:
    qcounts = Counter(
        {t: c for t, c in o_qgrams(query, corpus.q, corpus.padded, corpus.fold).items()
         if t in corpus.df}
    )
    out = {}
    for tid, counts in corpus.tokens.items():
        kd = k1 * ((1 - b) + b * corpus.dl[tid] / corpus.avgdl)
        score = 0.0
        hit = False
        for t, qtf in qcounts.items():
            tf = counts.get(t, 0)
            if tf == 0:
                continue
            hit = True
            wq = (k3 + 1) * qtf / (k3 + qtf)
            wd = corpus.rs[t] * (k1 + 1) * tf / (kd + tf)
            score += wq * wd
        if hit:
            out[tid] = score
    return out


def _lm_pm(corpus: OracleCorpus):
    """pm(tid, token) per the risk-smoothed maximum-likelihood estimate."""
    pml = {
        tid: {t: c / corpus.dl[tid] for t, c in counts.items()}
        for tid, counts in corpus.tokens.items()
    }
    pavg = {}
    for t in corpus.df:
        vals = [pml[tid][t] for tid, counts in corpus.tokens.items() if t in counts]
        pavg[t] = sum(vals) / len(vals)
    pm = {}
    for tid, counts in corpus.tokens.items():
        for t, tf in counts.items():
            fbar = pavg[t] * corpus.dl[tid]
            risk = (1.0 / (1.0 + fbar)) * (fbar / (1.0 + fbar)) ** tf
            v = pml[tid][t] ** (1.0 - risk) * pavg[t] ** risk
            pm[(tid, t)] = min(max(v, PM_EPS), 1.0 - PM_EPS)
    return pm


def o_lm(corpus: OracleCorpus, query: str) -> dict:
    """Rewritten LM score (the one the engine reports)."""
    pm = _lm_pm(corpus)
    qcounts = Counter(
        {t: c for t, c in o_qgrams(query, corpus.q, corpus.padded, corpus.fold).items()
         if t in corpus.df}
    )
    out = {}
    for tid, counts in corpus.tokens.items():
        if not set(qcounts) & set(counts):
            continue
        acc = sum(math.log1p(-pm[(tid, t)]) for t in counts)
        for t, m in qcounts.items():
            if t in counts:
                p = pm[(tid, t)]
                cfcs = corpus.cf[t] / corpus.cs
                acc += m * (math.log(p) - math.log1p(-p) - math.log(cfcs))
        out[tid] = math.exp(acc)
    return out


def o_lm_full(corpus: OracleCorpus, query: str) -> dict:
    """Un-rewritten restricted LM score, query-constant factor included."""
    pm = _lm_pm(corpus)
    qcounts = Counter(
        {t: c for t, c in o_qgrams(query, corpus.q, corpus.padded, corpus.fold).items()
         if t in corpus.df}
    )
    out = {}
    for tid, counts in corpus.tokens.items():
        if not set(qcounts) & set(counts):
            continue
        acc = sum(math.log1p(-pm[(tid, t)]) for t in counts)
        for t, m in qcounts.items():
            if t in counts:
                p = pm[(tid, t)]
                acc += m * (math.log(p) - math.log1p(-p))
            else:
                acc += m * math.log(corpus.cf[t] / corpus.cs)
        out[tid] = math.exp(acc)
    return out


def o_hmm(corpus: OracleCorpus, query: str, a0=0.2) -> dict:
    """Rewritten HMM score: product of 1 + a1*P(q|D)/(a0*P(q|GE))."""
    a1 = 1.0 - a0
    qcounts = Counter(
        {t: c for t, c in o_qgrams(query, corpus.q, corpus.padded, corpus.fold).items()
         if t in corpus.df}
    )
    out = {}
    for tid, counts in corpus.tokens.items():
        if not set(qcounts) & set(counts):
            continue
        score = 1.0
        for t, m in qcounts.items():
            tf = counts.get(t, 0)
            if tf:
                pml = tf / corpus.dl[tid]
                ptge = corpus.cf[t] / corpus.cs
                score *= (1.0 + a1 * pml / (a0 * ptge)) ** m
        out[tid] = score
    return out


def o_hmm_full(corpus: OracleCorpus, query: str, a0=0.2) -> dict:
    """Un-rewritten HMM: product over attested query occurrences of
    a0*P(q|GE) + a1*P(q|D), over the same candidate set."""
    a1 = 1.0 - a0
    qcounts = Counter(
        {t: c for t, c in o_qgrams(query, corpus.q, corpus.padded, corpus.fold).items()
         if t in corpus.df}
    )
    out = {}
    for tid, counts in corpus.tokens.items():
        if not set(qcounts) & set(counts):
            continue
        score = 1.0
        for t, m in qcounts.items():
            ptge = corpus.cf[t] / corpus.cs
            pml = counts.get(t, 0) / corpus.dl[tid]
            score *= (a0 * ptge + a1 * pml) ** m
        out[tid] = score
    return out


# ---------------------------------------------------------------------------
# edit-based and combination predicates
# ---------------------------------------------------------------------------


def lev_ref(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        curr = [i]
        for j, cb in enumerate(b, 1):
            curr.append(min(prev[j] + 1, curr[-1] + 1, prev[j - 1] + (ca != cb)))
        prev = curr
    return prev[-1]


def edit_sim_ref(a: str, b: str) -> float:
    m = max(len(a), len(b))
    return 1.0 if m == 0 else 1.0 - lev_ref(a, b) / m


def o_edit_all(corpus: OracleCorpus, query: str) -> dict:
    """Exhaustive edit similarity against every record (folded like the
    engine when case folding is on)."""
    fold = corpus.fold
    qs = query.upper() if fold else query
    return {
        tid: edit_sim_ref(qs, s.upper() if fold else s) for tid, s in corpus.records
    }


def jw_ref(a: str, b: str) -> float:
    """Reference Jaro-Winkler: window floor(max/2)-1, transpositions halved,
    prefix scale 0.1 capped at 4."""
    la, lb = len(a), len(b)
    if la == 0 and lb == 0:
        return 1.0
    if la == 0 or lb == 0:
        return 0.0
    window = max(0, max(la, lb) // 2 - 1)
    b_used = [False] * lb
    a_match = []
    for i, ca in enumerate(a):
        for j in range(max(0, i - window), min(lb, i + window + 1)):
            if not b_used[j] and b[j] == ca:
                b_used[j] = True
                a_match.append(i)
                break
    m = len(a_match)
    if m == 0:
        return 0.0
    b_match = [j for j in range(lb) if b_used[j]]
    t = sum(a[i] != b[j] for i, j in zip(a_match, b_match)) // 2
    jaro = (m / la + m / lb + (m - t) / m) / 3.0
    prefix = 0
    for ca, cb in zip(a[:4], b[:4]):
        if ca != cb:
            break
        prefix += 1
    return jaro + prefix * 0.1 * (1.0 - jaro)


class OracleWordStats:
    """Word-level idf with corpus-average fallback, plus tf-idf weights."""

    def __init__(self, records, fold=True):
        self.records = list(records)
        self.fold = fold
        self.words = {tid: o_words(s, fold) for tid, s in self.records}
        df = Counter()
        for ws in self.words.values():
            for w in set(ws):
                df[w] += 1
        n = len(self.records)
        self.idf = {w: math.log(n) - math.log(d) for w, d in df.items()}
        self.avg_idf = sum(self.idf.values()) / len(self.idf) if self.idf else 0.0

    def weight(self, w: str) -> float:
        return self.idf.get(w, self.avg_idf)

    def tfidf(self, tid) -> dict:
        counts = Counter(self.words[tid])
        raw = {w: self.idf[w] * c for w, c in counts.items()}
        norm = math.sqrt(sum(v * v for v in raw.values()))
        return {w: (v / norm if norm > 0 else 0.0) for w, v in raw.items()}


def ges_tc_ref(qwords, dwords, weight_of, c_ins=0.5) -> float:
    nq, nd = len(qwords), len(dwords)
    dp = [[0.0] * (nd + 1) for _ in range(nq + 1)]
    for j in range(1, nd + 1):
        dp[0][j] = dp[0][j - 1] + c_ins * weight_of(dwords[j - 1])
    for i in range(1, nq + 1):
        dp[i][0] = dp[i - 1][0] + weight_of(qwords[i - 1])
        for j in range(1, nd + 1):
            rep = (1.0 - edit_sim_ref(qwords[i - 1], dwords[j - 1])) * weight_of(qwords[i - 1])
            dp[i][j] = min(
                dp[i - 1][j - 1] + rep,
                dp[i - 1][j] + weight_of(qwords[i - 1]),
                dp[i][j - 1] + c_ins * weight_of(dwords[j - 1]),
            )
    return dp[nq][nd]


def o_ges(stats: OracleWordStats, query: str, c_ins=0.5) -> dict:
    qwords = o_words(query, stats.fold)
    wtq = sum(stats.weight(w) for w in qwords)
    if wtq <= 0:
        return {}
    out = {}
    for tid, _ in stats.records:
        tc = ges_tc_ref(qwords, stats.words[tid], stats.weight, c_ins)
        score = 1.0 - min(tc / wtq, 1.0)
        if score > 0:
            out[tid] = score
    return out


def _jacc(s1: set, s2: set) -> float:
    if not s1 and not s2:
        return 0.0
    return len(s1 & s2) / len(s1 | s2)


def o_ges_jaccard(stats: OracleWordStats, query: str, q=2, theta=0.0) -> dict:
    """Per query word the best word-gram Jaccard, idf-weighted, normalized
    by the total query word weight.  The theta cut uses the raw
    over-estimate; reported scores cap per-word terms at 1.  Tuples sharing
    no word gram with any query word are absent."""
    qwords = o_words(query, stats.fold)
    if not qwords:
        return {}
    wtq = sum(stats.weight(w) for w in qwords)
    if wtq <= 0:
        return {}
    dq = 1.0 - 1.0 / q
    qgram_sets = {w: o_word_gram_set(w, q) for w in set(qwords)}
    out = {}
    for tid, _ in stats.records:
        dsets = [o_word_gram_set(r, q) for r in set(stats.words[tid])]
        if not any(qgram_sets[w] & ds for w in qgram_sets for ds in dsets):
            continue
        raw = 0.0
        capped = 0.0
        for w in qwords:
            best = max((_jacc(qgram_sets[w], ds) for ds in dsets), default=0.0)
            term = (2.0 / q) * best + dq
            raw += stats.weight(w) * term
            capped += stats.weight(w) * min(1.0, term)
        if raw / wtq >= theta:
            out[tid] = capped / wtq
    return out


def _sig_ref(word: str, q: int, mult, add) -> list:
    grams = o_word_gram_set(word, q)
    hashes = [
        int.from_bytes(hashlib.blake2b(g.encode("utf-8"), digest_size=8).digest(), "little")
        for g in grams
    ]
    sig = []
    for a, b_ in zip(mult.tolist(), add.tolist()):
        sig.append(min(((a * h + b_) & 0xFFFFFFFFFFFFFFFF) for h in hashes))
    return sig


def o_ges_apx(stats: OracleWordStats, query: str, mult, add, q=2, theta=0.0) -> dict:
    """Like o_ges_jaccard with min-hash agreement replacing Jaccard; tuples
    appear when some word shares a signature component with a query word."""
    qwords = o_words(query, stats.fold)
    if not qwords:
        return {}
    wtq = sum(stats.weight(w) for w in qwords)
    if wtq <= 0:
        return {}
    h = len(mult)
    dq = 1.0 - 1.0 / q
    qsigs = {w: _sig_ref(w, q, mult, add) for w in set(qwords)}

    def simmh(w, r_sig):
        return sum(x == y for x, y in zip(qsigs[w], r_sig)) / h

    out = {}
    for tid, _ in stats.records:
        rsigs = [_sig_ref(r, q, mult, add) for r in set(stats.words[tid])]
        sims = {w: max((simmh(w, rs) for rs in rsigs), default=0.0) for w in qsigs}
        if not any(v > 0 for v in sims.values()):
            continue
        raw = 0.0
        capped = 0.0
        for w in qwords:
            term = (2.0 / q) * sims[w] + dq
            raw += stats.weight(w) * term
            capped += stats.weight(w) * min(1.0, term)
        if raw / wtq >= theta:
            out[tid] = capped / wtq
    return out


def o_soft_tfidf(stats: OracleWordStats, query: str, theta=0.8) -> dict:
    """Sum over close query words of wq * wd(argmax) * maxsim; argmax ties
    broken by lexicographically smallest record word."""
    qwords = o_words(query, stats.fold)
    counts = Counter(w for w in qwords if w in stats.idf)
    if not counts:
        return {}
    raw = {w: stats.idf[w] * c for w, c in counts.items()}
    norm = math.sqrt(sum(v * v for v in raw.values()))
    qw = {w: (v / norm if norm > 0 else 0.0) for w, v in raw.items()}
    out = {}
    for tid, _ in stats.records:
        dwords = sorted(set(stats.words[tid]))
        dw = stats.tfidf(tid)
        score = 0.0
        hit = False
        for w, wq_t in qw.items():
            best = None
            for r in dwords:
                s = jw_ref(w, r)
                if s > theta and (best is None or s > best[0]):
                    best = (s, r)
            if best is not None:
                hit = True
                score += wq_t * dw[best[1]] * best[0]
        if hit:
            out[tid] = score
    return out


# ---------------------------------------------------------------------------
# ranking comparison helpers
# ---------------------------------------------------------------------------


def oracle_ranking(scores: dict, rtol: float = 0.0) -> list:
    """(tid, score) sorted by score desc, tid asc; near-equal scores (within
    rtol relative) are grouped as ties before the tid rule applies."""
    items = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    if rtol <= 0.0 or not items:
        return items
    groups = [[items[0]]]
    for tid, s in items[1:]:
        ref = groups[-1][-1][1]
        scale = max(abs(ref), abs(s), 1e-300)
        if abs(ref - s) <= rtol * scale:
            groups[-1].append((tid, s))
        else:
            groups.append([(tid, s)])
    out = []
    for g in groups:
        out.extend(sorted(g, key=lambda kv: kv[0]))
    return out


def ranking_tids(scores: dict, rtol: float = 0.0) -> list:
    return [tid for tid, _ in oracle_ranking(scores, rtol)]
