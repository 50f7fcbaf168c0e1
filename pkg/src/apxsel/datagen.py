"""Error-injecting duplicate generator for dedup benchmarks.

Clean source strings are duplicated according to a cluster-size
distribution; a configurable fraction of duplicates receives abbreviation,
token-swap and character-edit errors.  Every record carries the cluster id
of its clean source, and a provenance log records exactly which errors were
applied.  All randomness flows through counter-based Philox streams keyed
by (seed, record index), so regeneration is reproducible and independent of
iteration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .corpus import Record

# error characters drawn with English letter frequencies: realistic typo
# noise shares q-grams with the rest of the corpus instead of being unique
_ERR_LETTERS = "etaoinshrdlcumwfgypbvkjxqz"
_ERR_WEIGHTS = np.array(
    [12.7, 9.1, 8.2, 7.5, 7.0, 6.7, 6.3, 6.1, 6.0, 4.3, 4.0, 2.8, 2.8, 2.4,
     2.4, 2.2, 2.0, 2.0, 1.9, 1.5, 1.0, 0.8, 0.15, 0.15, 0.1, 0.07]
)
_ERR_WEIGHTS = _ERR_WEIGHTS**2 / (_ERR_WEIGHTS**2).sum()

DEFAULT_ABBREVIATIONS = {
    "Inc.": "Incorporated",
    "Corp.": "Corporation",
    "Co.": "Company",
    "Intl.": "International",
}


def bidirectional(mapping: dict) -> dict:
    """Return the mapping extended with its own inverse."""
    out = dict(mapping)
    for k, v in mapping.items():
        out[v] = k
    return out


@dataclass
class GeneratorConfig:
    target_size: int
    num_clean: int
    distribution: str = "uniform"  # uniform | zipf | poisson
    zipf_s: float = 1.0
    poisson_lam: Optional[float] = None  # defaults to target_size / num_clean
    pct_erroneous: float = 50.0
    extent_pct: float = 30.0
    pct_token_swap: float = 20.0
    pct_abbreviation: float = 50.0
    abbreviations: Optional[dict] = None  # one direction; inverted automatically
    swap_adjacent: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.num_clean < 1:
            raise ValueError("num_clean must be >= 1")
        if self.num_clean > self.target_size:
            raise ValueError("num_clean must not exceed target_size")
        if self.distribution not in ("uniform", "zipf", "poisson"):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        for name in ("pct_erroneous", "extent_pct", "pct_token_swap", "pct_abbreviation"):
            v = getattr(self, name)
            if not 0.0 <= v <= 100.0:
                raise ValueError(f"{name} must be in [0, 100], got {v}")

    def abbreviation_map(self) -> dict:
        return bidirectional(self.abbreviations or DEFAULT_ABBREVIATIONS)


@dataclass
class GeneratedDataset:
    records: list[Record]
    provenance: list[dict] = field(default_factory=list)


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, stream]))


def _allocate(weights: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder apportionment of ``total`` across clusters, each
    cluster getting at least 1 (the clean record itself)."""
    n = weights.size
    spare = total - n
    shares = weights / weights.sum() * spare
    sizes = np.floor(shares).astype(np.int64)
    leftover = spare - int(sizes.sum())
    if leftover > 0:
        frac = shares - sizes
        order = np.lexsort((np.arange(n), -frac))
        sizes[order[:leftover]] += 1
    return sizes + 1


def _cluster_sizes(cfg: GeneratorConfig, rng: np.random.Generator) -> np.ndarray:
    n = cfg.num_clean
    if cfg.distribution == "uniform":
        weights = np.ones(n)
    elif cfg.distribution == "zipf":
        weights = 1.0 / np.arange(1, n + 1, dtype=np.float64) ** cfg.zipf_s
    else:  # poisson
        lam = cfg.poisson_lam if cfg.poisson_lam is not None else cfg.target_size / n
        weights = rng.poisson(lam, size=n).astype(np.float64) + 1e-9
    return _allocate(weights, cfg.target_size)


def _rand_letter(rng: np.random.Generator) -> str:
    return str(rng.choice(list(_ERR_LETTERS), p=_ERR_WEIGHTS))


def _word_spans(chars: list) -> list[tuple[int, int]]:
    spans = []
    start = None
    for i, c in enumerate(chars + [" "]):
        if c != " " and start is None:
            start = i
        elif c == " " and start is not None:
            spans.append((start, i))
            start = None
    return spans


def _edit_ops(s: str, extent_pct: float, rng: np.random.Generator) -> tuple[str, list[dict]]:
    # Edits target characters, never whitespace: typos corrupt words, they
    # do not split or merge them.  Edits cluster into a random subset of the
    # words, and the corruption breadth is heterogeneous: most tuples get
    # concentrated bursts that leave other words intact, a minority get
    # edits spread over nearly every word (real dirty data mixes both).
    count = round(extent_pct / 100.0 * len(s))
    ops: list[dict] = []
    chars = list(s)
    n_words = len(_word_spans(chars))
    if count and n_words:
        target_p = 0.80 if rng.random() < 0.45 else 0.22
        targets = [k for k in range(n_words) if rng.random() < target_p]
        if not targets:
            targets = [int(rng.integers(0, n_words))]
    else:
        targets = []
    for _ in range(count):
        spans = [sp for k, sp in enumerate(_word_spans(chars)) if k in targets]
        if not spans:
            break
        letters = [i for a, b in spans for i in range(a, b)]
        pairs = [i for a, b in spans for i in range(a, b - 1)]
        valid = ["insert"]
        if letters:
            valid += ["delete", "replace"]
        if pairs:
            valid.append("swap")
        op = valid[rng.integers(0, len(valid))]
        if op == "insert":
            a, b = spans[rng.integers(0, len(spans))]
            pos = int(rng.integers(a, b + 1))
            ch = _rand_letter(rng)
            chars.insert(pos, ch)
            ops.append({"op": "insert", "pos": pos, "char": ch})
        elif op == "delete":
            pos = int(letters[rng.integers(0, len(letters))])
            ops.append({"op": "delete", "pos": pos, "char": chars.pop(pos)})
        elif op == "replace":
            pos = int(letters[rng.integers(0, len(letters))])
            ch = _rand_letter(rng)
            ops.append({"op": "replace", "pos": pos, "old": chars[pos], "char": ch})
            chars[pos] = ch
        else:  # swap adjacent characters within a word
            pos = int(pairs[rng.integers(0, len(pairs))])
            chars[pos], chars[pos + 1] = chars[pos + 1], chars[pos]
            ops.append({"op": "swap", "pos": pos})
    return "".join(chars), ops


def _token_swap(
    s: str, pct: float, rng: np.random.Generator, adjacent: bool = True
) -> tuple[str, list]:
    words = s.split()
    n_pairs = max(0, len(words) - 1)
    k = round(pct / 100.0 * n_pairs)
    if k <= 0:
        return s, []
    swapped = []
    if adjacent:
        positions = rng.choice(n_pairs, size=min(k, n_pairs), replace=False)
        for p in positions:
            p = int(p)
            words[p], words[p + 1] = words[p + 1], words[p]
            swapped.append((p, p + 1))
    else:
        for _ in range(k):
            i, j = rng.choice(len(words), size=2, replace=False)
            i, j = int(i), int(j)
            words[i], words[j] = words[j], words[i]
            swapped.append((i, j))
    return " ".join(words), swapped


def _abbreviate(s: str, mapping: dict, rng: np.random.Generator) -> tuple[str, Optional[dict]]:
    lower_map = {k.lower(): v for k, v in mapping.items()}
    words = s.split()
    hits = [i for i, w in enumerate(words) if w.lower() in lower_map]
    if not hits:
        return s, None
    i = int(hits[rng.integers(0, len(hits))])
    old = words[i]
    words[i] = lower_map[old.lower()]
    return " ".join(words), {"from": old, "to": words[i]}


def inject_edit_errors(s: str, extent_pct: float, rng: np.random.Generator) -> str:
    """Apply round(extent_pct% * |s|) random character edits (insert, delete,
    replace, adjacent swap), one per selected position."""
    return _edit_ops(s, extent_pct, rng)[0]


def inject_token_swap(
    s: str, pct: float, rng: np.random.Generator, adjacent: bool = True
) -> str:
    """Swap round(pct% * (#words - 1)) adjacent word pairs chosen without
    replacement (arbitrary pairs with adjacent=False)."""
    return _token_swap(s, pct, rng, adjacent)[0]


def inject_abbreviation(s: str, mapping: dict, rng: np.random.Generator) -> str:
    """Replace one dictionary-matched word with its counterpart, if any."""
    return _abbreviate(s, mapping, rng)[0]


def generate(clean: list[str], cfg: GeneratorConfig) -> GeneratedDataset:
    """Build a dataset of ``cfg.target_size`` records from clean sources.

    Cluster sizes follow the configured distribution and sum exactly to the
    target; ceil(pct_erroneous% of duplicates) are selected for error
    injection (abbreviation, then token swaps, then character edits).  A
    duplicate is flagged erroneous in the provenance only when at least one
    error actually landed.
    """
    if len(clean) < cfg.num_clean:
        raise ValueError(
            f"clean pool has {len(clean)} strings, need num_clean={cfg.num_clean}"
        )
    master = _rng(cfg.seed, 0)
    picks = master.choice(len(clean), size=cfg.num_clean, replace=False)
    sizes = _cluster_sizes(cfg, master)
    n_dup = cfg.target_size - cfg.num_clean
    n_err = math.ceil(cfg.pct_erroneous / 100.0 * n_dup)
    err_set = set(master.choice(n_dup, size=n_err, replace=False).tolist()) if n_dup else set()
    mapping = cfg.abbreviation_map()

    records: list[Record] = []
    provenance: list[dict] = []
    tid = 0
    dup_idx = 0
    for c, pick in enumerate(picks):
        source = clean[int(pick)]
        tid += 1
        cluster_id = tid
        records.append(Record(tid, source, cluster_id))
        provenance.append(
            {"tid": tid, "cluster_id": cluster_id, "source_tid": cluster_id,
             "erroneous": False, "errors": []}
        )
        for _ in range(int(sizes[c]) - 1):
            tid += 1
            s = source
            errors: list[dict] = []
            if dup_idx in err_set:
                rng = _rng(cfg.seed, dup_idx + 1)
                if cfg.pct_abbreviation > 0 and rng.random() * 100.0 < cfg.pct_abbreviation:
                    s, change = _abbreviate(s, mapping, rng)
                    if change:
                        errors.append({"type": "abbreviation", **change})
                if cfg.pct_token_swap > 0:
                    s, pairs = _token_swap(s, cfg.pct_token_swap, rng, cfg.swap_adjacent)
                    if pairs:
                        errors.append({"type": "token_swap", "pairs": pairs})
                if cfg.extent_pct > 0:
                    s, ops = _edit_ops(s, cfg.extent_pct, rng)
                    if ops:
                        errors.append({"type": "edit", "ops": ops})
            records.append(Record(tid, s, cluster_id))
            provenance.append(
                {"tid": tid, "cluster_id": cluster_id, "source_tid": cluster_id,
                 "erroneous": bool(errors), "errors": errors}
            )
            dup_idx += 1
    return GeneratedDataset(records=records, provenance=provenance)


# ---------------------------------------------------------------------------
# synthetic clean pools (stand-ins for the company names / titles corpora)
# ---------------------------------------------------------------------------

_ONSETS = ["b", "br", "c", "ch", "cl", "d", "dr", "f", "fl", "g", "gr", "h", "j",
           "k", "kr", "l", "m", "n", "p", "pr", "qu", "r", "s", "sh", "sl", "st",
           "str", "t", "th", "tr", "v", "w", "z"]
_NUCLEI = ["a", "e", "i", "o", "u", "a", "e", "o", "ai", "ea", "ee", "io", "ou",
           "ar", "er", "ir", "or", "an", "en", "in", "on", "al", "el"]
_CODAS = ["", "", "n", "r", "s", "l", "t", "x", "m", "nd", "nt", "rk", "st",
          "ck", "ld", "rn", "sh", "th", "g", "v"]
# frequent vocabulary, Zipf-weighted in order: long common words dilute
# unweighted overlap the way real company names do
_PREFIXES = ["American", "National", "United", "General", "First", "Global",
             "Pacific", "Northern"]
_INDUSTRY = ["Communications", "Technologies", "Industries", "Financial", "Systems",
             "Holdings", "Services", "Group", "Partners", "Capital", "Energy", "Labs",
             "Media", "Logistics", "Trust", "Airlines", "Motors", "Software",
             "Electronics", "Solutions"]
_SUFFIXES = ["Inc.", "Incorporated", "Corp.", "Corporation", "Co.", "Company",
             "Intl.", "International"]
_SUFFIX_W = [0.15, 0.28, 0.08, 0.20, 0.06, 0.08, 0.04, 0.11]

_TOPIC = ["Query", "Index", "Stream", "Graph", "Database", "Parallel", "Adaptive",
          "Learning", "Approximate", "Relational", "Distributed", "Temporal",
          "Efficient", "Semantic", "Matching", "Clustering", "Retrieval", "Search",
          "Estimation", "Optimization", "Selection", "Evaluation", "Mining", "Models"]


def _proper_word(rng: np.random.Generator) -> str:
    syllables = int(rng.integers(2, 4))
    word = "".join(
        _ONSETS[rng.integers(0, len(_ONSETS))]
        + _NUCLEI[rng.integers(0, len(_NUCLEI))]
        + (_CODAS[rng.integers(0, len(_CODAS))] if s == syllables - 1 or rng.random() < 0.3 else "")
        for s in range(syllables)
    )
    return word.capitalize()


def synth_company_names(n: int, seed: int = 0) -> list[str]:
    """Distinct company-style strings (~3.4 words): essentially-unique
    proper words mixed with Zipf-weighted frequent vocabulary (prefix,
    industry, legal suffix), mirroring real company-name statistics."""
    rng = _rng(seed, 9001)
    suffix_p = np.array(_SUFFIX_W) / sum(_SUFFIX_W)
    ind_p = 1.0 / np.arange(1, len(_INDUSTRY) + 1)
    ind_p /= ind_p.sum()
    pre_p = 1.0 / np.arange(1, len(_PREFIXES) + 1)
    pre_p /= pre_p.sum()
    names: list[str] = []
    seen = set()
    while len(names) < n:
        parts = []
        if rng.random() < 0.55:
            parts.append(_PREFIXES[rng.choice(len(_PREFIXES), p=pre_p)])
        parts.append(_proper_word(rng))
        if rng.random() < 0.30:
            parts.append(_proper_word(rng))
        if rng.random() < 0.80:
            parts.append(_INDUSTRY[rng.choice(len(_INDUSTRY), p=ind_p)])
        if rng.random() < 0.95:
            parts.append(_SUFFIXES[rng.choice(len(_SUFFIXES), p=suffix_p)])
        name = " ".join(parts)
        if name not in seen:
            seen.add(name)
            names.append(name)
    return names


def synth_titles(n: int, seed: int = 0) -> list[str]:
    """Distinct title-style strings (4-6 words, mostly from a small topic
    vocabulary) with one rare word, useful when token-level errors need room
    to land."""
    rng = _rng(seed, 9002)
    titles: list[str] = []
    seen = set()
    while len(titles) < n:
        k = int(rng.integers(4, 7))
        parts = [_TOPIC[rng.integers(0, len(_TOPIC))] for _ in range(k - 1)]
        parts.append(_proper_word(rng))
        title = " ".join(parts)
        if title not in seen:
            seen.add(title)
            titles.append(title)
    return titles
