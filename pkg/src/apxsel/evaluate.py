"""IR-style accuracy evaluation: average precision, max-F1, benchmark runner.

Relevance for a query tuple is every tuple sharing its cluster id (the
query tuple itself included).  Rankings are evaluated un-thresholded, so
results are independent of any similarity cutoff.
"""

from __future__ import annotations

import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .corpus import Record
from .index import build_index
from .predicates import GESParams, PredicateParams, Selector, SoftTFIDFParams
from .ranking import RankedResult
from .tokenize import TokenizerConfig


def _ranked_tids(ranked) -> Iterable[int]:
    if isinstance(ranked, RankedResult):
        return ranked.tids.tolist()
    return [t for t, *_ in ranked] if ranked and isinstance(ranked[0], tuple) else list(ranked)


def average_precision(ranked, relevant: set) -> float:
    """Mean of the precision values at each rank holding a relevant record;
    relevant records missing from the ranking contribute zero."""
    if not relevant:
        return 0.0
    hits = 0
    total = 0.0
    for r, tid in enumerate(_ranked_tids(ranked), start=1):
        if tid in relevant:
            hits += 1
            total += hits / r
    return total / len(relevant)


def max_f1(ranked, relevant: set) -> float:
    """Maximum harmonic mean of precision and recall over all rank cutoffs."""
    if not relevant:
        return 0.0
    best = 0.0
    hits = 0
    for r, tid in enumerate(_ranked_tids(ranked), start=1):
        if tid in relevant:
            hits += 1
            pr = hits / r
            re = hits / len(relevant)
            f1 = 2.0 * pr * re / (pr + re)
            if f1 > best:
                best = f1
    return best


def relevance_sets(records: list[Record]) -> dict:
    """cluster_id -> set of tids; raises if any record lacks a cluster id."""
    clusters: dict[int, set] = {}
    for rec in records:
        if rec.cluster_id is None:
            raise ValueError(f"record tid={rec.tid} has no cluster_id; cannot evaluate")
        clusters.setdefault(rec.cluster_id, set()).add(rec.tid)
    return clusters


@dataclass
class PredicateReport:
    predicate: str
    map_score: float
    mean_max_f1: float
    ap: list
    query_seconds_mean: float
    query_seconds_p95: float
    preprocess_seconds: float = 0.0


@dataclass
class EvalReport:
    n_queries: int
    seed: int
    preprocess_seconds: float
    predicates: dict = field(default_factory=dict)  # name -> PredicateReport

    def to_dict(self) -> dict:
        return {
            "n_queries": self.n_queries,
            "seed": self.seed,
            "preprocess_seconds": self.preprocess_seconds,
            "predicates": {
                name: {
                    "map": r.map_score,
                    "mean_max_f1": r.mean_max_f1,
                    "ap": r.ap,
                    "query_seconds_mean": r.query_seconds_mean,
                    "query_seconds_p95": r.query_seconds_p95,
                    "preprocess_seconds": r.preprocess_seconds,
                }
                for name, r in self.predicates.items()
            },
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_table(self) -> str:
        lines = [f"{'predicate':<18} {'MAP':>8} {'maxF1':>8} {'q_mean_ms':>10} {'q_p95_ms':>9}"]
        for name, r in self.predicates.items():
            lines.append(
                f"{name:<18} {r.map_score:>8.4f} {r.mean_max_f1:>8.4f} "
                f"{r.query_seconds_mean * 1e3:>10.3f} {r.query_seconds_p95 * 1e3:>9.3f}"
            )
        return "\n".join(lines)

    def to_csv(self) -> str:
        rows = ["predicate,map,mean_max_f1,query_seconds_mean,query_seconds_p95"]
        for name, r in self.predicates.items():
            rows.append(
                f"{name},{r.map_score},{r.mean_max_f1},{r.query_seconds_mean},{r.query_seconds_p95}"
            )
        return "\n".join(rows)


def run_benchmark(
    records: list[Record],
    predicates: list[str],
    n_queries: int = 500,
    seed: int = 0,
    cfg: Optional[TokenizerConfig] = None,
    prune_rate: float = 0.0,
    params: Optional[PredicateParams] = None,
    ges: Optional[GESParams] = None,
    soft: Optional[SoftTFIDFParams] = None,
    edit_theta: float = 0.7,
    minhash_h: int = 5,
    minhash_seed: int = 0,
    jobs: int = 1,
    index=None,
) -> EvalReport:
    """Sample query tuples (clean and erroneous alike), rank with each
    predicate, and aggregate MAP / mean max-F1 / timing."""
    clusters = relevance_sets(records)
    t0 = time.perf_counter()
    if index is None:
        index = build_index(
            records,
            cfg or TokenizerConfig(),
            predicates=predicates,
            prune_rate=prune_rate,
            k1=(params or PredicateParams()).k1,
            b=(params or PredicateParams()).b,
            a0=(params or PredicateParams()).a0,
            ges_q=(ges.q if ges else None),
            minhash_h=minhash_h,
            minhash_seed=minhash_seed,
        )
    build_seconds = time.perf_counter() - t0
    selector = Selector(
        index, params=params, ges=ges, soft=soft, edit_theta=edit_theta,
        minhash_h=minhash_h, minhash_seed=minhash_seed,
    )

    if n_queries > len(records):
        warnings.warn(
            f"n_queries={n_queries} exceeds dataset size {len(records)}; clipping"
        )
        n_queries = len(records)
    rng = np.random.default_rng(seed)
    sample = rng.choice(len(records), size=n_queries, replace=False)
    queries = [(records[int(i)].string, clusters[records[int(i)].cluster_id]) for i in sample]

    report = EvalReport(n_queries=n_queries, seed=seed, preprocess_seconds=build_seconds)
    for name in predicates:
        times = np.empty(len(queries))

        def one(iq):
            i, (qs, rel) = iq
            t1 = time.perf_counter()
            ranked = selector.score(name, qs)
            times[i] = time.perf_counter() - t1
            return average_precision(ranked, rel), max_f1(ranked, rel)

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                pairs = list(pool.map(one, enumerate(queries)))
        else:
            pairs = [one(iq) for iq in enumerate(queries)]
        aps = [p[0] for p in pairs]
        f1s = [p[1] for p in pairs]
        report.predicates[name] = PredicateReport(
            predicate=name,
            map_score=float(np.mean(aps)) if aps else 0.0,
            mean_max_f1=float(np.mean(f1s)) if f1s else 0.0,
            ap=aps,
            query_seconds_mean=float(np.mean(times)) if len(queries) else 0.0,
            query_seconds_p95=float(np.percentile(times, 95)) if len(queries) else 0.0,
        )
    return report
