"""Ranked results: score-descending order with ascending-tid tie breaking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class RankedResult:
    tids: np.ndarray
    scores: np.ndarray

    def __len__(self) -> int:
        return self.tids.size

    def __iter__(self):
        for t, s in zip(self.tids, self.scores):
            yield int(t), float(s)

    def pairs(self) -> list[tuple[int, float]]:
        return list(self)

    def top_k(self, k: int) -> "RankedResult":
        k = max(0, int(k))
        return RankedResult(self.tids[:k], self.scores[:k])

    def with_min_score(self, min_score: float) -> "RankedResult":
        keep = self.scores >= min_score
        return RankedResult(self.tids[keep], self.scores[keep])


def empty_result() -> RankedResult:
    return RankedResult(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))


def rank_rows(
    all_tids: np.ndarray,
    cand_rows: np.ndarray,
    scores: np.ndarray,
    sort_key: Optional[np.ndarray] = None,
) -> RankedResult:
    """Order candidate rows by score descending, ties by tid ascending.

    ``sort_key`` lets callers sort in a monotone transform of the reported
    score (e.g. log domain) to stay stable when exp() saturates.
    """
    if cand_rows.size == 0:
        return empty_result()
    tids = all_tids[cand_rows]
    key = scores if sort_key is None else sort_key
    order = np.lexsort((tids, -key))
    return RankedResult(tids[order], np.asarray(scores, dtype=np.float64)[order])


def truncate(result: RankedResult, top_k=None, min_score=None) -> RankedResult:
    if min_score is not None:
        result = result.with_min_score(min_score)
    if top_k is not None:
        result = result.top_k(top_k)
    return result
