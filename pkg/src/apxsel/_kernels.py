"""Hot numeric kernels: edit-distance DP, Jaro-Winkler, score accumulation.

Kernels are written as plain loops and compiled with numba's @njit when
available.  Setting the environment variable ``APXSEL_NUMBA=0`` (or numba
being absent) selects the pure-numpy fallback path instead: vectorized
implementations for the accumulation/DP kernels and interpreted loops for
the rest.  Both paths produce the same results; ``benchmarks/compare_backends.py``
measures the difference.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("APXSEL_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "off", "no")

NUMBA_ENABLED = False
if _want_numba:
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False


def backend() -> str:
    """Name of the active kernel backend ("numba" or "numpy")."""
    return "numba" if NUMBA_ENABLED else "numpy"


def str_codes(s: str) -> np.ndarray:
    """Unicode codepoints of ``s`` as an int32 array."""
    if not s:
        return np.empty(0, dtype=np.int32)
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int32)


def flatten_codes(strings) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate codepoint arrays; returns (flat, offsets) with len(offsets)=n+1."""
    offs = np.zeros(len(strings) + 1, dtype=np.int64)
    parts = []
    for i, s in enumerate(strings):
        c = s if isinstance(s, np.ndarray) else str_codes(s)
        parts.append(c)
        offs[i + 1] = offs[i] + c.size
    flat = np.concatenate(parts) if parts else np.empty(0, dtype=np.int32)
    return flat.astype(np.int32, copy=False), offs


# ---------------------------------------------------------------------------
# loop-form kernels (njit targets)
# ---------------------------------------------------------------------------


def _lev_loop(a, b):
    la = a.size
    lb = b.size
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = np.empty(lb + 1, dtype=np.int64)
    curr = np.empty(lb + 1, dtype=np.int64)
    for j in range(lb + 1):
        prev[j] = j
    for i in range(1, la + 1):
        curr[0] = i
        ai = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = prev[j - 1] + cost
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if curr[j - 1] + 1 < best:
                best = curr[j - 1] + 1
            curr[j] = best
        tmp = prev
        prev = curr
        curr = tmp
    return prev[lb]


def _lev_batch_loop(q, flat, offs, out):
    for k in range(offs.size - 1):
        out[k] = _lev_loop(q, flat[offs[k] : offs[k + 1]])


def _jw_loop(a, b):
    # Standard Jaro-Winkler: match window floor(max/2)-1, transpositions
    # halved, prefix scale 0.1 capped at 4 common leading characters.
    la = a.size
    lb = b.size
    if la == 0 and lb == 0:
        return 1.0
    if la == 0 or lb == 0:
        return 0.0
    window = (la if la > lb else lb) // 2 - 1
    if window < 0:
        window = 0
    a_match = np.zeros(la, dtype=np.bool_)
    b_match = np.zeros(lb, dtype=np.bool_)
    m = 0
    for i in range(la):
        lo = i - window
        if lo < 0:
            lo = 0
        hi = i + window + 1
        if hi > lb:
            hi = lb
        for j in range(lo, hi):
            if not b_match[j] and a[i] == b[j]:
                a_match[i] = True
                b_match[j] = True
                m += 1
                break
    if m == 0:
        return 0.0
    t = 0
    j = 0
    for i in range(la):
        if a_match[i]:
            while not b_match[j]:
                j += 1
            if a[i] != b[j]:
                t += 1
            j += 1
    half_t = t // 2
    fm = float(m)
    jaro = (fm / la + fm / lb + (fm - half_t) / fm) / 3.0
    maxpref = la if la < lb else lb
    if maxpref > 4:
        maxpref = 4
    prefix = 0
    for i in range(maxpref):
        if a[i] == b[i]:
            prefix += 1
        else:
            break
    return jaro + prefix * 0.1 * (1.0 - jaro)


def _jw_batch_loop(q, flat, offs, out):
    for k in range(offs.size - 1):
        out[k] = _jw_loop(q, flat[offs[k] : offs[k + 1]])


def _ges_tc_loop(qflat, qoffs, qw, dflat, doffs, dw, c_ins):
    # Word-level alignment DP transforming the query word sequence into the
    # tuple word sequence.  Replace cost (1-sim_edit)*w(q_i), delete w(q_i),
    # insert c_ins*w(d_j).
    nq = qoffs.size - 1
    nd = doffs.size - 1
    prev = np.empty(nd + 1, dtype=np.float64)
    curr = np.empty(nd + 1, dtype=np.float64)
    prev[0] = 0.0
    for j in range(1, nd + 1):
        prev[j] = prev[j - 1] + c_ins * dw[j - 1]
    for i in range(1, nq + 1):
        curr[0] = prev[0] + qw[i - 1]
        qa = qflat[qoffs[i - 1] : qoffs[i]]
        for j in range(1, nd + 1):
            da = dflat[doffs[j - 1] : doffs[j]]
            mx = qa.size if qa.size > da.size else da.size
            if mx > 0:
                dist = _lev_loop(qa, da)
                rep_unit = dist / mx
            else:
                rep_unit = 0.0
            best = prev[j - 1] + rep_unit * qw[i - 1]
            cand = prev[j] + qw[i - 1]
            if cand < best:
                best = cand
            cand = curr[j - 1] + c_ins * dw[j - 1]
            if cand < best:
                best = cand
            curr[j] = best
        tmp = prev
        prev = curr
        curr = tmp
    return prev[nd]


def _accumulate_loop(idx, vals, out):
    for k in range(idx.size):
        out[idx[k]] += vals[k]


def _max_accumulate_loop(idx, vals, out):
    for k in range(idx.size):
        if vals[k] > out[idx[k]]:
            out[idx[k]] = vals[k]


if NUMBA_ENABLED:
    _lev_loop = _njit(cache=True)(_lev_loop)
    _lev_batch_loop = _njit(cache=True)(_lev_batch_loop)
    _jw_loop = _njit(cache=True)(_jw_loop)
    _jw_batch_loop = _njit(cache=True)(_jw_batch_loop)
    _ges_tc_loop = _njit(cache=True)(_ges_tc_loop)
    _accumulate_loop = _njit(cache=True)(_accumulate_loop)
    _max_accumulate_loop = _njit(cache=True)(_max_accumulate_loop)


# ---------------------------------------------------------------------------
# pure-numpy fallbacks for the DP/accumulation kernels
# ---------------------------------------------------------------------------


def _lev_numpy(a, b):
    la = a.size
    lb = b.size
    if la == 0:
        return int(lb)
    if lb == 0:
        return int(la)
    jj = np.arange(lb + 1, dtype=np.int64)
    prev = jj.copy()
    for i in range(1, la + 1):
        sub = prev[:-1] + (b != a[i - 1])
        base = np.empty(lb + 1, dtype=np.int64)
        base[0] = i
        base[1:] = np.minimum(sub, prev[1:] + 1)
        # insertion chain: row[j] = j + min_{k<=j}(base[k] - k)
        prev = np.minimum.accumulate(base - jj) + jj
    return int(prev[-1])


def _ges_tc_numpy(qflat, qoffs, qw, dflat, doffs, dw, c_ins):
    nq = qoffs.size - 1
    nd = doffs.size - 1
    prev = np.empty(nd + 1)
    prev[0] = 0.0
    for j in range(1, nd + 1):
        prev[j] = prev[j - 1] + c_ins * dw[j - 1]
    for i in range(1, nq + 1):
        curr = np.empty(nd + 1)
        curr[0] = prev[0] + qw[i - 1]
        qa = qflat[qoffs[i - 1] : qoffs[i]]
        for j in range(1, nd + 1):
            da = dflat[doffs[j - 1] : doffs[j]]
            mx = max(qa.size, da.size)
            rep_unit = _lev_numpy(qa, da) / mx if mx else 0.0
            curr[j] = min(
                prev[j - 1] + rep_unit * qw[i - 1],
                prev[j] + qw[i - 1],
                curr[j - 1] + c_ins * dw[j - 1],
            )
        prev = curr
    return float(prev[nd])


# ---------------------------------------------------------------------------
# public API (backend-dispatching)
# ---------------------------------------------------------------------------


def levenshtein_codes(a: np.ndarray, b: np.ndarray) -> int:
    """Unit-cost edit distance between two codepoint arrays."""
    if NUMBA_ENABLED:
        return int(_lev_loop(a, b))
    return _lev_numpy(a, b)


def levenshtein_batch(q: np.ndarray, flat: np.ndarray, offs: np.ndarray) -> np.ndarray:
    """Edit distance of ``q`` against each of the packed strings."""
    out = np.empty(offs.size - 1, dtype=np.int64)
    if NUMBA_ENABLED:
        _lev_batch_loop(q, flat, offs, out)
    else:
        for k in range(offs.size - 1):
            out[k] = _lev_numpy(q, flat[offs[k] : offs[k + 1]])
    return out


def jaro_winkler_codes(a: np.ndarray, b: np.ndarray) -> float:
    return float(_jw_loop(a, b))


def jaro_winkler_batch(q: np.ndarray, flat: np.ndarray, offs: np.ndarray) -> np.ndarray:
    out = np.empty(offs.size - 1, dtype=np.float64)
    if NUMBA_ENABLED:
        _jw_batch_loop(q, flat, offs, out)
    else:
        for k in range(offs.size - 1):
            out[k] = _jw_loop(q, flat[offs[k] : offs[k + 1]])
    return out


def ges_transform_cost(qflat, qoffs, qw, dflat, doffs, dw, c_ins: float) -> float:
    """Minimum weighted cost of transforming word sequence Q into D."""
    if NUMBA_ENABLED:
        return float(_ges_tc_loop(qflat, qoffs, qw, dflat, doffs, dw, c_ins))
    return _ges_tc_numpy(qflat, qoffs, qw, dflat, doffs, dw, c_ins)


def accumulate_scores(idx: np.ndarray, vals: np.ndarray, n: int) -> np.ndarray:
    """Dense ``out[i] = sum of vals where idx == i`` over ``n`` slots."""
    if NUMBA_ENABLED:
        out = np.zeros(n, dtype=np.float64)
        _accumulate_loop(idx, vals, out)
        return out
    return np.bincount(idx, weights=vals, minlength=n).astype(np.float64, copy=False)


def max_accumulate(idx: np.ndarray, vals: np.ndarray, n: int) -> np.ndarray:
    """Dense ``out[i] = max of vals where idx == i`` (0 where untouched)."""
    out = np.zeros(n, dtype=np.float64)
    if NUMBA_ENABLED:
        _max_accumulate_loop(idx, vals, out)
    else:
        np.maximum.at(out, idx, vals)
    return out
