"""Index persistence and dataset I/O.

An index directory holds little-endian binary column files under arrays/
plus a JSON manifest naming every column with its dtype and shape, the
tokenizer config, and the parameter block.  Saves are atomic (write to a
temp directory, then rename); an existing target is replaced, never
mutated in place.

Datasets travel as UTF-8 TSV with columns tid, string[, cluster_id].
"""

from __future__ import annotations

import json
import os
import shutil
from pathlib import Path
from typing import Optional

import numpy as np

from .corpus import CorpusTables, LMModel, Record, TokenTable, Vocabulary, WeightTable
from .corpus import _corpus_stats, _tuple_stats
from .index import ApproxIndex, _build_word_index
from .tokenize import TokenizerConfig

FORMAT_NAME = "apxsel-index"
FORMAT_VERSION = 1

_DTYPES = {"<i4": np.int32, "<i8": np.int64, "<f8": np.float64, "<u8": np.uint64}


class IndexFormatError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# TSV datasets
# ---------------------------------------------------------------------------


def write_records_tsv(path, records: list[Record]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            if "\t" in rec.string or "\n" in rec.string:
                raise ValueError(f"tid {rec.tid}: string contains tab/newline")
            if rec.cluster_id is None:
                f.write(f"{rec.tid}\t{rec.string}\n")
            else:
                f.write(f"{rec.tid}\t{rec.string}\t{rec.cluster_id}\n")


def read_records_tsv(path) -> list[Record]:
    records = []
    with open(path, encoding="utf-8") as f:
        for ln, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) not in (2, 3):
                raise ValueError(f"{path}:{ln}: expected 2 or 3 tab-separated fields")
            try:
                tid = int(parts[0])
                cluster = int(parts[2]) if len(parts) == 3 else None
            except ValueError as e:
                raise ValueError(f"{path}:{ln}: non-integer tid/cluster_id") from e
            records.append(Record(tid, parts[1], cluster))
    return records


def write_provenance_jsonl(path, provenance: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for entry in provenance:
            f.write(json.dumps(entry, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# index persistence
# ---------------------------------------------------------------------------


def _dtype_tag(arr: np.ndarray) -> str:
    kind = arr.dtype.kind + str(arr.dtype.itemsize)
    tag = {"i4": "<i4", "i8": "<i8", "f8": "<f8", "u8": "<u8"}.get(kind)
    if tag is None:
        raise ValueError(f"unsupported array dtype {arr.dtype}")
    return tag


def _collect_arrays(index: ApproxIndex) -> dict[str, np.ndarray]:
    arrays = {
        "tids": index.tids,
        "strlen": index.strlen,
        "token_ids": index.tables.table.token_ids,
        "token_rows": index.tables.table.rows,
        "token_tfs": index.tables.table.tfs,
        "token_ptr": index.tables.table.token_ptr,
    }
    if index.cosine is not None:
        arrays["cosine"] = index.cosine.values
    if index.bm25 is not None:
        arrays["bm25"] = index.bm25.values
    if index.hmm is not None:
        arrays["hmm"] = index.hmm.values
    if index.lm is not None:
        arrays["lm_pm"] = index.lm.pm
        arrays["lm_cfcs"] = index.lm.cfcs
        arrays["lm_sumcompm"] = index.lm.sumcompm
        arrays["lm_log_term"] = index.lm.log_term
    for scheme, vals in index.wsum.items():
        arrays[f"wsum_{scheme}"] = vals
    if index.word is not None:
        w = index.word
        arrays.update(
            word_ids=w.word_ids, word_rows=w.rows, word_tfs=w.tfs,
            word_ptr=w.word_ptr, word_seq=w.seq_flat, word_seq_ptr=w.seq_ptr,
        )
    return arrays


def save_index(index: ApproxIndex, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    if tmp.exists():
        shutil.rmtree(tmp)
    (tmp / "arrays").mkdir(parents=True)

    arrays = _collect_arrays(index)
    entries = {}
    for name, arr in arrays.items():
        tag = _dtype_tag(arr)
        rel = f"arrays/{name}.bin"
        np.ascontiguousarray(arr).astype(tag).tofile(tmp / rel)
        entries[name] = {"file": rel, "dtype": tag, "shape": list(arr.shape)}

    (tmp / "strings.json").write_text(
        json.dumps(index.strings, ensure_ascii=False), encoding="utf-8"
    )
    (tmp / "vocab.json").write_text(
        json.dumps(index.tables.vocab.tokens, ensure_ascii=False), encoding="utf-8"
    )
    manifest = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "tokenizer": {
            "q": index.cfg.q,
            "padded": index.cfg.padded,
            "case_fold": index.cfg.case_fold,
            "pad_char": index.cfg.pad_char,
        },
        "n_records": index.n_records,
        "prune_rate": index.prune_rate,
        "params": {
            "bm25": {"k1": index.bm25_k1, "b": index.bm25_b} if index.bm25 is not None else None,
            "hmm": {"a0": index.hmm_a0} if index.hmm is not None else None,
        },
        "arrays": entries,
        "word": None,
        "word_grams": [],
        "minhash": [],
    }
    if index.word is not None:
        (tmp / "word_vocab.json").write_text(
            json.dumps(index.word.vocab.tokens, ensure_ascii=False), encoding="utf-8"
        )
        manifest["word"] = {"vocab": "word_vocab.json"}
        manifest["word_grams"] = sorted(index.word.grams)
        manifest["minhash"] = sorted(list(k) for k in index.word.minhash)
    (tmp / "manifest.json").write_text(json.dumps(manifest, indent=2), encoding="utf-8")

    if path.exists():
        old = path.with_name(path.name + f".old{os.getpid()}")
        os.rename(path, old)
        os.rename(tmp, path)
        shutil.rmtree(old)
    else:
        os.rename(tmp, path)


def _load_array(base: Path, entry: dict) -> np.ndarray:
    dtype = _DTYPES.get(entry.get("dtype"))
    if dtype is None:
        raise IndexFormatError(f"unknown array dtype {entry.get('dtype')!r}")
    arr = np.fromfile(base / entry["file"], dtype=entry["dtype"]).astype(dtype)
    expected = int(np.prod(entry["shape"])) if entry["shape"] else 1
    if arr.size != expected:
        raise IndexFormatError(
            f"{entry['file']}: expected {expected} elements, found {arr.size}"
        )
    return arr.reshape(entry["shape"])


def load_index(path) -> ApproxIndex:
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.exists():
        raise IndexFormatError(f"{path}: not an index directory (no manifest.json)")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise IndexFormatError(f"{path}: corrupted manifest: {e}") from e
    if manifest.get("format") != FORMAT_NAME:
        raise IndexFormatError(f"{path}: unrecognized format {manifest.get('format')!r}")
    if manifest.get("version") != FORMAT_VERSION:
        raise IndexFormatError(
            f"{path}: index version {manifest.get('version')!r} "
            f"not supported (expected {FORMAT_VERSION})"
        )

    cfg = TokenizerConfig(**manifest["tokenizer"])
    entries = manifest["arrays"]

    def arr(name):
        if name not in entries:
            raise IndexFormatError(f"{path}: manifest missing array {name!r}")
        return _load_array(path, entries[name])

    strings = json.loads((path / "strings.json").read_text(encoding="utf-8"))
    vocab = Vocabulary()
    for tok in json.loads((path / "vocab.json").read_text(encoding="utf-8")):
        vocab.intern(tok)

    table = TokenTable(arr("token_ids"), arr("token_rows"), arr("token_tfs"), arr("token_ptr"))
    n = int(manifest["n_records"])
    tables = CorpusTables(vocab, table, _tuple_stats(table, n), _corpus_stats(table, n, len(vocab)))
    tids = arr("tids")
    index = ApproxIndex(
        cfg=cfg,
        tids=tids,
        strings=strings,
        row_of_tid={int(t): i for i, t in enumerate(tids)},
        strlen=arr("strlen"),
        tables=tables,
        prune_rate=float(manifest.get("prune_rate", 0.0)),
    )
    params = manifest.get("params", {})
    if "cosine" in entries:
        index.cosine = WeightTable("cosine", arr("cosine"))
    if "bm25" in entries:
        index.bm25 = WeightTable("bm25", arr("bm25"))
        index.bm25_k1 = float(params["bm25"]["k1"])
        index.bm25_b = float(params["bm25"]["b"])
    if "hmm" in entries:
        index.hmm = WeightTable("hmm", arr("hmm"))
        index.hmm_logw = np.log(index.hmm.values)
        index.hmm_a0 = float(params["hmm"]["a0"])
    if "lm_pm" in entries:
        index.lm = LMModel(
            pm=arr("lm_pm"), cfcs=arr("lm_cfcs"),
            sumcompm=arr("lm_sumcompm"), log_term=arr("lm_log_term"),
        )
    for scheme in ("rs", "idf"):
        if f"wsum_{scheme}" in entries:
            index.wsum[scheme] = arr(f"wsum_{scheme}")
    if manifest.get("word"):
        # derived word-level columns are deterministic; rebuild from strings
        index.word = _build_word_index(strings, cfg)
        for q in manifest.get("word_grams", []):
            index.ensure_word_grams(int(q))
        for q, h, seed in manifest.get("minhash", []):
            index.ensure_minhash(int(q), h=int(h), seed=int(seed))
    return index
