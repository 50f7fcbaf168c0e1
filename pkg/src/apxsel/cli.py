"""Command-line surface: generate data, build indexes, query, benchmark,
emit SQL.

All randomness flows from --seed; when omitted, a seed is generated and
printed on stderr so runs stay reproducible after the fact.  A --config
file (TOML or JSON) supplies defaults that explicit flags override.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

import numpy as np

from .corpus import DuplicateTidError
from .datagen import GeneratorConfig, generate
from .evaluate import run_benchmark
from .index import PREDICATE_NAMES, build_index
from .predicates import GESParams, PredicateParams, Selector, SoftTFIDFParams
from .sqlgen import SqlTemplateParams, emit_sql
from .storage import (
    IndexFormatError,
    load_index,
    read_records_tsv,
    save_index,
    write_provenance_jsonl,
    write_records_tsv,
)
from .tokenize import TokenizerConfig


def _load_config(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        return json.loads(text)
    try:
        import tomllib  # Python >= 3.11
    except ImportError:
        import tomli as tomllib
    return tomllib.loads(text)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is None:
        seed = secrets.randbelow(2**31)
        print(f"seed: {seed} (generated; pass --seed {seed} to reproduce)", file=sys.stderr)
        return seed
    return args.seed


def _predicate_list(spec: str) -> list[str]:
    names = [p.strip() for p in spec.split(",") if p.strip()]
    unknown = [p for p in names if p not in PREDICATE_NAMES]
    if unknown:
        raise ValueError(
            f"unknown predicates {unknown}; valid: {', '.join(PREDICATE_NAMES)}"
        )
    return names


def _read_abbr_tsv(path: str) -> dict:
    mapping = {}
    for ln, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{ln}: expected two tab-separated columns")
        mapping[parts[0]] = parts[1]
    return mapping


def _params_from(args) -> PredicateParams:
    return PredicateParams(
        k1=args.k1, k3=getattr(args, "k3", 8.0), b=args.b, a0=args.a0,
        weight_scheme=getattr(args, "scheme", "rs"),
    )


def cmd_gen(args) -> int:
    seed = _resolve_seed(args)
    clean = [
        line for line in Path(args.clean).read_text(encoding="utf-8").splitlines() if line
    ]
    cfg = GeneratorConfig(
        target_size=args.size,
        num_clean=args.num_clean,
        distribution=args.dist,
        zipf_s=args.zipf_s,
        poisson_lam=args.poisson_lam,
        pct_erroneous=args.err_dup,
        extent_pct=args.extent,
        pct_token_swap=args.token_swap,
        pct_abbreviation=args.abbr,
        abbreviations=_read_abbr_tsv(args.abbr_dict) if args.abbr_dict else None,
        swap_adjacent=not args.arbitrary_swap,
        seed=seed,
    )
    dataset = generate(clean, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_records_tsv(out / "dataset.tsv", dataset.records)
    write_provenance_jsonl(out / "provenance.jsonl", dataset.provenance)
    (out / "gen_config.json").write_text(
        json.dumps({**cfg.__dict__, "abbreviations": cfg.abbreviations}, indent=2),
        encoding="utf-8",
    )
    print(f"wrote {len(dataset.records)} records to {out / 'dataset.tsv'}")
    return 0


def cmd_index(args) -> int:
    seed = _resolve_seed(args)
    records = read_records_tsv(args.infile)
    predicates = _predicate_list(args.predicates) if args.predicates else None
    index = build_index(
        records,
        TokenizerConfig(q=args.q, padded=args.padded, case_fold=args.case_fold),
        predicates=predicates,
        prune_rate=args.prune_rate,
        k1=args.k1, b=args.b, a0=args.a0,
        ges_q=args.ges_q, minhash_h=args.minhash_h, minhash_seed=seed,
    )
    save_index(index, args.out)
    st = index.tables.stats
    print(
        f"indexed {index.n_records} records: {int(st.alive.sum())} tokens alive, "
        f"cs={st.cs}, prune_rate={args.prune_rate} -> {args.out}"
    )
    return 0


def _selector_from(args, index) -> Selector:
    return Selector(
        index,
        params=_params_from(args),
        ges=GESParams(c_ins=args.c_ins, q=args.ges_q, theta=args.ges_theta),
        soft=SoftTFIDFParams(theta=args.soft_theta),
        edit_theta=args.edit_theta,
        minhash_h=args.minhash_h,
        minhash_seed=getattr(args, "minhash_seed", 0),
    )


def cmd_query(args) -> int:
    index = load_index(args.index)
    selector = _selector_from(args, index)
    result = selector.select(
        args.predicate, args.query, top_k=args.top_k, min_score=args.min_score
    )
    for tid, score in result:
        print(f"{tid}\t{score:.12g}")
    return 0


def cmd_bench(args) -> int:
    seed = _resolve_seed(args)
    records = read_records_tsv(args.dataset)
    predicates = _predicate_list(args.predicates)
    index = load_index(args.index) if args.index else None
    report = run_benchmark(
        records,
        predicates,
        n_queries=args.n_queries,
        seed=seed,
        cfg=TokenizerConfig(q=args.q, padded=args.padded, case_fold=args.case_fold),
        prune_rate=args.prune_rate,
        params=_params_from(args),
        ges=GESParams(c_ins=args.c_ins, q=args.ges_q, theta=args.ges_theta),
        soft=SoftTFIDFParams(theta=args.soft_theta),
        edit_theta=args.edit_theta,
        minhash_h=args.minhash_h,
        jobs=args.jobs,
        index=index,
    )
    print(report.to_table())
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
        print(f"report written to {args.report}")
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    return 0


def cmd_emit_sql(args) -> int:
    params = SqlTemplateParams(
        q=args.q, k1=args.k1, k3=args.k3, b=args.b, a0=args.a0,
        theta=args.theta, h=args.minhash_h,
        base_table=args.table, tid_col=args.tid_col, string_col=args.string_col,
    )
    text = emit_sql(args.predicate, args.phase, params)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _add_tokenizer_flags(p):
    p.add_argument("--q", type=int, default=2, help="q-gram length (default 2)")
    p.add_argument("--padded", action=argparse.BooleanOptionalAction, default=True,
                   help="pad word boundaries with q-1 symbols")
    p.add_argument("--case-fold", action=argparse.BooleanOptionalAction, default=True)


def _add_param_flags(p, with_scheme=True):
    p.add_argument("--k1", type=float, default=1.5)
    p.add_argument("--k3", type=float, default=8.0)
    p.add_argument("--b", type=float, default=0.675)
    p.add_argument("--a0", type=float, default=0.2)
    if with_scheme:
        p.add_argument("--scheme", choices=["rs", "idf"], default="rs",
                       help="token weights for WeightedMatch/WeightedJaccard")
    p.add_argument("--c-ins", type=float, default=0.5, help="GES insertion factor")
    p.add_argument("--ges-q", type=int, default=None, help="word q-gram size for GES")
    p.add_argument("--ges-theta", type=float, default=0.0, help="GES candidate threshold")
    p.add_argument("--soft-theta", type=float, default=0.8, help="SoftTFIDF word threshold")
    p.add_argument("--edit-theta", type=float, default=0.7, help="edit filter threshold")
    p.add_argument("--minhash-h", type=int, default=5, help="min-hash signature size")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apxsel",
        description="Approximate string selection: similarity predicates over a relation",
    )
    parser.add_argument("--config", help="TOML/JSON file with flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an error-injected dataset")
    g.add_argument("--clean", required=True, help="file of clean strings, one per line")
    g.add_argument("--size", type=int, required=True, help="total records to generate")
    g.add_argument("--num-clean", type=int, required=True, help="clusters to draw")
    g.add_argument("--dist", choices=["uniform", "zipf", "poisson"], default="uniform")
    g.add_argument("--zipf-s", type=float, default=1.0)
    g.add_argument("--poisson-lam", type=float, default=None)
    g.add_argument("--err-dup", type=float, default=50.0, help="%% of duplicates with errors")
    g.add_argument("--extent", type=float, default=30.0, help="%% of characters edited")
    g.add_argument("--token-swap", type=float, default=20.0, help="%% of word pairs swapped")
    g.add_argument("--abbr", type=float, default=50.0, help="%% receiving abbreviation errors")
    g.add_argument("--abbr-dict", help="TSV abbreviation dictionary (two columns)")
    g.add_argument("--arbitrary-swap", action="store_true",
                   help="swap arbitrary word pairs instead of adjacent ones")
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_gen)

    ix = sub.add_parser("index", help="build and persist a selection index")
    ix.add_argument("--in", dest="infile", required=True, help="dataset TSV")
    ix.add_argument("--out", required=True, help="index directory")
    _add_tokenizer_flags(ix)
    ix.add_argument("--predicates", default=None,
                    help=f"comma list of {','.join(PREDICATE_NAMES)} (default all)")
    ix.add_argument("--prune-rate", type=float, default=0.0)
    ix.add_argument("--k1", type=float, default=1.5)
    ix.add_argument("--b", type=float, default=0.675)
    ix.add_argument("--a0", type=float, default=0.2)
    ix.add_argument("--ges-q", type=int, default=None)
    ix.add_argument("--minhash-h", type=int, default=5)
    ix.add_argument("--seed", type=int, default=None, help="min-hash seed")
    ix.set_defaults(func=cmd_index)

    q = sub.add_parser("query", help="rank tuples for a query string")
    q.add_argument("--index", required=True)
    q.add_argument("--predicate", required=True, choices=PREDICATE_NAMES)
    q.add_argument("--query", required=True)
    q.add_argument("--top-k", type=int, default=None)
    q.add_argument("--min-score", type=float, default=None)
    q.add_argument("--minhash-seed", type=int, default=0)
    _add_param_flags(q)
    q.set_defaults(func=cmd_query)

    bn = sub.add_parser("bench", help="MAP / max-F1 benchmark over a dataset")
    bn.add_argument("--dataset", required=True, help="TSV with cluster ids")
    bn.add_argument("--index", default=None, help="prebuilt index directory (optional)")
    bn.add_argument("--predicates", required=True)
    bn.add_argument("--n-queries", type=int, default=500)
    bn.add_argument("--seed", type=int, default=None)
    bn.add_argument("--report", default=None, help="write JSON report here")
    bn.add_argument("--csv", default=None, help="write CSV summary here")
    bn.add_argument("--jobs", type=int, default=1)
    bn.add_argument("--prune-rate", type=float, default=0.0)
    _add_tokenizer_flags(bn)
    _add_param_flags(bn)
    bn.set_defaults(func=cmd_bench)

    es = sub.add_parser("emit-sql", help="print a predicate's SQL realization")
    es.add_argument("--predicate", required=True)
    es.add_argument("--phase", required=True, choices=["preprocess", "query"])
    es.add_argument("--q", type=int, default=2)
    es.add_argument("--k1", type=float, default=1.5)
    es.add_argument("--k3", type=float, default=8.0)
    es.add_argument("--b", type=float, default=0.675)
    es.add_argument("--a0", type=float, default=0.2)
    es.add_argument("--theta", type=float, default=0.8)
    es.add_argument("--minhash-h", type=int, default=5)
    es.add_argument("--table", default="BASE_TABLE")
    es.add_argument("--tid-col", default="tid")
    es.add_argument("--string-col", default="string")
    es.add_argument("--out", default=None)
    es.set_defaults(func=cmd_emit_sql)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # --config supplies defaults; explicit flags win because set_defaults
    # only fills values the command line leaves unset
    if "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        try:
            parser.set_defaults(**_load_config(cfg_path))
        except (OSError, ValueError) as e:
            print(f"error: cannot read config {cfg_path}: {e}", file=sys.stderr)
            return 1
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, DuplicateTidError, IndexFormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
