"""apxsel: approximate string selection over relations.

q-gram and word tokenization, overlap / aggregate-weighted / language-model
similarity predicates, edit-based and combination predicates with candidate
filtering, an error-injecting dataset generator, MAP/max-F1 evaluation, and
declarative SQL realizations of every predicate.
"""

from ._kernels import backend
from .corpus import (
    CorpusStats,
    CorpusTables,
    DuplicateTidError,
    LMModel,
    PruningPolicy,
    Record,
    TokenTable,
    TupleStats,
    WeightTable,
    build_corpus,
    compute_bm25_weights,
    compute_cosine_weights,
    compute_hmm_weights,
    compute_lm_model,
    prune_by_idf,
)
from .datagen import GeneratedDataset, GeneratorConfig, generate
from .evaluate import EvalReport, average_precision, max_f1, run_benchmark
from .index import ApproxIndex, MinHashIndex, build_index, minhash_signature, sim_mh
from .predicates import (
    GESParams,
    PredicateParams,
    Selector,
    SoftTFIDFParams,
    approximate_select,
)
from .ranking import RankedResult
from .sqlgen import SqlTemplateParams, emit_sql
from .storage import IndexFormatError, load_index, read_records_tsv, save_index, write_records_tsv
from .strdist import (
    edit_similarity,
    ges_apx_score,
    ges_exact,
    ges_jaccard_score,
    ges_score,
    jaro_winkler,
    levenshtein,
    qgram_count_filter,
    score_edit,
    soft_tfidf_score,
)
from .tokenize import TokenizerConfig, qgram_tokenize, word_qgrams, word_tokenize

__version__ = "0.1.0"
