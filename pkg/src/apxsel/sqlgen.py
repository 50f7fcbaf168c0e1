"""Declarative SQL realizations of the similarity predicates.

Emits parameterized preprocessing and query statements in generic SQL-92
plus LOG/EXP/POWER/SQRT/SUBSTRING.  The text is deterministic for a given
(predicate, phase, params) triple so it can be golden-file tested.  Edit
similarity and exact GES have no pure declarative form; their emitters
return an explanatory marker comment instead.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class SqlTemplateParams:
    q: int = 2
    k1: float = 1.5
    k3: float = 8.0
    b: float = 0.675
    a0: float = 0.2
    theta: float = 0.8
    h: int = 5
    pad_char: str = "$"
    base_table: str = "BASE_TABLE"
    tid_col: str = "tid"
    string_col: str = "string"

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if not 0.0 < self.a0 < 1.0:
            raise ValueError("a0 must be in (0, 1)")


def _num(x) -> str:
    f = float(x)
    return str(int(f)) if f == int(f) else repr(f)


def _pad(p: SqlTemplateParams) -> str:
    return p.pad_char * (p.q - 1)


def _qgram_tokens_preprocess(p: SqlTemplateParams) -> str:
    pad = _pad(p)
    return f"""\
-- q-gram tokenization: q-1 pad symbols replace whitespace and wrap the string.
-- INTEGERS(i) holds 1..MAX_STR_SIZE + {p.q - 1} (MAX_STR_SIZE: longest string).
INSERT INTO BASE_TOKENS({p.tid_col}, token)
SELECT   {p.tid_col},
         SUBSTRING(CONCAT('{pad}', UPPER(REPLACE({p.string_col}, ' ', '{pad}')), '{pad}'),
                   INTEGERS.i, {p.q})
FROM     INTEGERS INNER JOIN {p.base_table}
         ON INTEGERS.i <= LENGTH(REPLACE({p.string_col}, ' ', '{pad}')) + {p.q - 1};
"""


def _word_tokens_preprocess(p: SqlTemplateParams) -> str:
    return f"""\
-- whitespace word tokenization via first/inner/last word extraction
INSERT INTO BASE_TOKENS({p.tid_col}, token)
SELECT   {p.tid_col}, SUBSTRING({p.string_col}, 1, LOCATE(' ', {p.string_col}) - 1)
FROM     {p.base_table}
WHERE    LOCATE(' ', {p.string_col}) > 0
UNION ALL
SELECT   {p.tid_col}, SUBSTRING({p.string_col}, N1.i + 1, N2.i - N1.i - 1)
FROM     {p.base_table}, INTEGERS N1, INTEGERS N2
WHERE    N1.i = LOCATE(' ', {p.string_col}, N1.i)
         AND N2.i = LOCATE(' ', {p.string_col}, N1.i + 1)
UNION ALL
SELECT   {p.tid_col},
         SUBSTRING({p.string_col}, LENGTH({p.string_col}) - LOCATE(' ', REVERSE({p.string_col})) + 2)
FROM     {p.base_table}
WHERE    LOCATE(' ', {p.string_col}) > 0
UNION ALL
SELECT   {p.tid_col}, {p.string_col}
FROM     {p.base_table}
WHERE    LOCATE(' ', {p.string_col}) = 0;
"""


def _word_qgrams_preprocess(p: SqlTemplateParams) -> str:
    pad = _pad(p)
    return f"""\
-- distinct q-grams of each word token (two-level tokenization)
INSERT INTO BASE_QGRAMS({p.tid_col}, token, qgram)
SELECT   {p.tid_col}, token,
         SUBSTRING(CONCAT('{pad}', UPPER(token), '{pad}'), INTEGERS.i, {p.q}) AS qgram
FROM     INTEGERS INNER JOIN BASE_TOKENS
         ON INTEGERS.i <= LENGTH(token) + {p.q - 1}
GROUP BY {p.tid_col}, token, qgram;
"""


_TOKENIZE_ONLY = """\
-- preprocessing is tokenization only (emit predicate 'tokenize' for the
-- shared BASE_TOKENS step); overlap predicates store distinct (tid, token)
-- pairs
"""


def _intersect_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO INTERSECT_RESULTS({p.tid_col}, score)
SELECT   R1.{p.tid_col}, COUNT(*)
FROM     BASE_TOKENS R1, QUERY_TOKENS R2
WHERE    R1.token = R2.token
GROUP BY R1.{p.tid_col};
"""


def _jaccard_preprocess(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO BASE_DDL({p.tid_col}, ddl)
SELECT   T.{p.tid_col}, COUNT(*)
FROM     BASE_TOKENS T
GROUP BY T.{p.tid_col};

INSERT INTO BASE_TOKENSDDL({p.tid_col}, token, ddl)
SELECT   T.{p.tid_col}, T.token, D.ddl
FROM     BASE_TOKENS T, BASE_DDL D
WHERE    T.{p.tid_col} = D.{p.tid_col};
"""


def _jaccard_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO JACCARD_RESULTS({p.tid_col}, score)
SELECT   S1.{p.tid_col}, COUNT(*) / (S1.ddl + S2.ddl - COUNT(*))
FROM     BASE_TOKENSDDL S1, QUERY_TOKENS R2,
         (SELECT COUNT(*) AS ddl FROM QUERY_TOKENS T) S2
WHERE    S1.token = R2.token
GROUP BY S1.{p.tid_col}, S1.ddl, S2.ddl;
"""


def _rs_weight_preprocess(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO BASE_SIZE(size)
SELECT   COUNT(*)
FROM     {p.base_table};

INSERT INTO BASE_TF({p.tid_col}, token, tf)
SELECT   T.{p.tid_col}, T.token, COUNT(*)
FROM     BASE_TOKENS T
GROUP BY T.{p.tid_col}, T.token;

-- Robertson-Sparck Jones weight per token
INSERT INTO BASE_BMIDF(token, midf)
SELECT   T.token, LOG(S.size - COUNT(T.{p.tid_col}) + 0.5) - LOG(COUNT(T.{p.tid_col}) + 0.5)
FROM     BASE_TF T, BASE_SIZE S
GROUP BY T.token;
"""


def _weighted_match_preprocess(p: SqlTemplateParams) -> str:
    return (
        _rs_weight_preprocess(p)
        + f"""
INSERT INTO BASE_WEIGHTS({p.tid_col}, token, weight)
SELECT   T.{p.tid_col}, T.token, I.midf
FROM     BASE_BMIDF I, BASE_TF T
WHERE    I.token = T.token;
"""
    )


def _weighted_match_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO WEIGHTEDMATCH_RESULTS({p.tid_col}, score)
SELECT   W1.{p.tid_col}, SUM(W1.weight)
FROM     BASE_WEIGHTS W1, QUERY_TOKENS T2
WHERE    W1.token = T2.token
GROUP BY W1.{p.tid_col};
"""


def _weighted_jaccard_preprocess(p: SqlTemplateParams) -> str:
    return (
        _weighted_match_preprocess(p)
        + f"""
INSERT INTO BASE_DDL({p.tid_col}, ddl)
SELECT   W.{p.tid_col}, SUM(W.weight)
FROM     BASE_WEIGHTS W
GROUP BY W.{p.tid_col};

INSERT INTO BASE_TOKENSDDL({p.tid_col}, token, ddl, weight)
SELECT   W.{p.tid_col}, W.token, D.ddl, W.weight
FROM     BASE_WEIGHTS W, BASE_DDL D
WHERE    W.{p.tid_col} = D.{p.tid_col};
"""
    )


def _weighted_jaccard_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO WJ_RESULTS({p.tid_col}, score)
SELECT   S1.{p.tid_col}, SUM(S1.weight) / (S1.ddl + S2.ddl - SUM(S1.weight))
FROM     BASE_TOKENSDDL S1, QUERY_TOKENS R2,
         (SELECT SUM(T.weight) AS ddl
          FROM (SELECT T.token, I.midf AS weight
                FROM BASE_BMIDF I, QUERY_TOKENS T
                WHERE I.token = T.token) T) S2
WHERE    S1.token = R2.token
GROUP BY S1.{p.tid_col}, S1.ddl, S2.ddl;
"""


def _cosine_preprocess(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO BASE_SIZE(size)
SELECT   COUNT(*)
FROM     {p.base_table};

INSERT INTO BASE_IDF(token, idf)
SELECT   T.token, LOG(S.size) - LOG(COUNT(DISTINCT T.{p.tid_col}))
FROM     BASE_TOKENS T, BASE_SIZE S
GROUP BY T.token;

INSERT INTO BASE_TF({p.tid_col}, token, tf)
SELECT   T.{p.tid_col}, T.token, COUNT(*)
FROM     BASE_TOKENS T
GROUP BY T.{p.tid_col}, T.token;

INSERT INTO BASE_LENGTH({p.tid_col}, len)
SELECT   T.{p.tid_col}, SQRT(SUM(I.idf * I.idf * T.tf * T.tf))
FROM     BASE_IDF I, BASE_TF T
WHERE    I.token = T.token
GROUP BY T.{p.tid_col};

INSERT INTO BASE_WEIGHTS({p.tid_col}, token, weight)
SELECT   T.{p.tid_col}, T.token, I.idf * T.tf / L.len
FROM     BASE_IDF I, BASE_TF T, BASE_LENGTH L
WHERE    I.token = T.token AND T.{p.tid_col} = L.{p.tid_col};
"""


_QUERY_WEIGHTS_SUBQUERY = """\
         (SELECT QIDF.token, QIDF.idf * QTF.tf / QLEN.len AS weight
          FROM (SELECT R.token, R.idf
                FROM QUERY_TOKENS S, BASE_IDF R
                WHERE S.token = R.token
                GROUP BY S.token, R.idf) QIDF,
               (SELECT T.token, COUNT(*) AS tf
                FROM QUERY_TOKENS T
                GROUP BY T.token) QTF,
               (SELECT SQRT(SUM(QIDF.idf * QIDF.idf * QTF.tf * QTF.tf)) AS len
                FROM (SELECT R.token, R.idf
                      FROM QUERY_TOKENS S, BASE_IDF R
                      WHERE S.token = R.token
                      GROUP BY S.token, R.idf) QIDF,
                     (SELECT T.token, COUNT(*) AS tf
                      FROM QUERY_TOKENS T
                      GROUP BY T.token) QTF
                WHERE QIDF.token = QTF.token) QLEN
          WHERE QIDF.token = QTF.token) R2W"""


def _cosine_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO COSINE_RESULTS({p.tid_col}, score)
SELECT   R1W.{p.tid_col}, SUM(R1W.weight * R2W.weight)
FROM     BASE_WEIGHTS R1W,
{_QUERY_WEIGHTS_SUBQUERY}
WHERE    R1W.token = R2W.token
GROUP BY R1W.{p.tid_col};
"""


def _bm25_preprocess(p: SqlTemplateParams) -> str:
    return (
        _rs_weight_preprocess(p)
        + f"""
INSERT INTO BASE_BMBASELENGTH({p.tid_col}, dl)
SELECT   T.{p.tid_col}, SUM(T.tf)
FROM     BASE_TF T
GROUP BY T.{p.tid_col};

INSERT INTO BASE_BMBASEAVGLENGTH(avgdl)
SELECT   AVG(dl)
FROM     BASE_BMBASELENGTH;

INSERT INTO BASE_BMBASEMODTF({p.tid_col}, token, mtf)
SELECT   T.{p.tid_col}, T.token,
         (T.tf * ({_num(p.k1)} + 1)) /
         ((((1 - {_num(p.b)}) + ({_num(p.b)} * L.dl / A.avgdl)) * {_num(p.k1)}) + T.tf)
FROM     BASE_BMBASELENGTH L, BASE_BMBASEAVGLENGTH A, BASE_TF T
WHERE    L.{p.tid_col} = T.{p.tid_col};

INSERT INTO BASE_BMBASEWEIGHTS({p.tid_col}, token, weight)
SELECT   T.{p.tid_col}, T.token, T.mtf * I.midf
FROM     BASE_BMBASEMODTF T, BASE_BMIDF I
WHERE    T.token = I.token;
"""
    )


def _bm25_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO BM25_RESULTS({p.tid_col}, score)
SELECT   B.{p.tid_col}, SUM(B.weight * S.mtf)
FROM     BASE_BMBASEWEIGHTS B,
         (SELECT token, COUNT(*) * {_num(p.k3 + 1)} / ({_num(p.k3)} + COUNT(*)) AS mtf
          FROM QUERY_TOKENS T
          GROUP BY T.token) S
WHERE    B.token = S.token
GROUP BY B.{p.tid_col};
"""


def _lm_preprocess(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO BASE_TF({p.tid_col}, token, tf)
SELECT   T.{p.tid_col}, T.token, COUNT(*)
FROM     BASE_TOKENS T
GROUP BY T.{p.tid_col}, T.token;

INSERT INTO BASE_DL({p.tid_col}, dl)
SELECT   T.{p.tid_col}, COUNT(*)
FROM     BASE_TOKENS T
GROUP BY T.{p.tid_col};

INSERT INTO BASE_PML({p.tid_col}, token, pml)
SELECT   T.{p.tid_col}, T.token, T.tf / D.dl
FROM     BASE_TF T, BASE_DL D
WHERE    T.{p.tid_col} = D.{p.tid_col};

INSERT INTO BASE_PAVG(token, pavg)
SELECT   P.token, AVG(P.pml)
FROM     BASE_PML P
GROUP BY P.token;

INSERT INTO BASE_FREQ({p.tid_col}, token, freq)
SELECT   T.{p.tid_col}, T.token, P.pavg * D.dl
FROM     BASE_TF T, BASE_PAVG P, BASE_DL D
WHERE    T.token = P.token AND T.{p.tid_col} = D.{p.tid_col};

INSERT INTO BASE_RISK({p.tid_col}, token, risk)
SELECT   T.{p.tid_col}, T.token,
         (1.0 / (1.0 + Q.freq)) * POWER(Q.freq / (1.0 + Q.freq), T.tf)
FROM     BASE_TF T, BASE_FREQ Q
WHERE    T.{p.tid_col} = Q.{p.tid_col} AND T.token = Q.token;

INSERT INTO BASE_TSIZE(size)
SELECT   COUNT(*)
FROM     BASE_TOKENS;

INSERT INTO BASE_CFCS(token, cfcs)
SELECT   T.token, COUNT(*) / S.size
FROM     BASE_TOKENS T, BASE_TSIZE S
GROUP BY T.token, S.size;

INSERT INTO BASE_PM({p.tid_col}, token, pm, cfcs)
SELECT   T.{p.tid_col}, T.token,
         POWER(M.pml, 1.0 - R.risk) * POWER(A.pavg, R.risk), C.cfcs
FROM     BASE_TF T, BASE_RISK R, BASE_PML M, BASE_PAVG A, BASE_CFCS C
WHERE    T.{p.tid_col} = R.{p.tid_col} AND T.token = R.token
         AND T.{p.tid_col} = M.{p.tid_col} AND T.token = M.token
         AND T.token = A.token AND T.token = C.token;

INSERT INTO BASE_SUMCOMPMBASE({p.tid_col}, sumcompm)
SELECT   P.{p.tid_col}, SUM(LOG(1.0 - P.pm))
FROM     BASE_PM P
GROUP BY P.{p.tid_col};
"""


def _lm_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO LM_RESULTS({p.tid_col}, score)
SELECT   B1.{p.tid_col}, EXP(B1.score + B2.sumcompm)
FROM     (SELECT P1.{p.tid_col},
                 SUM(LOG(P1.pm)) - SUM(LOG(1.0 - P1.pm)) - SUM(LOG(P1.cfcs)) AS score
          FROM BASE_PM P1, QUERY_TOKENS T2
          WHERE P1.token = T2.token
          GROUP BY P1.{p.tid_col}) B1,
         BASE_SUMCOMPMBASE B2
WHERE    B1.{p.tid_col} = B2.{p.tid_col};
"""


def _hmm_preprocess(p: SqlTemplateParams) -> str:
    a0 = _num(p.a0)
    a1 = _num(round(1.0 - p.a0, 12))
    return f"""\
INSERT INTO BASE_TF({p.tid_col}, token, tf)
SELECT   T.{p.tid_col}, T.token, COUNT(*)
FROM     BASE_TOKENS T
GROUP BY T.{p.tid_col}, T.token;

INSERT INTO BASE_DL({p.tid_col}, dl)
SELECT   T.{p.tid_col}, COUNT(*)
FROM     BASE_TOKENS T
GROUP BY T.{p.tid_col};

INSERT INTO BASE_PML({p.tid_col}, token, pml)
SELECT   T.{p.tid_col}, T.token, T.tf / D.dl
FROM     BASE_TF T, BASE_DL D
WHERE    T.{p.tid_col} = D.{p.tid_col};

INSERT INTO BASE_SUMDL(sdl)
SELECT   SUM(T.dl)
FROM     BASE_DL T;

INSERT INTO BASE_PTGE(token, ptge)
SELECT   T.token, SUM(T.tf) / D.sdl
FROM     BASE_TF T, BASE_SUMDL D
GROUP BY T.token, D.sdl;

INSERT INTO BASE_WEIGHTSHMM({p.tid_col}, token, weight)
SELECT   M.{p.tid_col}, M.token, LOG(1 + ({a1} * M.pml) / ({a0} * P.ptge))
FROM     BASE_PTGE P, BASE_PML M
WHERE    P.token = M.token;
"""


def _hmm_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO HMM_RESULTS({p.tid_col}, score)
SELECT   W1.{p.tid_col}, EXP(SUM(W1.weight))
FROM     BASE_WEIGHTSHMM W1, QUERY_TOKENS T2
WHERE    W1.token = T2.token
GROUP BY W1.{p.tid_col};
"""


def _ges_word_idf_preprocess(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO BASE_SIZE(size)
SELECT   COUNT(*)
FROM     {p.base_table};

INSERT INTO BASE_IDF(token, idf)
SELECT   T.token, LOG(S.size) - LOG(COUNT(DISTINCT T.{p.tid_col}))
FROM     BASE_TOKENS T, BASE_SIZE S
GROUP BY T.token;

INSERT INTO BASE_IDFAVG(idfavg)
SELECT   AVG(I.idf)
FROM     BASE_IDF I;
"""


_QUERY_IDF_SUBQUERY = """\
         (SELECT R.token, R.idf
          FROM QUERY_TOKENS S, BASE_IDF R
          WHERE S.token = R.token
          GROUP BY S.token, R.idf
          UNION
          SELECT S.token, A.idfavg AS idf
          FROM QUERY_TOKENS S, BASE_IDFAVG A
          WHERE S.token NOT IN (SELECT I.token FROM BASE_IDF I)
          GROUP BY S.token, A.idfavg) QIDF"""


def _ges_jaccard_preprocess(p: SqlTemplateParams) -> str:
    return (
        _ges_word_idf_preprocess(p)
        + f"""
INSERT INTO BASE_TOKENSIZE({p.tid_col}, token, size)
SELECT   T.{p.tid_col}, T.token, COUNT(*)
FROM     BASE_QGRAMS T
GROUP BY T.{p.tid_col}, T.token;

INSERT INTO BASE_QGRAMSTOKENSIZE({p.tid_col}, token, qgram, size)
SELECT   T.{p.tid_col}, T.token, T.qgram, S.size
FROM     BASE_QGRAMS T, BASE_TOKENSIZE S
WHERE    T.{p.tid_col} = S.{p.tid_col} AND T.token = S.token;
"""
    )


def _ges_jaccard_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO GESJACCARD_RESULTS({p.tid_col}, score)
SELECT   MAXSIM.{p.tid_col},
         (1.0 - 1.0 / {p.q}) +
         (1 / SUM(QIDF.idf)) * SUM(QIDF.idf * ((2.0 / {p.q}) * MAXSIM.maxsim)) AS score
FROM     (SELECT JAC_SIM.{p.tid_col}, JAC_SIM.token2, MAX(JAC_SIM.sim) AS maxsim
          FROM (SELECT BSIZE.{p.tid_col} AS {p.tid_col}, BSIZE.token AS token1,
                       Q.token AS token2,
                       COUNT(*) / (BSIZE.size + QSIZE.size - COUNT(*)) AS sim
                FROM BASE_QGRAMSTOKENSIZE BSIZE, QUERY_QGRAMS Q,
                     (SELECT T.token, COUNT(*) AS size
                      FROM QUERY_QGRAMS T
                      GROUP BY T.token) QSIZE
                WHERE BSIZE.qgram = Q.qgram AND Q.token = QSIZE.token
                GROUP BY BSIZE.{p.tid_col}, BSIZE.token, Q.token, BSIZE.size, QSIZE.size) JAC_SIM
          GROUP BY JAC_SIM.{p.tid_col}, JAC_SIM.token2) MAXSIM,
{_QUERY_IDF_SUBQUERY}
WHERE    MAXSIM.token2 = QIDF.token
GROUP BY MAXSIM.{p.tid_col}
HAVING   score >= {_num(p.theta)};
"""


def _ges_apx_preprocess(p: SqlTemplateParams) -> str:
    return (
        _ges_word_idf_preprocess(p)
        + f"""
-- {p.h} hash function parameters drawn from a seeded generator
INSERT INTO BASE_HASHFUNC(fid, func)
SELECT   N.i - 1, SEEDED_RANDOM_UINT64(N.i)
FROM     INTEGERS N
WHERE    N.i <= {p.h};

-- HASH64(func, qgram): 64-bit multiply-shift of a stable qgram hash.
-- (The MySQL realization used MOD(CONV(HEX(qgram), 16, 10) * MAXINT, func);
-- that construction is DBMS-specific, only min-agreement semantics matter.)
INSERT INTO BASE_HASHVALUE(fid, qgram, value)
SELECT   F.fid, Q.qgram, HASH64(F.func, Q.qgram)
FROM     BASE_HASHFUNC F, (SELECT DISTINCT qgram FROM BASE_QGRAMS) Q;

INSERT INTO BASE_MINHASHSIGNATURE({p.tid_col}, token, fid, value)
SELECT   Q.{p.tid_col}, Q.token, H.fid, MIN(H.value)
FROM     BASE_QGRAMS Q, BASE_HASHVALUE H
WHERE    Q.qgram = H.qgram
GROUP BY Q.{p.tid_col}, Q.token, H.fid;
"""
    )


def _ges_apx_query(p: SqlTemplateParams) -> str:
    return f"""\
INSERT INTO GESAPX_RESULTS({p.tid_col}, score)
SELECT   MAXSIM.{p.tid_col},
         (1.0 - 1.0 / {p.q}) +
         (1 / SUM(QIDF.idf)) * SUM(QIDF.idf * ((2.0 / {p.q}) * MAXSIM.maxsim)) AS score
FROM     (SELECT MH_SIM.{p.tid_col}, MH_SIM.token2, MAX(MH_SIM.sim) AS maxsim
          FROM (SELECT BMHSIG.{p.tid_col} AS {p.tid_col}, BMHSIG.token AS token1,
                       QMHSIG.token AS token2, COUNT(*) / {p.h} AS sim
                FROM BASE_MINHASHSIGNATURE BMHSIG,
                     (SELECT Q.token, H.fid, MIN(H.value) AS value
                      FROM QUERY_QGRAMS Q, BASE_HASHVALUE H
                      WHERE Q.qgram = H.qgram
                      GROUP BY Q.token, H.fid) QMHSIG
                WHERE BMHSIG.fid = QMHSIG.fid AND BMHSIG.value = QMHSIG.value
                GROUP BY BMHSIG.{p.tid_col}, BMHSIG.token, QMHSIG.token) MH_SIM
          GROUP BY MH_SIM.{p.tid_col}, MH_SIM.token2) MAXSIM,
{_QUERY_IDF_SUBQUERY}
WHERE    MAXSIM.token2 = QIDF.token
GROUP BY MAXSIM.{p.tid_col}
HAVING   score >= {_num(p.theta)};
"""


def _soft_tfidf_preprocess(p: SqlTemplateParams) -> str:
    return f"""\
-- word-level normalized tf-idf weights (BASE_TOKENS holds word tokens)
{_cosine_preprocess(p)}"""


def _soft_tfidf_query(p: SqlTemplateParams) -> str:
    return f"""\
-- JaroWinkler(a, b) is a UDF: word-level similarity in [0, 1]
INSERT INTO SOFTTFIDF_RESULTS({p.tid_col}, score)
SELECT   MAXTOKEN.{p.tid_col}, SUM(WB.weight * WQ.weight * MAXTOKEN.maxsim)
FROM     BASE_WEIGHTS WB,
         (SELECT JARO_SIM.{p.tid_col}, JARO_SIM.token1, JARO_SIM.token2, MAXSIM.maxsim
          FROM (SELECT JARO_SIM.{p.tid_col}, JARO_SIM.token2, MAX(JARO_SIM.sim) AS maxsim
                FROM (SELECT R1.{p.tid_col} AS {p.tid_col}, R1.token AS token1,
                             R2.token AS token2, JaroWinkler(R1.token, R2.token) AS sim
                      FROM BASE_TOKENS R1, QUERY_TOKENS R2
                      WHERE JaroWinkler(R1.token, R2.token) > {_num(p.theta)}) JARO_SIM
                GROUP BY JARO_SIM.{p.tid_col}, JARO_SIM.token2) MAXSIM,
               (SELECT R1.{p.tid_col} AS {p.tid_col}, R1.token AS token1,
                       R2.token AS token2, JaroWinkler(R1.token, R2.token) AS sim
                FROM BASE_TOKENS R1, QUERY_TOKENS R2
                WHERE JaroWinkler(R1.token, R2.token) > {_num(p.theta)}) JARO_SIM
          WHERE JARO_SIM.{p.tid_col} = MAXSIM.{p.tid_col}
                AND JARO_SIM.token2 = MAXSIM.token2
                AND MAXSIM.maxsim = JARO_SIM.sim) MAXTOKEN,
{_QUERY_WEIGHTS_SUBQUERY.replace("R2W", "WQ")}
WHERE    MAXTOKEN.token2 = WQ.token AND MAXTOKEN.{p.tid_col} = WB.{p.tid_col}
         AND MAXTOKEN.token1 = WB.token
GROUP BY MAXTOKEN.{p.tid_col};
"""


_EDIT_MARKER = """\
-- no declarative form: edit similarity is computed outside SQL.
-- Candidates come from the padded q-gram count filter over BASE_TOKENS
-- (tuples sharing at least max(|Q|,|D|) + q - 1 - ceil((1-theta)*max(|Q|,|D|))*q
-- q-grams with the query); the exact score
-- sim_edit(Q, D) = 1 - tc(Q, D) / max(|Q|, |D|) is then computed by a UDF.
"""

_GES_MARKER = """\
-- no declarative form: exact generalized edit similarity is computed by a
-- UDF over the word sequences (weighted replace/insert/delete alignment).
-- GES^Jaccard / GES^apx provide the declarative candidate filters.
"""


_TEMPLATES = {
    "tokenize": {"preprocess": _qgram_tokens_preprocess},
    "word_tokens": {"preprocess": _word_tokens_preprocess},
    "word_qgrams": {"preprocess": _word_qgrams_preprocess},
    "intersect": {"preprocess": lambda p: _TOKENIZE_ONLY, "query": _intersect_query},
    "jaccard": {"preprocess": _jaccard_preprocess, "query": _jaccard_query},
    "weighted_match": {"preprocess": _weighted_match_preprocess, "query": _weighted_match_query},
    "weighted_jaccard": {
        "preprocess": _weighted_jaccard_preprocess,
        "query": _weighted_jaccard_query,
    },
    "cosine": {"preprocess": _cosine_preprocess, "query": _cosine_query},
    "bm25": {"preprocess": _bm25_preprocess, "query": _bm25_query},
    "lm": {"preprocess": _lm_preprocess, "query": _lm_query},
    "hmm": {"preprocess": _hmm_preprocess, "query": _hmm_query},
    "edit": {"preprocess": lambda p: _EDIT_MARKER, "query": lambda p: _EDIT_MARKER},
    "ges": {"preprocess": lambda p: _GES_MARKER, "query": lambda p: _GES_MARKER},
    "ges_jaccard": {"preprocess": _ges_jaccard_preprocess, "query": _ges_jaccard_query},
    "ges_apx": {"preprocess": _ges_apx_preprocess, "query": _ges_apx_query},
    "soft_tfidf": {"preprocess": _soft_tfidf_preprocess, "query": _soft_tfidf_query},
}

SQL_PREDICATES = tuple(_TEMPLATES)
SQL_PHASES = ("preprocess", "query")


def emit_sql(predicate: str, phase: str, params: SqlTemplateParams | None = None) -> str:
    """Render the SQL realization of a predicate phase as text."""
    params = params or SqlTemplateParams()
    if predicate not in _TEMPLATES:
        raise ValueError(
            f"unknown predicate {predicate!r}; valid: {', '.join(SQL_PREDICATES)}"
        )
    if phase not in SQL_PHASES:
        raise ValueError(f"unknown phase {phase!r}; valid: {', '.join(SQL_PHASES)}")
    tpl = _TEMPLATES[predicate]
    if phase not in tpl:
        raise ValueError(f"{predicate!r} has no {phase!r} phase (has: {', '.join(tpl)})")
    return tpl[phase](params)
