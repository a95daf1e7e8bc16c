"""Clinical trials retrieval: query generation, BM25/RM3 search, TREC-style evaluation."""

from .config import AppConfig, load_config, save_config
from .corpus import (
    ClinicalTrialDoc,
    PatientTopic,
    Qrels,
    RunEntry,
    load_corpus,
    load_qrels,
    load_topics,
    parse_trial_document,
    read_run,
    write_run,
)
from .evaluation import (
    MEASURES,
    JudgedRanking,
    MetricReport,
    bpref,
    evaluate_run,
    judge,
    ndcg_at_k,
    precision_at_k,
    recall_at_k,
    reciprocal_rank,
)
from .index import InvertedIndex, build_index, open_index, persist_index, term_stats
from .porter import porter_stem
from .querygen import (
    BatchStats,
    GenerationCache,
    LLMClient,
    LLMConfig,
    PromptTemplate,
    QueryBundle,
    batch_generate,
    default_template,
    generate_query,
    render_prompt,
)
from .retrieval import (
    BM25Params,
    Ranking,
    RM3Params,
    bm25_score,
    rm3_expand,
    run_topics,
    score_all,
    search,
)
from .significance import TTestResult, paired_ttest, paired_ttest_bonferroni
from .text import (
    ProcessedQuery,
    build_query,
    default_stoplist,
    load_stoplist,
    pipeline_hash,
    postprocess_generated_query,
    process_query,
    process_text,
    strip_list_markers,
    tokenize,
)

__version__ = "0.1.0"
