"""qinu: quality-in-use scoring for software reviews.

Pipeline: ingest reviews -> balanced star sampling -> sentence segmentation
-> human annotation (topics, keyword/opinion/modifier spans, polarity) ->
topic classification (NB / SVM / LSA / sentence similarity) -> lexicon
polarity -> per-characteristic and aggregate quality-in-use scores, with a
stratified cross-validation harness for the classifier comparison.
"""

from .classifiers import (
    LsaModel,
    NbModel,
    Prediction,
    SimSentModel,
    SvmHyper,
    SvmModel,
    load_model,
    predict,
    save_model,
    tokenize_dataset,
    train_lsa,
    train_nb,
    train_simsent,
    train_svm,
)
from .config import ProjectConfig, init_project, open_project
from .corpus import (
    Annotation,
    GoldRecord,
    LabeledDataset,
    Polarity,
    ProjectStore,
    Review,
    SegmentationConfig,
    Sentence,
    Topic,
    segment_review,
)
from .errors import DataError, StoreLockedError, ValidationError
from .evaluation import (
    ConfusionMatrix,
    EvalReport,
    FoldPlan,
    KeywordRanking,
    LengthBucketReport,
    Metrics,
    compute_metrics,
    confusion_matrix,
    cross_validate,
    length_bucket_report,
    stratified_folds,
    top_keywords,
)
from .pipeline import (
    PipelineConfig,
    TermVector,
    Vocabulary,
    build_vocabulary,
    tfidf_transform,
    token_count,
    tokenize,
    vectorize_counts,
)
from .scoring import (
    CharacteristicScore,
    PolarityLexicon,
    QinUReport,
    QinUWeights,
    SentencePolarity,
    build_lexicon,
    characteristic_scores,
    qinu_score,
    score_polarity,
)
from .similarity import (
    NgramTable,
    SentenceSimParams,
    Taxonomy,
    WordSimParams,
    build_ngram_table,
    sentence_similarity,
    word_relatedness_ngram,
    word_similarity_taxonomy,
)

__version__ = "0.1.0"
