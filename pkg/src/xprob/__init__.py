"""Model-agnostic explanations for text classifiers via probability-based editing."""

from .baseline import perturb_by_dropping
from .blackbox import (
    ClassifierHandle,
    ExternalClassifier,
    NaiveBayesClassifier,
    open_classifier,
    train_builtin,
)
from .config import RunConfig
from .corpus import (
    Corpus,
    SparseVector,
    TfidfModel,
    TokenSeq,
    cosine_distance,
    downsample_corpus,
    fit_tfidf,
    load_corpus,
    load_labeled,
    tokenize,
    vectorize,
)
from .editor import EditOperation, apply_edit, best_edit
from .errors import (
    ClassifierProtocolError,
    ConfigError,
    CorpusError,
    NoPrototypesError,
    PerturbationError,
    SurrogateFitError,
    TrainingDataError,
    XprobError,
)
from .evaluation import (
    MetricRecord,
    aopc,
    confidence_drop,
    fidelity,
    gen_stability_cases,
    r_squared,
    select_stability_words,
    stability_stats,
)
from .explanation import (
    ExplanationReport,
    InstanceExplanation,
    build_report,
    render,
    report_from_dict,
    report_to_dict,
    select_instances,
)
from .neighborhood import (
    Neighborhood,
    NeighborhoodMember,
    Prototype,
    PrototypeSet,
    build_neighborhood,
    select_prototypes,
)
from .ngram import PAD, NgramIndex, build_index, load_index, p_pre, p_suc, save_index
from .pipeline import ExplanationOutcome, Explainer
from .surrogate import (
    AttributionVector,
    SurrogateModel,
    compute_weights,
    fit_surrogate,
    split_attributions,
)

__version__ = "0.1.0"
