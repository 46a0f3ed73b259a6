"""rtool: evaluate language-model surprisal as a predictor of human
reading times, from corpus filtering through mixed-effects fits to
perplexity trend tests and residual subset analysis."""

from .annotate import (
    AnnotationConfig,
    DependencyArc,
    DltPolicy,
    WordProperties,
    annotate_corpus,
    annotate_sentence,
    dlt_costs,
    leftcorner_features,
    mark_named_entities,
)
from .corpus import (
    FilterSpec,
    Observation,
    ReadingCorpus,
    WordToken,
    filter_corpus,
    ingest,
    partition,
    split_by_partition,
)
from .lme import (
    FittedModel,
    MixedEffectsRegressor,
    ModelSpec,
    RandomTerm,
    delta_ll,
    fit_model,
    predict,
    residual_stats,
)
from .scaling import PredictorMatrix, PredictorScaler, standardize
from .subsets import (
    SubsetDef,
    SubsetReport,
    VariantResiduals,
    build_candidates,
    iterative_search,
    under_over_decompose,
)
from .surprisal import (
    SurprisalTable,
    TokenScore,
    VariantMeta,
    Window,
    align_and_aggregate,
    corpus_perplexity,
    nats_to_bits,
    plan_windows,
)
from .trend import SlopeFit, binomial_tail, fit_trend, slope_test

__version__ = "0.1.0"
