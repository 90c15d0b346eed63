"""Bayesian latent-bias inference for stop-and-search records.

A numpy/scipy library with a thin CLI. The pieces:

* :mod:`latentbias.gaussians`  - truncated-normal sampling, natural/moment
  Gaussian conversions, marginals.
* :mod:`latentbias.model`      - domain types and the three prior regimes.
* :mod:`latentbias.inference`  - the Gibbs sampler, anchoring, traces.
* :mod:`latentbias.likelihood` - closed-form record likelihood, its
  quadrature oracle, held-out scoring.
* :mod:`latentbias.ranking`    - the skill-ranking baseline.
* :mod:`latentbias.data`       - CSV ingestion, dataset operations, the
  synthetic generator.
"""

from .data import (
    ColumnSpec,
    EthnicityMapping,
    IngestReport,
    OutcomeScheme,
    SchemeKind,
    SynthReport,
    TrueParams,
    balance,
    coarsen_outcome,
    default_mapping,
    filter_force,
    parse_records,
    read_dataset_csv,
    split,
    synthesize,
    write_dataset_csv,
)
from .errors import (
    ConditioningError,
    DataError,
    DivergenceError,
    DomainError,
    LatentBiasError,
    NumericalError,
)
from .gaussians import (
    Gaussian1D,
    MultivariateGaussian,
    NaturalGaussian,
    from_natural,
    mvn_marginal,
    mvn_sample,
    sample_truncated_normal,
    std_normal_cdf,
    std_normal_pdf,
    to_natural,
    truncated_moments,
)
from .inference import (
    GibbsTrace,
    LatentPair,
    NaturalAccumulator,
    PosteriorSummary,
    accumulate_stats,
    anchor,
    drift_slope,
    gibbs_sweep,
    posterior_from_stats,
    read_trace_csv,
    refresh_criminality,
    run_gibbs,
    sample_latents,
    write_trace_csv,
)
from .likelihood import (
    likelihood_oracle,
    outcome_probability_given_stop,
    predictive_score,
    stop_search_likelihood,
)
from .model import (
    EthnicGroup,
    ModelConfig,
    PosteriorState,
    PriorKind,
    StopRecord,
    build_prior,
    guilt_probability,
    stop_probability,
)
from .ranking import (
    COMMON_LABEL,
    Match,
    Player,
    SkillState,
    matches_from_dataset,
    rank,
    trueskill_gibbs,
    write_ranking_csv,
)

__version__ = "0.1.0"
