"""Gibbs sampling over truncated-Gaussian latents with drift correction.

Every stopped record contributes two latent variables: a stopping
susceptibility ``S`` (sign fixed to the stop indicator) and a true
criminality ``T`` (sign fixed to the outcome). A sweep redraws the latents
record by record, refreshes each record's criminality, accumulates the
resulting Gaussian pseudo-observations in natural-parameter form, and
combines them with the prior.

Three structural rules distinguish the prior regimes:

* bias precision: each record adds ``1/alpha`` to its group's diagonal;
* criminality precision: each outcome adds ``1/gamma`` to the criminality
  diagonal (all regimes - this is what gives anchored bias variances their
  characteristic ``(1 + N) / (1 + n_k)`` scale);
* cross precision: DEPENDENT and FREE add ``1/alpha`` to the
  bias/criminality cross entries, INDEPENDENT never writes them.

The anchoring flag is the drift correction. With it on, recorded states
are re-centred so the criminality mean is exactly zero and rescaled so its
variance is exactly one, and the chain itself runs a stabilised update
(coordinate-wise conjugate combination, draws centred on the current bias
sample from its exact conditional). With it off the chain applies the
coupled natural-parameter combination literally; because the cross terms
make that solve amplify any mismatch between bias-side and outcome-side
evidence by roughly ``N / (K + 1)`` per sweep, unanchored runs under the
FREE regime diverge within a few sweeps on asymmetric data - the
documented instability this package preserves deliberately. The guard
raises :class:`~latentbias.errors.DivergenceError` carrying the sweep
index instead of overflowing.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

import numpy as np
from scipy.special import ndtr

from .errors import ConditioningError, DivergenceError, DomainError
from .gaussians import (
    MultivariateGaussian,
    mvn_marginal,
    mvn_sample,
    sample_truncated_normal,
    std_normal_pdf,
)
from .model import (
    EthnicGroup,
    ModelConfig,
    PosteriorState,
    PriorKind,
    StopRecord,
    build_prior,
)

__all__ = [
    "LatentPair",
    "NaturalAccumulator",
    "GibbsTrace",
    "PosteriorSummary",
    "sample_latents",
    "refresh_criminality",
    "accumulate_stats",
    "posterior_from_stats",
    "gibbs_sweep",
    "anchor",
    "run_gibbs",
    "drift_slope",
    "write_trace_csv",
    "read_trace_csv",
]

# bias-conditional sampler resolution (criminality histogram bins / density grid)
_BIAS_BINS = 128
_BIAS_GRID = 161
_BIAS_SPAN = 8.0


@dataclass(frozen=True)
class LatentPair:
    """Latent draws for one record: susceptibility ``s`` and, when the
    record is a stop, true criminality ``t``."""

    s: float
    t: Optional[float] = None


class NaturalAccumulator:
    """Mutable natural-parameter accumulator for pseudo-observations.

    Starts at zero (it is not a distribution on its own) and is added to a
    prior's natural parameters by :func:`posterior_from_stats`.
    """

    def __init__(self, dim: int):
        if dim < 2:
            raise DomainError("accumulator needs at least one bias and one criminality slot")
        self.precision = np.zeros((dim, dim))
        self.precision_mean = np.zeros(dim)

    @property
    def dim(self) -> int:
        return self.precision_mean.size


def sample_latents(
    record: StopRecord, c: float, b: float, config: ModelConfig, rng: np.random.Generator
) -> LatentPair:
    """Draw the record's latents given its criminality and bias values.

    ``s`` comes from N(c + b, alpha) truncated to the stop indicator's
    half-line; for stopped records ``t`` comes from N(c, gamma) truncated
    to the outcome's half-line. Ingested data only ever contains stops;
    the negative branch exists for synthetic records.
    """
    sign_s = 1.0 if record.stopped else -1.0
    s = sample_truncated_normal(c + b, config.alpha, sign_s, rng)
    t = None
    if record.stopped:
        if record.outcome is None:
            raise DomainError("stopped record has no outcome")
        sign_t = 1.0 if record.outcome else -1.0
        t = sample_truncated_normal(c, config.gamma, sign_t, rng)
    return LatentPair(s=s, t=t)


def refresh_criminality(
    record: StopRecord,
    latents: LatentPair,
    b: float,
    config: ModelConfig,
    rng: np.random.Generator,
) -> float:
    """Gibbs update of the record's criminality given its latents.

    The conditional combines the N(0,1) population prior with ``s - b``
    (precision ``1/alpha``) and, when present, ``t`` (precision
    ``1/gamma``). Returning a sample rather than the conditional mean
    keeps the chain a proper Gibbs sampler.
    """
    prec = 1.0 + 1.0 / config.alpha
    num = (latents.s - b) / config.alpha
    if latents.t is not None:
        prec += 1.0 / config.gamma
        num += latents.t / config.gamma
    return num / prec + math.sqrt(1.0 / prec) * rng.standard_normal()


def accumulate_stats(
    record: StopRecord,
    latents: LatentPair,
    current: tuple[float, float],
    config: ModelConfig,
    stats: NaturalAccumulator,
) -> None:
    """Add one record's Gaussian pseudo-observations to ``stats``.

    ``current`` is the record's ``(c, b)`` pair, with ``c`` the refreshed
    criminality the susceptibility evidence is conditioned on. The
    susceptibility equation contributes precision ``1/alpha`` and
    precision-mean ``(s - c)/alpha`` to the record's bias coordinate; the
    outcome equation contributes precision ``1/gamma`` and precision-mean
    ``t/gamma`` to the criminality coordinate. DEPENDENT and FREE priors
    additionally couple the two coordinates with ``1/alpha`` cross
    precision; INDEPENDENT leaves every off-diagonal entry untouched.
    """
    c, _b = current
    k = record.group
    ci = stats.dim - 1
    if k >= ci:
        raise DomainError(f"record group {k} out of range for {ci} groups")
    inv_a = 1.0 / config.alpha
    stats.precision[k, k] += inv_a
    stats.precision_mean[k] += (latents.s - c) * inv_a
    if latents.t is not None:
        inv_g = 1.0 / config.gamma
        stats.precision[ci, ci] += inv_g
        stats.precision_mean[ci] += latents.t * inv_g
    if record.stopped and config.prior is not PriorKind.INDEPENDENT:
        stats.precision[k, ci] += inv_a
        stats.precision[ci, k] += inv_a


def _combined_natural(
    prior: PosteriorState, stats: NaturalAccumulator
) -> tuple[np.ndarray, np.ndarray]:
    if stats.dim != prior.joint.dim:
        raise DomainError(
            f"accumulator dimension {stats.dim} != state dimension {prior.joint.dim}"
        )
    cov0 = prior.joint.covariance
    chol = np.linalg.cholesky(cov0)
    inv_chol = np.linalg.inv(chol)
    prec0 = inv_chol.T @ inv_chol
    lam = prec0 + stats.precision
    eta = prec0 @ prior.joint.mean + stats.precision_mean
    return lam, eta


def posterior_from_stats(prior: PosteriorState, stats: NaturalAccumulator) -> PosteriorState:
    """Conjugate combination of a prior state with accumulated evidence.

    The covariance is always the inverse of the summed precision, so the
    prior regime's cross structure shows up in the reported uncertainty.
    The mean solve differs: INDEPENDENT and DEPENDENT combine
    coordinate-wise (the stabilised decomposition; exact whenever the
    cross terms are zero), while FREE applies the fully coupled solve
    literally - the uncorrected update whose mismatch amplification is
    the source of the documented divergence.
    """
    lam, eta = _combined_natural(prior, stats)
    try:
        chol = np.linalg.cholesky(lam)
    except np.linalg.LinAlgError:
        raise ConditioningError("combined precision is not positive definite") from None
    inv_chol = np.linalg.inv(chol)
    cov = inv_chol.T @ inv_chol
    cov = 0.5 * (cov + cov.T)
    if prior.prior_kind is PriorKind.FREE:
        mean = cov @ eta
    else:
        mean = eta / np.diag(lam)
    return PosteriorState(
        joint=MultivariateGaussian(mean=mean, covariance=cov),
        prior_kind=prior.prior_kind,
        group_count=prior.group_count,
    )


def anchor(state: PosteriorState) -> PosteriorState:
    """Drift correction: re-centre on the criminality coordinate.

    Subtracts the criminality mean from every coordinate (anchored
    criminality mean is exactly 0) and divides the covariance elementwise
    by the criminality variance (anchored criminality variance is exactly
    1). Differences between bias means are unchanged, so rankings are
    anchoring-invariant.
    """
    ci = state.group_count
    scc = state.joint.covariance[ci, ci]
    if not (scc > 0):
        raise ConditioningError(f"criminality variance must be positive, got {scc}", pivot=ci)
    mean = state.joint.mean - state.joint.mean[ci]
    cov = state.joint.covariance / scc
    return PosteriorState(
        joint=MultivariateGaussian(mean=mean, covariance=cov),
        prior_kind=state.prior_kind,
        group_count=state.group_count,
    )


def gibbs_sweep(
    state: PosteriorState,
    dataset: Sequence[StopRecord],
    config: ModelConfig,
    rng: np.random.Generator,
    prior: PosteriorState | None = None,
) -> PosteriorState:
    """One reference sweep over the dataset.

    For each record a ``(bias, criminality)`` pair is drawn from the
    current state's marginal over that record's group coordinate and the
    criminality coordinate (or once per sweep from the full joint when
    ``config.per_record_draws`` is off), the latents are sampled, the
    record's criminality is refreshed, and the pseudo-observations are
    accumulated. The return value combines ``prior`` (default: ``state``,
    so an empty dataset returns the state unchanged) with the accumulated
    evidence.

    When iterating sweeps, pass the run's original prior explicitly:
    feeding each output back in as the next prior compounds the data's
    precision once per sweep. This is the record-at-a-time reference
    implementation; :func:`run_gibbs` runs the vectorised equivalent with
    persistent per-record criminalities.
    """
    base = state if prior is None else prior
    stats = NaturalAccumulator(state.joint.dim)
    ci = state.group_count
    shared = None
    if not config.per_record_draws:
        shared = mvn_sample(state.joint, rng)
    for record in dataset:
        if record.group >= ci:
            raise DomainError(f"record group {record.group} out of range")
        if shared is None:
            draw = mvn_sample(mvn_marginal(state.joint, (record.group, ci)), rng)
            b, c = float(draw[0]), float(draw[1])
        else:
            b, c = float(shared[record.group]), float(shared[ci])
        latents = sample_latents(record, c, b, config, rng)
        c_new = refresh_criminality(record, latents, b, config, rng)
        accumulate_stats(record, latents, (c_new, b), config, stats)
    return posterior_from_stats(base, stats)


@dataclass
class GibbsTrace:
    """Per-sweep record of the chain for convergence inspection.

    ``means`` and ``variances`` have one row per sweep and K+1 columns
    (bias coordinates then criminality); ``cross_cov`` holds the
    covariance between criminality and each bias coordinate. Wall times
    are kept for reporting but never written to the CSV export, which must
    be byte-deterministic.
    """

    means: np.ndarray
    variances: np.ndarray
    cross_cov: np.ndarray
    wall_times: np.ndarray
    group_count: int

    @property
    def sweeps(self) -> int:
        return self.means.shape[0]


def write_trace_csv(trace: GibbsTrace, stream: TextIO) -> None:
    """Trace CSV: ``sweep,beta_*_mean,C_mean,beta_*_var,C_var,cov_C_beta_*``."""
    k = trace.group_count
    header = (
        ["sweep"]
        + [f"beta_{i}_mean" for i in range(k)]
        + ["C_mean"]
        + [f"beta_{i}_var" for i in range(k)]
        + ["C_var"]
        + [f"cov_C_beta_{i}" for i in range(k)]
    )
    stream.write(",".join(header) + "\n")
    for i in range(trace.sweeps):
        row = [str(i)]
        row += [f"{v:.12g}" for v in trace.means[i]]
        row += [f"{v:.12g}" for v in trace.variances[i]]
        row += [f"{v:.12g}" for v in trace.cross_cov[i]]
        stream.write(",".join(row) + "\n")


def read_trace_csv(stream: TextIO) -> GibbsTrace:
    header = stream.readline().strip().split(",")
    if not header or header[0] != "sweep" or "C_mean" not in header:
        raise DomainError("not a trace CSV: bad header")
    k = header.index("C_mean") - 1
    expected = 1 + (k + 1) * 2 + k
    rows = []
    for line in stream:
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != expected:
            raise DomainError(f"trace row has {len(parts)} fields, expected {expected}")
        try:
            rows.append([float(x) for x in parts[1:]])
        except ValueError as exc:
            raise DomainError(f"trace row has a non-numeric field: {exc}") from None
    if not rows:
        raise DomainError("trace CSV has no rows")
    data = np.asarray(rows)
    return GibbsTrace(
        means=data[:, : k + 1],
        variances=data[:, k + 1 : 2 * k + 2],
        cross_cov=data[:, 2 * k + 2 :],
        wall_times=np.zeros(data.shape[0]),
        group_count=k,
    )


@dataclass
class PosteriorSummary:
    """Post-burn-in summary: per-group bias belief and rank, plus the
    criminality marginal and the run metadata needed to reuse it."""

    labels: list[str]
    bias_mean: np.ndarray
    bias_variance: np.ndarray
    rank: np.ndarray  # rank[i] = 1-based rank of group i (1 = largest mean)
    criminality_mean: float
    criminality_variance: float
    prior_kind: PriorKind
    sweeps: int

    def ranked_indices(self) -> np.ndarray:
        """Group indices ordered best rank first."""
        return np.argsort(self.rank)

    def to_csv(self, stream: TextIO) -> None:
        stream.write("rank,label,bias_mean,bias_variance\n")
        for idx in self.ranked_indices():
            stream.write(
                f"{int(self.rank[idx])},{self.labels[idx]},"
                f"{self.bias_mean[idx]:.12g},{self.bias_variance[idx]:.12g}\n"
            )

    def to_json(self) -> str:
        return json.dumps(
            {
                "labels": self.labels,
                "bias_mean": [float(v) for v in self.bias_mean],
                "bias_variance": [float(v) for v in self.bias_variance],
                "rank": [int(v) for v in self.rank],
                "criminality_mean": self.criminality_mean,
                "criminality_variance": self.criminality_variance,
                "prior_kind": self.prior_kind.value,
                "sweeps": self.sweeps,
            },
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "PosteriorSummary":
        try:
            d = json.loads(text)
            return cls(
                labels=list(d["labels"]),
                bias_mean=np.asarray(d["bias_mean"], dtype=float),
                bias_variance=np.asarray(d["bias_variance"], dtype=float),
                rank=np.asarray(d["rank"], dtype=int),
                criminality_mean=float(d["criminality_mean"]),
                criminality_variance=float(d["criminality_variance"]),
                prior_kind=PriorKind.from_string(d["prior_kind"]),
                sweeps=int(d["sweeps"]),
            )
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise DomainError(f"not a posterior summary: {exc}") from None


def _ranks_desc(values: np.ndarray) -> np.ndarray:
    # descending by value, ties broken by index
    order = np.lexsort((np.arange(values.size), -values))
    ranks = np.empty(values.size, dtype=int)
    ranks[order] = np.arange(1, values.size + 1)
    return ranks


class _GroupedData:
    """Dataset reorganised into per-group outcome-sign arrays."""

    def __init__(self, dataset: Sequence[StopRecord], group_count: int):
        if len(dataset) == 0:
            raise DomainError("dataset must be nonempty")
        taus: list[list[float]] = [[] for _ in range(group_count)]
        for rec in dataset:
            if not rec.stopped:
                raise DomainError("run_gibbs requires every record to be a stop")
            if rec.outcome is None:
                raise DomainError("stopped record has no outcome")
            if rec.group >= group_count:
                raise DomainError(f"record group {rec.group} out of range")
            taus[rec.group].append(1.0 if rec.outcome else -1.0)
        self.taus = [np.asarray(t) for t in taus]
        self.counts = np.array([t.size for t in self.taus])
        self.total = int(self.counts.sum())


def _sample_bias_conditional(
    cs: np.ndarray,
    m0: float,
    v0: float,
    sqrt_alpha: float,
    rng: np.random.Generator,
    prev_mode: float | None,
) -> tuple[float, float]:
    """Sample a bias coordinate from its exact conditional.

    With the susceptibility latents integrated out, the conditional given
    the record criminalities of an all-stopped group is

        p(beta) propto N(beta; m0, v0) * prod_i Phi((c_i + beta)/sqrt(alpha))

    which is log-concave. The criminalities are histogram-binned, the mode
    found by bisection on the monotone score, and the sample drawn by
    inverse CDF on a mode-centred grid. Collapsing the latents here is
    what lets the chain mix in a handful of sweeps instead of O(n).
    """
    lo, hi = float(cs.min()), float(cs.max())
    if hi - lo < 1e-9:
        centers = np.array([0.5 * (lo + hi)])
        weights = np.array([float(cs.size)])
    else:
        counts, edges = np.histogram(cs, bins=_BIAS_BINS)
        centers = 0.5 * (edges[:-1] + edges[1:])
        keep = counts > 0
        centers, weights = centers[keep], counts[keep].astype(float)

    def score(b: float) -> float:
        z = (centers + b) / sqrt_alpha
        lam = std_normal_pdf(z) / np.maximum(ndtr(z), 1e-300)
        return -(b - m0) / v0 + float(np.sum(weights * lam)) / sqrt_alpha

    if prev_mode is None:
        blo, bhi = m0 - 40.0, m0 + 40.0
    else:
        blo, bhi = prev_mode - 3.0, prev_mode + 3.0
    while score(blo) < 0:
        blo -= 3.0
    while score(bhi) > 0:
        bhi += 3.0
    for _ in range(40):
        mid = 0.5 * (blo + bhi)
        if score(mid) > 0:
            blo = mid
        else:
            bhi = mid
    mode = 0.5 * (blo + bhi)
    step = 1e-4
    curvature = max((score(mode - step) - score(mode + step)) / (2 * step), 1e-8)
    sd = 1.0 / math.sqrt(curvature)
    grid = mode + sd * np.linspace(-_BIAS_SPAN, _BIAS_SPAN, _BIAS_GRID)
    z = (centers[None, :] + grid[:, None]) / sqrt_alpha
    logf = -((grid - m0) ** 2) / (2.0 * v0) + (
        weights[None, :] * np.log(np.maximum(ndtr(z), 1e-300))
    ).sum(axis=1)
    logf -= logf.max()
    density = np.exp(logf)
    cdf = np.cumsum(density)
    cdf /= cdf[-1]
    return float(np.interp(rng.random(), cdf, grid)), mode


def _assemble_report_precision(
    prior: PosteriorState, grouped: _GroupedData, config: ModelConfig
) -> np.ndarray:
    k = prior.group_count
    cov0 = prior.joint.covariance
    chol = np.linalg.cholesky(cov0)
    inv_chol = np.linalg.inv(chol)
    lam = inv_chol.T @ inv_chol
    for g in range(k):
        lam[g, g] += grouped.counts[g] / config.alpha
        if config.prior is not PriorKind.INDEPENDENT:
            lam[g, k] += grouped.counts[g] / config.alpha
            lam[k, g] += grouped.counts[g] / config.alpha
    lam[k, k] += grouped.total / config.gamma
    return lam


def run_gibbs(
    dataset: Sequence[StopRecord],
    config: ModelConfig,
    groups: Sequence[EthnicGroup] | None = None,
    prior_state: PosteriorState | None = None,
) -> tuple[PosteriorSummary, GibbsTrace]:
    """Run the full chain and summarise the post-burn-in sweeps.

    The chain keeps one persistent criminality value per record (each
    individual owns a latent criminality) and, per sweep and group, draws
    per-record bias values, redraws the latents, refreshes the
    criminalities, and recombines the accumulated evidence with the
    original prior. With anchoring on (the default except under FREE) the
    update is the stabilised one and every recorded sweep satisfies
    ``C_mean == 0`` and ``C_var == 1`` exactly; with anchoring off the
    literal coupled combination is applied and recorded raw.

    Entirely deterministic given ``config.seed``: two runs with equal
    inputs produce bit-identical traces.

    Raises:
        DivergenceError: when any recorded mean magnitude exceeds
            ``config.divergence_mean_limit`` or any variance exceeds
            ``config.divergence_variance_limit``; the exception carries
            the sweep index and the partial trace.
    """
    if len(dataset) == 0:
        raise DomainError("dataset must be nonempty")
    if groups is not None:
        k = len(groups)
        labels = [g.label for g in sorted(groups, key=lambda g: g.id)]
    else:
        k = max(rec.group for rec in dataset) + 1
        labels = [f"group{i}" for i in range(k)]
    grouped = _GroupedData(dataset, k)
    if np.any(grouped.counts == 0):
        empty = [labels[i] for i in np.nonzero(grouped.counts == 0)[0]]
        raise DomainError(f"groups with no records: {empty}")
    prior = prior_state if prior_state is not None else build_prior(config.prior, k)
    if prior.group_count != k:
        raise DomainError("prior group count does not match dataset")
    off = prior.joint.covariance - np.diag(np.diag(prior.joint.covariance))
    if np.any(off != 0.0):
        raise DomainError("run_gibbs needs a diagonal prior covariance (build_prior produces one)")

    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    alpha, gamma = config.alpha, config.gamma
    sqrt_a, sqrt_g = math.sqrt(alpha), math.sqrt(gamma)
    stabilised = config.anchoring_enabled

    lam_rep = _assemble_report_precision(prior, grouped, config)
    cov_rep = np.linalg.inv(lam_rep)
    cov_rep = 0.5 * (cov_rep + cov_rep.T)
    prec0 = np.linalg.inv(prior.joint.covariance)
    eta0 = prec0 @ prior.joint.mean
    prec_diag = np.diag(lam_rep).copy()
    draw_sd = np.sqrt(1.0 / prec_diag[:k])
    cov2_chol = [
        np.linalg.cholesky(cov_rep[np.ix_([g, k], [g, k])]) for g in range(k)
    ]

    # persistent per-record criminalities, initialised from their prior
    crims = [rng.standard_normal(int(n)) for n in grouped.counts]
    bias_sample = prior.joint.mean[:k].astype(float).copy()
    modes: list[float | None] = [None] * k
    mean = prior.joint.mean.copy()

    v_stop = 1.0 / (1.0 + 1.0 / alpha + 1.0 / gamma)
    sd_stop = math.sqrt(v_stop)

    sweeps = config.sweeps
    trace_means = np.empty((sweeps, k + 1))
    trace_vars = np.empty((sweeps, k + 1))
    trace_cross = np.empty((sweeps, k))
    wall = np.empty(sweeps)

    rec_cov = cov_rep / cov_rep[k, k] if stabilised else cov_rep
    rec_var_row = np.diag(rec_cov).copy()
    rec_cross_row = rec_cov[k, :k].copy()
    cov_rep_chol = np.linalg.cholesky(cov_rep) if not config.per_record_draws else None

    for sweep in range(sweeps):
        t0 = time.perf_counter()
        eta = eta0.copy()
        shared = None
        if not config.per_record_draws:
            centre = mean.copy()
            if stabilised:
                centre[:k] = bias_sample
            shared = centre + cov_rep_chol @ rng.standard_normal(k + 1)
        for g in range(k):
            n = int(grouped.counts[g])
            c = crims[g]
            if shared is not None:
                b = np.full(n, shared[g])
            elif stabilised:
                b = bias_sample[g] + draw_sd[g] * rng.standard_normal(n)
            else:
                z2 = rng.standard_normal((n, 2))
                b = mean[g] + (z2 @ cov2_chol[g].T)[:, 0]
            s_lat = sample_truncated_normal(c + b, alpha, np.ones(n), rng)
            t_lat = sample_truncated_normal(c, gamma, grouped.taus[g], rng)
            c = v_stop * ((s_lat - b) / alpha + t_lat / gamma) + sd_stop * rng.standard_normal(n)
            crims[g] = c
            eta[g] += float(np.sum(s_lat - c)) / alpha
            eta[k] += float(np.sum(t_lat)) / gamma
            if stabilised:
                bias_sample[g], modes[g] = _sample_bias_conditional(
                    c, float(prior.joint.mean[g]), float(prior.joint.covariance[g, g]),
                    sqrt_a, rng, modes[g],
                )
        if stabilised:
            mean = eta / prec_diag
        else:
            mean = cov_rep @ eta
        if np.any(np.abs(mean) > config.divergence_mean_limit) or np.any(
            rec_var_row > config.divergence_variance_limit
        ):
            partial = GibbsTrace(
                means=trace_means[:sweep].copy(),
                variances=trace_vars[:sweep].copy(),
                cross_cov=trace_cross[:sweep].copy(),
                wall_times=wall[:sweep].copy(),
                group_count=k,
            )
            raise DivergenceError(
                f"chain diverged at sweep {sweep} "
                f"(max |mean| {np.abs(mean).max():.3g})",
                sweep=sweep,
                trace=partial,
            )
        trace_means[sweep] = mean - mean[k] if stabilised else mean
        if np.any(rec_var_row <= 0):
            raise ConditioningError(
                f"non-positive recorded variance at sweep {sweep}", pivot=int(np.argmin(rec_var_row))
            )
        trace_vars[sweep] = rec_var_row
        trace_cross[sweep] = rec_cross_row
        wall[sweep] = time.perf_counter() - t0

    trace = GibbsTrace(
        means=trace_means, variances=trace_vars, cross_cov=trace_cross,
        wall_times=wall, group_count=k,
    )
    post = slice(config.burn_in, None)
    mean_avg = trace_means[post].mean(axis=0)
    var_avg = trace_vars[post].mean(axis=0)
    summary = PosteriorSummary(
        labels=labels,
        bias_mean=mean_avg[:k],
        bias_variance=var_avg[:k],
        rank=_ranks_desc(mean_avg[:k]),
        criminality_mean=float(mean_avg[k]),
        criminality_variance=float(var_avg[k]),
        prior_kind=config.prior,
        sweeps=sweeps,
    )
    return summary, trace


def drift_slope(trace: GibbsTrace) -> float:
    """Least-squares slope of |criminality mean| against sweep index.

    The drift diagnostic: positive when the criminality coordinate is
    moving away from zero in trend, exactly zero for anchored traces.
    """
    y = np.abs(trace.means[:, trace.group_count])
    x = np.arange(y.size, dtype=float)
    if y.size < 2:
        return 0.0
    x = x - x.mean()
    return float(np.sum(x * (y - y.mean())) / np.sum(x * x))
