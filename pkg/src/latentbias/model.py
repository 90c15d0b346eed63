"""Domain types for the stop-and-search generative model.

An individual carries a latent criminality ``C ~ N(0, 1)`` and belongs to
group ``k`` with latent bias ``beta_k``. They are stopped when
``C + beta_k + N(0, alpha) > 0`` and, once stopped, the recorded outcome is
positive when ``C + N(0, gamma) > 0``. The joint belief over
``(beta_0..beta_{K-1}, C)`` is a multivariate Gaussian whose update rules
depend on the prior regime:

* ``INDEPENDENT`` - bias and criminality never correlate; no cross terms
  are ever written.
* ``DEPENDENT``  - cross-precision between each bias and criminality
  accumulates with the data, tying the coordinates together.
* ``FREE``       - same joint structure as DEPENDENT but run without the
  drift correction; see :mod:`latentbias.inference` for why this regime is
  numerically unstable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .gaussians import MultivariateGaussian, std_normal_cdf

__all__ = [
    "PriorKind",
    "EthnicGroup",
    "StopRecord",
    "ModelConfig",
    "PosteriorState",
    "build_prior",
    "stop_probability",
    "guilt_probability",
]


class PriorKind(enum.Enum):
    INDEPENDENT = "independent"
    DEPENDENT = "dependent"
    FREE = "free"

    @classmethod
    def from_string(cls, name: str) -> "PriorKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            options = ", ".join(k.value for k in cls)
            raise DomainError(f"unknown prior kind {name!r} (choose from {options})") from None


@dataclass(frozen=True)
class EthnicGroup:
    """A group label with its dense integer id."""

    id: int
    label: str


def validate_groups(groups: Sequence[EthnicGroup]) -> None:
    """Ids must be dense 0..K-1 and labels unique."""
    ids = sorted(g.id for g in groups)
    if ids != list(range(len(groups))):
        raise DomainError(f"group ids must be dense 0..K-1, got {ids}")
    labels = [g.label for g in groups]
    if len(set(labels)) != len(labels):
        raise DomainError(f"group labels must be unique, got {labels}")


@dataclass(frozen=True)
class StopRecord:
    """One stop-and-search event.

    ``outcome`` is only defined for stopped individuals; the model can
    never observe the criminality of someone who was not stopped.
    """

    group: int
    stopped: bool = True
    outcome: Optional[bool] = None
    force: str = ""
    raw_outcome: str = ""

    def __post_init__(self):
        if self.group < 0:
            raise DomainError(f"group id must be >= 0, got {self.group}")
        if not self.stopped and self.outcome is not None:
            raise DomainError("outcome must be absent when stopped is False")


@dataclass(frozen=True)
class ModelConfig:
    """Gibbs run configuration.

    ``seed`` must be given explicitly: all randomness in a run derives from
    it. ``anchoring=None`` resolves to the prior regime's default - on for
    INDEPENDENT and DEPENDENT (the drift correction keeps the recorded
    criminality marginal at N(0,1)), off for FREE (which exists to exhibit
    the uncorrected behaviour).
    """

    seed: int
    alpha: float = 1.0
    gamma: float = 1.0
    prior: PriorKind = PriorKind.DEPENDENT
    sweeps: int = 500
    burn_in: int = 100
    anchoring: Optional[bool] = None
    per_record_draws: bool = True
    divergence_mean_limit: float = 1e6
    divergence_variance_limit: float = 1e12

    def __post_init__(self):
        if self.alpha <= 0 or self.gamma <= 0:
            raise DomainError(f"alpha and gamma must be positive, got {self.alpha}, {self.gamma}")
        if self.sweeps < 1:
            raise DomainError(f"sweeps must be >= 1, got {self.sweeps}")
        if self.burn_in < 0 or self.sweeps <= self.burn_in:
            raise DomainError(
                f"need sweeps > burn_in >= 0, got sweeps={self.sweeps} burn_in={self.burn_in}"
            )
        if self.divergence_mean_limit <= 0 or self.divergence_variance_limit <= 0:
            raise DomainError("divergence limits must be positive")

    @property
    def anchoring_enabled(self) -> bool:
        if self.anchoring is not None:
            return self.anchoring
        return self.prior is not PriorKind.FREE


@dataclass(frozen=True)
class PosteriorState:
    """Joint Gaussian belief over (beta_0..beta_{K-1}, C)."""

    joint: MultivariateGaussian
    prior_kind: PriorKind
    group_count: int

    def __post_init__(self):
        if self.group_count < 1:
            raise DomainError("group_count must be >= 1")
        if self.joint.dim != self.group_count + 1:
            raise DomainError(
                f"joint dimension {self.joint.dim} != group_count + 1 = {self.group_count + 1}"
            )

    @property
    def bias_means(self) -> np.ndarray:
        return self.joint.mean[: self.group_count]

    @property
    def bias_variances(self) -> np.ndarray:
        return np.diag(self.joint.covariance)[: self.group_count]

    @property
    def criminality_mean(self) -> float:
        return float(self.joint.mean[self.group_count])

    @property
    def criminality_variance(self) -> float:
        return float(self.joint.covariance[self.group_count, self.group_count])


def build_prior(
    kind: PriorKind,
    group_count: int,
    group_means: Sequence[float] | None = None,
    group_variances: Sequence[float] | None = None,
) -> PosteriorState:
    """Initial joint belief: bias coordinates N(mu_k, sigma_k), criminality N(0,1).

    Every prior kind starts with zero cross-covariance; the regimes differ
    only in how inference is allowed to update the joint afterwards.
    """
    if group_count < 1:
        raise DomainError("group_count must be >= 1")
    means = np.zeros(group_count) if group_means is None else np.asarray(group_means, dtype=float)
    variances = (
        np.ones(group_count) if group_variances is None else np.asarray(group_variances, dtype=float)
    )
    if means.shape != (group_count,) or variances.shape != (group_count,):
        raise DomainError(
            f"group_means and group_variances must have length {group_count}"
        )
    if np.any(variances <= 0):
        raise DomainError(f"group variances must be positive, got {list(variances)}")
    joint = MultivariateGaussian(
        mean=np.concatenate([means, [0.0]]),
        covariance=np.diag(np.concatenate([variances, [1.0]])),
    )
    return PosteriorState(joint=joint, prior_kind=kind, group_count=group_count)


def stop_probability(c: float, beta: float, alpha: float) -> float:
    """P(stopped) = Phi((c + beta) / sqrt(alpha))."""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    return std_normal_cdf((c + beta) / math.sqrt(alpha))


def guilt_probability(c: float, gamma: float) -> float:
    """P(positive outcome once stopped) = Phi(c / sqrt(gamma))."""
    if gamma <= 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    return std_normal_cdf(c / math.sqrt(gamma))
