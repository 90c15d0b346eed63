"""Analytic record likelihood, its numerical-integration oracle, and
held-out predictive scoring.

For a single record with criminality ``c`` and group bias ``beta`` (unit
noise on both equations) the probability of observing a stop together with
outcome ``x`` factorises into two normal CDFs:

    x = 1:  Phi(c)  * Phi(c + beta)
    x = 0:  Phi(-c) * Phi(c + beta)

The two branches sum to the total stop probability ``Phi(c + beta)``, not
to one. :func:`likelihood_oracle` checks the same quantity by brute-force
2-D integration of the latent densities with the stop gate, sharing no
code with the closed form.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from .errors import DomainError, NumericalError
from .inference import PosteriorSummary
from .model import StopRecord, guilt_probability

__all__ = [
    "stop_search_likelihood",
    "likelihood_oracle",
    "predictive_score",
    "outcome_probability_given_stop",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def stop_search_likelihood(c: float, beta: float, x: int) -> float:
    """Closed-form probability of (stop, outcome ``x``) for unit noise."""
    if x not in (0, 1):
        raise DomainError(f"x must be 0 or 1, got {x!r}")
    stop = ndtr(c + beta)
    return float(ndtr(c) * stop) if x == 1 else float(ndtr(-c) * stop)


def likelihood_oracle(c: float, beta: float, x: int, abs_tol: float = 1e-6) -> float:
    """Brute-force oracle for :func:`stop_search_likelihood`.

    Integrates ``N(s; c + beta, 1) N(t; c, 1)`` over the region selected
    by the stop gate (``s > 0``) and the outcome's half-line for ``t``,
    using adaptive 2-D quadrature on the raw densities. Normalisation
    constant is taken as one, matching the closed form's convention.

    Raises:
        NumericalError: if the quadrature error estimate exceeds ``abs_tol``.
    """
    if x not in (0, 1):
        raise DomainError(f"x must be 0 or 1, got {x!r}")

    def integrand(t: float, s: float) -> float:
        ds = s - c - beta
        dt = t - c
        return math.exp(-0.5 * (ds * ds + dt * dt)) / (2.0 * math.pi)

    t_lo, t_hi = (0.0, np.inf) if x == 1 else (-np.inf, 0.0)
    value, err = integrate.dblquad(integrand, 0.0, np.inf, t_lo, t_hi, epsabs=1e-10)
    if err > abs_tol:
        raise NumericalError(f"oracle quadrature error {err:.3g} exceeds {abs_tol:.3g}")
    return float(value)


# 64-point Gauss-Hermite rule for expectations over the criminality prior
_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite_e.hermegauss(64)
_GH_WEIGHTS = _GH_WEIGHTS / _SQRT_2PI


def outcome_probability_given_stop(
    bias_mean: float, criminality_mean: float, alpha: float, gamma: float
) -> float:
    """P(positive outcome | stopped) for one group.

    The population criminality is N(criminality_mean, 1); stopping selects
    individuals upward, so this conditional stays above one half whenever
    the criminality mean is non-negative.
    """
    if alpha <= 0 or gamma <= 0:
        raise DomainError("alpha and gamma must be positive")
    c = _GH_NODES + criminality_mean
    stop = ndtr((c + bias_mean) / math.sqrt(alpha))
    pos = ndtr(c / math.sqrt(gamma))
    denom = float(np.sum(_GH_WEIGHTS * stop))
    if denom <= 0:
        return 0.5
    return float(np.sum(_GH_WEIGHTS * stop * pos) / denom)


def predictive_score(
    posterior: PosteriorSummary,
    test: Sequence[StopRecord],
    alpha: float,
    gamma: float,
    method: str = "accuracy",
) -> float:
    """Score held-out records against the fitted posterior.

    ``method="accuracy"`` (the default) predicts a positive outcome for
    every record iff ``guilt_probability(criminality mean, gamma) >= 0.5``
    - the population-level rule; after anchoring the criminality mean is 0,
    the predicted probability is exactly 0.5, and the tie breaks to
    "positive" (documented). Returns the fraction of correct predictions.

    ``method="likelihood"`` returns the mean predictive probability
    assigned to the observed outcomes using each record's group-specific
    stop-conditional probability - a strictly finer-grained alternative.
    """
    if len(test) == 0:
        raise DomainError("test set must be nonempty")
    for rec in test:
        if not rec.stopped or rec.outcome is None:
            raise DomainError("test records must be stops with outcomes")
    if method == "accuracy":
        p = guilt_probability(posterior.criminality_mean, gamma)
        predicted = p >= 0.5
        hits = sum(1 for rec in test if rec.outcome == predicted)
        return hits / len(test)
    if method == "likelihood":
        k = len(posterior.labels)
        per_group = [
            outcome_probability_given_stop(
                float(posterior.bias_mean[g]), posterior.criminality_mean, alpha, gamma
            )
            for g in range(k)
        ]
        total = 0.0
        for rec in test:
            if rec.group >= k:
                raise DomainError(f"test record group {rec.group} unknown to the posterior")
            p = per_group[rec.group]
            total += p if rec.outcome else 1.0 - p
        return total / len(test)
    raise DomainError(f"unknown scoring method {method!r}")
