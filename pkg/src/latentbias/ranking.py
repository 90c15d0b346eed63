"""Skill-ranking baseline: each group plays a common "Criminality" player.

Every stop-and-search record becomes one decisive match. A positive
outcome means the common player beat the group's player; a negative
outcome means the group's player won. Skills get N(0,1) priors and unit
performance noise, and a Gibbs chain alternates between the winner-side
truncated performance margins and a joint Gaussian redraw of all skills.

Because every observation is purely comparative, the common level of all
skills is informed only by the prior and wanders from sweep to sweep. The
``anchor_common`` flag re-centres each recorded sample on the common
player, which pins that player's mean at zero and makes the per-player
variances reflect actual information content (low-count players then show
strictly larger variance).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .errors import DivergenceError, DomainError
from .gaussians import Gaussian1D, sample_truncated_normal
from .model import EthnicGroup, StopRecord

__all__ = [
    "COMMON_LABEL",
    "Player",
    "Match",
    "SkillState",
    "matches_from_dataset",
    "trueskill_gibbs",
    "rank",
    "write_ranking_csv",
]

COMMON_LABEL = "Criminality"


@dataclass(frozen=True)
class Player:
    id: int
    label: str


@dataclass(frozen=True)
class Match:
    winner: int
    loser: int

    def __post_init__(self):
        if self.winner == self.loser:
            raise DomainError("a match needs two distinct players")


@dataclass
class SkillState:
    """Per-player skill beliefs, ordered by player id."""

    players: list[Player]
    skills: list[Gaussian1D]

    def mean(self, player_id: int) -> float:
        return self.skills[player_id].mean

    def variance(self, player_id: int) -> float:
        return self.skills[player_id].variance


def matches_from_dataset(
    dataset: Sequence[StopRecord], groups: Sequence[EthnicGroup] | None = None
) -> tuple[list[Player], list[Match]]:
    """One match per record, order preserved.

    Player 0 is the common player; group ``k`` plays as id ``k + 1``.
    A positive outcome is a win for the common player, a negative outcome
    a win for the group's player.
    """
    if groups is not None:
        k = len(groups)
        labels = [g.label for g in sorted(groups, key=lambda g: g.id)]
    else:
        k = max((rec.group for rec in dataset), default=-1) + 1
        labels = [f"group{i}" for i in range(k)]
    players = [Player(0, COMMON_LABEL)] + [Player(i + 1, labels[i]) for i in range(k)]
    matches = []
    for rec in dataset:
        if not rec.stopped or rec.outcome is None:
            raise DomainError("ranking needs stopped records with outcomes")
        pid = rec.group + 1
        if rec.outcome:
            matches.append(Match(winner=0, loser=pid))
        else:
            matches.append(Match(winner=pid, loser=0))
    return players, matches


def trueskill_gibbs(
    matches: Sequence[Match],
    players: Sequence[Player] | int,
    iterations: int = 500,
    seed: int = 0,
    burn_in: int | None = None,
    performance_variance: float = 1.0,
    anchor_common: bool = False,
    divergence_limit: float = 1e6,
) -> SkillState:
    """Batch Gibbs over match margins and player skills.

    Per iteration: margins ``d_m ~ N(w_win - w_lose, v)`` truncated
    positive, then the whole skill vector jointly from its Gaussian
    conditional. Returns the empirical post-burn-in mean and variance per
    player. Deterministic given ``seed``.
    """
    if len(matches) == 0:
        raise DomainError("matches must be nonempty")
    if iterations < 1:
        raise DomainError("iterations must be >= 1")
    if performance_variance <= 0:
        raise DomainError("performance variance must be positive")
    burn = iterations // 5 if burn_in is None else burn_in
    if burn < 0 or burn >= iterations:
        raise DomainError(f"need iterations > burn_in >= 0, got {iterations}, {burn}")
    if isinstance(players, int):
        roster = [Player(i, f"player{i}") for i in range(players)]
    else:
        roster = sorted(players, key=lambda p: p.id)
        if [p.id for p in roster] != list(range(len(roster))):
            raise DomainError("player ids must be dense 0..P-1")
    player_count = len(roster)

    winners = np.array([m.winner for m in matches])
    losers = np.array([m.loser for m in matches])
    if winners.min() < 0 or max(winners.max(), losers.max()) >= player_count:
        raise DomainError("match player ids out of range")

    inv_v = 1.0 / performance_variance
    precision = np.eye(player_count)
    np.add.at(precision, (winners, winners), inv_v)
    np.add.at(precision, (losers, losers), inv_v)
    np.add.at(precision, (winners, losers), -inv_v)
    np.add.at(precision, (losers, winners), -inv_v)
    covariance = np.linalg.inv(precision)
    covariance = 0.5 * (covariance + covariance.T)
    chol = np.linalg.cholesky(covariance)

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    skills = np.zeros(player_count)
    kept = np.empty((iterations - burn, player_count))
    for it in range(iterations):
        margins = sample_truncated_normal(
            skills[winners] - skills[losers], performance_variance, np.ones(winners.size), rng
        )
        eta = (
            np.bincount(winners, weights=margins, minlength=player_count)
            - np.bincount(losers, weights=margins, minlength=player_count)
        ) * inv_v
        skills = covariance @ eta + chol @ rng.standard_normal(player_count)
        if np.any(np.abs(skills) > divergence_limit):
            raise DivergenceError(f"ranking chain diverged at iteration {it}", sweep=it)
        if it >= burn:
            kept[it - burn] = skills - skills[0] if anchor_common else skills
    means = kept.mean(axis=0)
    variances = kept.var(axis=0)
    variances = np.maximum(variances, 1e-12)
    return SkillState(
        players=roster,
        skills=[Gaussian1D(float(m), float(v)) for m, v in zip(means, variances)],
    )


def rank(skills: SkillState) -> list[Player]:
    """Players in descending mean-skill order; ties break by id."""
    return sorted(skills.players, key=lambda p: (-skills.mean(p.id), p.id))


def write_ranking_csv(skills: SkillState, stream: TextIO) -> None:
    stream.write("rank,label,mean,variance\n")
    for position, player in enumerate(rank(skills), start=1):
        stream.write(
            f"{position},{player.label},"
            f"{skills.mean(player.id):.12g},{skills.variance(player.id):.12g}\n"
        )
