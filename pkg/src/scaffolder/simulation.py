"""Desk-scale simulation study: synthetic users, runs, campaigns, sweeps.

Four synthetic user types probe how quickly the policy recovers when the
partner's real needs disagree with the rubric's assumptions:

* ``A`` behaves exactly as the rubric predicts.
* ``B`` needs the opposite capacity treatment: corrections only land while
  capacity is low.
* ``C`` additionally reacts against the rubric's task reading and insists on
  the matching hesitation cue.
* ``D`` additionally performs poorly whenever not visually focused.

Every run is a fixed-order random stream, so a (user, hyperparameters, seed)
triple is fully reproducible, serial or parallel.
"""

from __future__ import annotations

import csv
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean, pstdev
from typing import Mapping, Sequence

from .policy import Hyperparameters, QTable, init_from_scoring
from .scoring import (
    NEGATION,
    ScoringTable,
    default_scoring_table,
    ground_truth_map,
    reduce_observation,
)
from .session import episode_reward, TaskPerformance
from .states import (
    Action,
    CapacityClass,
    CognitiveState,
    GazeClass,
    NegationType,
    ObservationTriple,
    TaskClass,
    all_observation_triples,
)

USER_KINDS = ("A", "B", "C", "D")


@dataclass(frozen=True)
class UserModel:
    """A synthetic partner: a private rubric plus behavioural quirks.

    ``true_table`` is the rubric that would describe this partner correctly.
    The behavioural flags drive outcome generation; they express the same
    disagreement as the table edits but at the level of observable behaviour.
    """

    kind: str
    true_table: ScoringTable
    baseline: Mapping[ObservationTriple, tuple[CognitiveState, Action]]
    negation_rule: bool = False
    negation_blocked_tasks: frozenset = frozenset()
    needs_focused_gaze: bool = False
    hesitation_strict: bool = False

    def performs_well(self, triple: ObservationTriple, action: Action) -> bool:
        """Whether this partner would succeed given the observation and action."""
        baseline_action = self.baseline[triple][1]
        if self.needs_focused_gaze and triple.gaze is not GazeClass.FOCUSED:
            return False
        if self.negation_rule and action.negation is not NegationType.AFFIRMATION:
            if triple.capacity is not CapacityClass.LOW:
                return False
            if triple.task in self.negation_blocked_tasks:
                return False
            if self.hesitation_strict and action.hesitation is not baseline_action.hesitation:
                return False
            return True
        return action == baseline_action


def make_user(kind: str, table: ScoringTable | None = None) -> UserModel:
    """Build one of the four synthetic user types from a base rubric.

    The users nest: each type keeps all table edits of the previous one and
    adds its own, so the disagreement with the base rubric grows monotonically
    (2, 7 and 10 edited votes for B, C and D).
    """
    if kind not in USER_KINDS:
        raise ValueError(f"unknown user kind {kind!r}, expected one of {USER_KINDS}")
    base = table or default_scoring_table()
    baseline = ground_truth_map(base)
    if kind == "A":
        return UserModel(kind=kind, true_table=base, baseline=baseline)

    true_table = base.with_entry("capacity", "low", NEGATION, 1)
    true_table = true_table.with_entry("capacity", "high", NEGATION, 0)
    if kind == "B":
        return UserModel(
            kind=kind, true_table=true_table, baseline=baseline, negation_rule=True
        )

    for observation, vote in (
        ("unknown", 1),
        ("failure", 1),
        ("misc_enabledness", 0),
        ("misc_comprehension", 1),
        ("success", 0),
    ):
        true_table = true_table.with_entry("task", observation, NEGATION, vote)
    if kind == "C":
        return UserModel(
            kind=kind,
            true_table=true_table,
            baseline=baseline,
            negation_rule=True,
            negation_blocked_tasks=frozenset(
                {TaskClass.MISC_ENABLEDNESS, TaskClass.SUCCESS}
            ),
            hesitation_strict=True,
        )

    for observation, vote in (("distracted", 0), ("uncertain", 0), ("focused", 1)):
        true_table = true_table.with_entry("gaze", observation, NEGATION, vote)
    return UserModel(
        kind=kind,
        true_table=true_table,
        baseline=baseline,
        negation_rule=True,
        negation_blocked_tasks=frozenset({TaskClass.MISC_ENABLEDNESS, TaskClass.SUCCESS}),
        hesitation_strict=True,
        needs_focused_gaze=True,
    )


def simulate_outcome(
    user: UserModel,
    triple: ObservationTriple,
    action: Action,
    rng: random.Random,
    deviation_rate: float = 0.05,
    time_low: float = 1.0,
    time_high: float = 10.0,
) -> TaskPerformance:
    """One synthetic task attempt.  Draw order is part of the contract:
    deviation first, then the two solve times."""
    deviate = rng.random() < deviation_rate
    comprehension_time = rng.uniform(time_low, time_high)
    enabledness_time = rng.uniform(time_low, time_high)
    well = user.performs_well(triple, action)
    if deviate:
        well = not well
    return TaskPerformance(
        comprehension_ok=well,
        comprehension_time=comprehension_time,
        enabledness_ok=well,
        enabledness_time=enabledness_time,
    )


@dataclass(frozen=True)
class RunResult:
    seed: int
    series: tuple[float, ...]

    @property
    def final_reward(self) -> float:
        return self.series[-1] if self.series else 0.0

    @property
    def recovery(self) -> int | None:
        return recovery_episode(self.series)

    @property
    def censored(self) -> bool:
        return self.recovery is None


def recovery_episode(series: Sequence[float]) -> int | None:
    """First 1-based episode where the cumulative reward returns to >= 0
    after having been negative.  0 means it never dipped; None means it
    dipped and never came back within the horizon."""
    dipped = False
    for index, value in enumerate(series, start=1):
        if dipped and value >= 0:
            return index
        if value < 0:
            dipped = True
    return None if dipped else 0


@dataclass(frozen=True)
class RunSpec:
    """Everything one reproducible run needs; cheap to ship to a worker."""

    user_kind: str
    preconfigured: bool
    seed: int
    horizon: int = 100
    hyper: Hyperparameters = field(default_factory=Hyperparameters)
    deviation_rate: float = 0.05
    time_low: float = 1.0
    time_high: float = 10.0
    table: ScoringTable | None = None


def _build_qtable(spec: RunSpec, table: ScoringTable) -> QTable:
    if spec.preconfigured:
        return init_from_scoring(ground_truth_map(table), spec.hyper.q_init, spec.hyper)
    return QTable(spec.hyper)


def run_simulation(spec: RunSpec) -> RunResult:
    """One run: ``horizon`` episodes over uniformly sampled observations.

    Per episode the stream is: action selection, deviation draw, two solve
    times, next observation index.  The value update bootstraps on the next
    episode's observation, chaining the walk together.
    """
    table = spec.table or default_scoring_table()
    user = make_user(spec.user_kind, table if spec.table else None)
    qtable = _build_qtable(spec, table)
    rng = random.Random(spec.seed)

    triples = all_observation_triples()
    states = [reduce_observation(table, triple) for triple in triples]

    series: list[float] = []
    cumulative = 0.0
    index = rng.randrange(len(triples))
    for _ in range(spec.horizon):
        triple = triples[index]
        state = states[index]
        action = qtable.select_action(state, rng)
        performance = simulate_outcome(
            user, triple, action, rng, spec.deviation_rate, spec.time_low, spec.time_high
        )
        reward = episode_reward(performance)
        next_index = rng.randrange(len(triples))
        qtable.update(state, action, reward, states[next_index])
        cumulative += reward
        series.append(cumulative)
        index = next_index
    return RunResult(seed=spec.seed, series=tuple(series))


@dataclass(frozen=True)
class EpisodeScript:
    """One scripted episode for dynamic mode: fixations, then a task."""

    gaze_targets: tuple[int, ...]
    task: str


def run_dynamic(spec: RunSpec, script: Sequence[EpisodeScript]) -> RunResult:
    """Scripted-mode run: drives the full partner-model pipeline per episode
    instead of sampling observation triples uniformly."""
    from .partner_model import PartnerModel
    from .session import Session

    table = spec.table or default_scoring_table()
    user = make_user(spec.user_kind, table if spec.table else None)
    qtable = _build_qtable(spec, table)
    rng = random.Random(spec.seed)
    session = Session(table, qtable, partner=PartnerModel(), rng=rng)

    def environment(triple: ObservationTriple, action: Action) -> TaskPerformance:
        return simulate_outcome(
            user, triple, action, rng, spec.deviation_rate, spec.time_low, spec.time_high
        )

    for episode in script:
        session.step(episode.gaze_targets, episode.task, environment)
    series = tuple(record.cumulative_reward for record in session.records)
    return RunResult(seed=spec.seed, series=series)


@dataclass(frozen=True)
class CampaignSummary:
    runs: int
    z_mean: float
    z_sd: float
    reward_mean: float
    reward_sd: float
    recovery_rate: float
    non_recovery_rate: float


@dataclass(frozen=True)
class CampaignResult:
    user_kind: str
    preconfigured: bool
    hyper: Hyperparameters
    horizon: int
    results: tuple[RunResult, ...]

    def summary(self) -> CampaignSummary:
        return summarize(self.results, self.horizon)


def summarize(results: Sequence[RunResult], horizon: int) -> CampaignSummary:
    """Aggregate a batch of runs; censored runs count at the horizon."""
    recoveries = [r.recovery for r in results]
    z_values = [horizon if z is None else z for z in recoveries]
    finals = [r.final_reward for r in results]
    censored = sum(1 for z in recoveries if z is None)
    n = len(results)
    return CampaignSummary(
        runs=n,
        z_mean=fmean(z_values),
        z_sd=pstdev(z_values),
        reward_mean=fmean(finals),
        reward_sd=pstdev(finals),
        recovery_rate=(n - censored) / n,
        non_recovery_rate=censored / n,
    )


def run_campaign(
    user_kind: str,
    preconfigured: bool,
    runs: int = 500,
    horizon: int = 100,
    base_seed: int = 0,
    hyper: Hyperparameters | None = None,
    deviation_rate: float = 0.05,
    time_low: float = 1.0,
    time_high: float = 10.0,
    table: ScoringTable | None = None,
    workers: int = 1,
) -> CampaignResult:
    """A batch of independent runs with seeds base_seed .. base_seed+runs-1.

    Parallel execution partitions the same per-run seeds over processes, so
    the result is identical to the serial one.
    """
    hyper = hyper or Hyperparameters()
    specs = [
        RunSpec(
            user_kind=user_kind,
            preconfigured=preconfigured,
            seed=base_seed + offset,
            horizon=horizon,
            hyper=hyper,
            deviation_rate=deviation_rate,
            time_low=time_low,
            time_high=time_high,
            table=table,
        )
        for offset in range(runs)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = tuple(pool.map(run_simulation, specs, chunksize=max(1, runs // (workers * 4))))
    else:
        results = tuple(run_simulation(spec) for spec in specs)
    return CampaignResult(
        user_kind=user_kind,
        preconfigured=preconfigured,
        hyper=hyper,
        horizon=horizon,
        results=results,
    )


SWEEP_ALPHAS = (0.25, 0.5)
SWEEP_GAMMAS = (0.0, 0.5, 0.95)
SWEEP_EPSILON = 0.75


@dataclass(frozen=True)
class SweepRow:
    preconfigured: bool
    alpha: float
    gamma: float
    epsilon: float
    z_mean: float
    z_sd: float
    reward_mean: float
    reward_sd: float


def run_sweep(
    runs: int = 500,
    horizon: int = 100,
    base_seed: int = 0,
    user_kind: str = "A",
    table: ScoringTable | None = None,
    workers: int = 1,
) -> list[SweepRow]:
    """The 12-row hyperparameter study: both initialisations crossed with
    two learning rates and three discount factors, epsilon fixed."""
    rows: list[SweepRow] = []
    for alpha in SWEEP_ALPHAS:
        for gamma in SWEEP_GAMMAS:
            for preconfigured in (False, True):
                hyper = Hyperparameters(alpha=alpha, gamma=gamma, epsilon=SWEEP_EPSILON)
                campaign = run_campaign(
                    user_kind,
                    preconfigured,
                    runs=runs,
                    horizon=horizon,
                    base_seed=base_seed,
                    hyper=hyper,
                    table=table,
                    workers=workers,
                )
                stats = campaign.summary()
                rows.append(
                    SweepRow(
                        preconfigured=preconfigured,
                        alpha=alpha,
                        gamma=gamma,
                        epsilon=SWEEP_EPSILON,
                        z_mean=stats.z_mean,
                        z_sd=stats.z_sd,
                        reward_mean=stats.reward_mean,
                        reward_sd=stats.reward_sd,
                    )
                )
    return rows


def write_campaign_csv(campaign: CampaignResult, path: str | Path) -> None:
    """One row per run plus a trailing aggregate row.

    The aggregate row reuses the columns: Z holds the mean recovery episode
    (censored at horizon), censored holds the non-recovery rate, final_reward
    holds the mean final cumulative reward.
    """
    stats = campaign.summary()
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["seed", "Z", "censored", "final_reward"])
        for result in campaign.results:
            recovery = result.recovery
            writer.writerow(
                [
                    result.seed,
                    "" if recovery is None else recovery,
                    str(recovery is None).lower(),
                    repr(result.final_reward),
                ]
            )
        writer.writerow(
            [
                "aggregate",
                repr(stats.z_mean),
                repr(stats.non_recovery_rate),
                repr(stats.reward_mean),
            ]
        )


def write_series_csv(campaign: CampaignResult, path: str | Path) -> None:
    """Per-episode mean and spread of the cumulative reward, for plotting."""
    horizon = campaign.horizon
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["episode", "mean_cumulative_reward", "sd"])
        for index in range(horizon):
            values = [result.series[index] for result in campaign.results]
            writer.writerow([index + 1, repr(fmean(values)), repr(pstdev(values))])


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["H_S", "alpha", "gamma", "epsilon", "Z_m", "Z_sd", "R_m", "R_sd"])
        for row in rows:
            writer.writerow(
                [
                    "T" if row.preconfigured else "F",
                    repr(row.alpha),
                    repr(row.gamma),
                    repr(row.epsilon),
                    repr(row.z_mean),
                    repr(row.z_sd),
                    repr(row.reward_mean),
                    repr(row.reward_sd),
                ]
            )
