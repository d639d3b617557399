"""Adaptive selection of verbal scaffolding strategies.

A partner model (capacity, gaze, task awareness) feeds a configurable scoring
rubric that reduces observations to six cognitive states; a pre-initialised
Q-table picks a negation/hesitation strategy per state and learns from
time-discounted task rewards.  Includes a simulation study over four synthetic
user types and a line-delimited TCP service plus CLI.
"""

from .config import AppConfig, load_config
from .partner_model import PartnerModel, PartnerModelConfig
from .policy import Hyperparameters, QTable, init_from_scoring
from .scoring import (
    ScoringTable,
    default_scoring_table,
    ground_truth_map,
    load_scoring_table,
    reduce_observation,
    scaffolding_score,
)
from .session import Session, SessionConfig, TaskPerformance, episode_reward
from .simulation import (
    make_user,
    run_campaign,
    run_simulation,
    run_sweep,
    write_campaign_csv,
)
from .states import (
    ACTIONS,
    STATES,
    Action,
    CapacityClass,
    CognitiveState,
    GazeClass,
    HesitationType,
    NegationType,
    ObservationTriple,
    TaskClass,
    all_observation_triples,
)

__version__ = "0.1.0"

__all__ = [
    "ACTIONS",
    "STATES",
    "Action",
    "AppConfig",
    "CapacityClass",
    "CognitiveState",
    "GazeClass",
    "HesitationType",
    "Hyperparameters",
    "NegationType",
    "ObservationTriple",
    "PartnerModel",
    "PartnerModelConfig",
    "QTable",
    "ScoringTable",
    "Session",
    "SessionConfig",
    "TaskClass",
    "TaskPerformance",
    "all_observation_triples",
    "default_scoring_table",
    "episode_reward",
    "ground_truth_map",
    "init_from_scoring",
    "load_config",
    "load_scoring_table",
    "make_user",
    "reduce_observation",
    "run_campaign",
    "run_simulation",
    "run_sweep",
    "write_campaign_csv",
    "__version__",
]
