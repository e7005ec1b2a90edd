"""Conflict analysis for Stackelberg driving games.

Game solving, reward-shaping models, Area of Conflict, and a two-vehicle
receding-horizon simulator for lane-change and intersection scenarios.
"""

__version__ = "0.1.0"

from .conflict import (AoCResult, ConflictRaster, RewardGaps, aoc_analytic, aoc_curve, aoc_oracle,
                       area_of_conflict, batch_conflict_oracle, canonical_game, conflict_predicate,
                       equilibrium_conflict_oracle, rasterize_region)
from .estimators import ConflictRegionClassifier, RewardTransformer
from .exceptions import (AssumptionViolated, DegenerateCoefficients, InfeasibleStart, LengthMismatch,
                         NoConvergence, NoFiniteCell, StackConflictError)
from .game import (INTERSECTION_GAME, LANE_CHANGE_GAME, BimatrixGame, ConflictVerdict, Equilibrium,
                   PlayerId, detect_conflict, load_game, parse_game, reward_gaps, solve_stackelberg)
from .scenarios import (Condition, FeatureWeights, Scenario, ScenarioConfig, SweepResult, check_completion,
                        condition_to_intentions, run_scenario, run_sweep)
from .transforms import Model, SocialParams, iterate_altruism, transform_game, transform_pair
from .vehicle import (ControlInput, CostSpec, PlannerConfig, SimOutcome, Trajectory, VehicleState,
                      evaluate_cost, plan_joint, run_receding_horizon, step_dynamics)
