"""Lane-change and intersection experiments under the four leader assumptions.

Each agent plans with the joint intention pair of the Stackelberg solution it
believes in. When both agents believe the same solution they cooperate; when
they disagree each executes its own half of a different plan.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .game import INTERSECTION_GAME, LANE_CHANGE_GAME, BimatrixGame, detect_conflict
from .vehicle import (SENTINEL_TIME, CostSpec, PlannerConfig, SimOutcome, VehicleState,
                      run_receding_horizon)

MAX_OFFSET = 6.9


class Scenario(str, enum.Enum):
    LANE_CHANGE = "lane"
    INTERSECTION = "intersection"

    @property
    def game(self) -> BimatrixGame:
        return LANE_CHANGE_GAME if self is Scenario.LANE_CHANGE else INTERSECTION_GAME


class Condition(str, enum.Enum):
    AGREE_ROW = "agree-row"      # both agree the row player leads
    AGREE_COL = "agree-col"      # both agree the column player leads
    BOTH_LEAD = "both-lead"      # each assumes it leads
    BOTH_FOLLOW = "both-follow"  # each assumes the other leads

    @property
    def agreed(self) -> bool:
        return self in (Condition.AGREE_ROW, Condition.AGREE_COL)


@dataclass(frozen=True)
class FeatureWeights:
    lane: float = 1.0
    speed: float = 0.5
    give_way: float = 1.0
    progress: float = 0.5

    def __post_init__(self):
        for name in ("lane", "speed", "give_way", "progress"):
            if getattr(self, name) < 0:
                raise ValueError(f"weight {name} must be >= 0")


# tuned so that agreed intentions are realised by the joint planner
DEFAULT_WEIGHTS = {
    Scenario.LANE_CHANGE: FeatureWeights(lane=5.0, speed=0.5, give_way=10.0, progress=0.0),
    Scenario.INTERSECTION: FeatureWeights(lane=1.0, speed=0.1, give_way=20.0, progress=0.5),
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario = Scenario.LANE_CHANGE
    condition: Condition = Condition.AGREE_ROW
    offset_row: float = 0.0
    offset_col: float = 0.0
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    weights: Optional[FeatureWeights] = None
    game: Optional[BimatrixGame] = None
    start_distance: float = 20.0
    box_size: float = 4.0
    completion_tolerance: float = 0.5
    intersection_omega: float = 1e-3
    yield_gap: float = 4.6
    max_time: float = SENTINEL_TIME

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        object.__setattr__(self, "condition", Condition(self.condition))
        for name in ("offset_row", "offset_col"):
            if abs(getattr(self, name)) > MAX_OFFSET + 1e-12:
                raise ValueError(f"{name} must lie within +-{MAX_OFFSET} m")
        if self.game is None:
            object.__setattr__(self, "game", self.scenario.game)
        if self.weights is None:
            object.__setattr__(self, "weights", DEFAULT_WEIGHTS[self.scenario])

    @property
    def effective_planner(self) -> PlannerConfig:
        if self.scenario is Scenario.INTERSECTION:
            return replace(self.planner, omega_max=self.intersection_omega)
        return self.planner


def _equilibrium_labels(game: BimatrixGame):
    verdict = detect_conflict(game)
    return verdict.row_led.labels(game), verdict.col_led.labels(game)


def agent_beliefs(scenario, condition, game: Optional[BimatrixGame] = None):
    """Joint intention pair each agent plans for: ``(row_view, col_view)``."""
    game = game or Scenario(scenario).game
    row_led, col_led = _equilibrium_labels(game)
    condition = Condition(condition)
    return {
        Condition.AGREE_ROW: (row_led, row_led),
        Condition.AGREE_COL: (col_led, col_led),
        Condition.BOTH_LEAD: (row_led, col_led),
        Condition.BOTH_FOLLOW: (col_led, row_led),
    }[condition]


def condition_to_intentions(scenario, condition, game: Optional[BimatrixGame] = None) -> tuple[str, str]:
    """Joint intention actually executed: each agent's own half of its belief."""
    row_view, col_view = agent_beliefs(scenario, condition, game)
    return row_view[0], col_view[1]


# geometry

def _lane_change_spec(intention: str, w: FeatureWeights, lane_width: float, vehicle_width: float) -> CostSpec:
    target = lane_width / 2
    edge = lane_width - vehicle_width / 2
    # lateral offset is measured leftward from the right-lane centre
    yields = intention in ("LCB", "GW")
    return CostSpec(intention=intention, lane_weight=w.lane, speed_weight=w.speed,
                    give_way_weight=w.give_way if yields else 0.0, progress_weight=0.0,
                    lane_angle=math.pi / 2, lane_center=(target, 0.0),
                    road_lateral=(target - edge, target + edge))


def _intersection_spec(intention: str, agent: int, w: FeatureWeights, cfg: ScenarioConfig) -> CostSpec:
    half_road = cfg.planner.lane_width / 2 - cfg.planner.vehicle_width / 2
    goal = cfg.box_size / 2 + cfg.planner.vehicle_length
    own, other = (0.0, math.pi / 2) if agent == 0 else (math.pi / 2, 0.0)
    proceeds = intention == "C"
    return CostSpec(intention=intention, lane_weight=w.lane, speed_weight=w.speed,
                    priority_weight=w.give_way if proceeds else 0.0,
                    give_way_weight=0.0 if proceeds else w.give_way, progress_weight=w.progress,
                    lane_angle=own, other_lane_angle=other, lane_center=(0.0, 0.0),
                    road_lateral=(-half_road, half_road), goal_distance=goal,
                    give_way_gap=0.0 if proceeds else cfg.yield_gap)


def cost_specs(cfg: ScenarioConfig, intentions: tuple[str, str]) -> tuple[CostSpec, CostSpec]:
    if cfg.scenario is Scenario.LANE_CHANGE:
        p = cfg.planner
        return tuple(_lane_change_spec(i, cfg.weights, p.lane_width, p.vehicle_width) for i in intentions)
    return tuple(_intersection_spec(i, k, cfg.weights, cfg) for k, i in enumerate(intentions))


def initial_states(cfg: ScenarioConfig) -> tuple[VehicleState, VehicleState]:
    if cfg.scenario is Scenario.LANE_CHANGE:
        half = cfg.planner.lane_width / 2
        v = cfg.planner.speed_limit
        return (VehicleState(-half, cfg.offset_row, v, math.pi / 2),
                VehicleState(half, cfg.offset_col, v, math.pi / 2))
    d = cfg.start_distance
    return (VehicleState(-d + cfg.offset_row, 0.0, 0.0, 0.0),
            VehicleState(0.0, -d + cfg.offset_col, 0.0, math.pi / 2))


def check_completion(scenario, intention: str, state: VehicleState, opponent_state: VehicleState, *,
                     lane_width: float = 4.0, tolerance: float = 0.5, box_size: float = 4.0) -> bool:
    """Whether ``state`` satisfies ``intention`` given the opponent's state."""
    scenario = Scenario(scenario)
    if scenario is Scenario.LANE_CHANGE:
        in_lane = abs(state.x - lane_width / 2) <= tolerance
        if intention == "LCA":
            return in_lane and state.y > opponent_state.y
        if intention in ("LCB", "GW"):
            return in_lane and state.y < opponent_state.y
        if intention == "C":
            return in_lane
        raise ValueError(f"unknown lane-change intention {intention!r}")
    if intention not in ("C", "GW"):
        raise ValueError(f"unknown intersection intention {intention!r}")
    # travel direction from heading, snapped to the road axes
    heading = round(state.theta / (math.pi / 2)) * (math.pi / 2)
    along = state.x * round(math.cos(heading)) + state.y * round(math.sin(heading))
    return along > box_size / 2


def run_scenario(cfg: ScenarioConfig) -> SimOutcome:
    planner = cfg.effective_planner
    row_view, col_view = agent_beliefs(cfg.scenario, cfg.condition, cfg.game)
    beliefs = (cost_specs(cfg, row_view), cost_specs(cfg, col_view))
    executed = (row_view[0], col_view[1])

    def checker(intention):
        return lambda me, other: check_completion(cfg.scenario, intention, me, other,
                                                  lane_width=planner.lane_width,
                                                  tolerance=cfg.completion_tolerance, box_size=cfg.box_size)

    return run_receding_horizon(initial_states(cfg), beliefs, planner, cfg.max_time,
                                (checker(executed[0]), checker(executed[1])))


def default_offsets(n: int = 5, limit: float = MAX_OFFSET) -> np.ndarray:
    if n < 1:
        raise ValueError("grid size must be >= 1")
    if n == 1:
        return np.zeros(1)
    return np.linspace(-limit, limit, n)


@dataclass
class SweepResult:
    scenario: Scenario
    condition: Condition
    outcomes: dict  # (offset_row, offset_col) -> SimOutcome
    seed: int = 42

    @property
    def average_time(self) -> float:
        # fixed reduction order over the sorted grid
        times = [self.outcomes[k].time for k in sorted(self.outcomes)]
        return float(np.mean(times))

    def rows(self):
        for (o_r, o_c) in sorted(self.outcomes):
            out = self.outcomes[(o_r, o_c)]
            yield o_r, o_c, out.completion_time_row, out.completion_time_col, out.collided


def _run_point(args):
    cfg = args
    try:
        return run_scenario(cfg)
    except Exception as exc:  # a failed rollout never aborts the sweep
        return SimOutcome(SENTINEL_TIME, SENTINEL_TIME, False, False, (), f"error: {exc}")


def run_sweep(scenario, condition, offsets_grid: Sequence[float] = None, cfg: Optional[ScenarioConfig] = None,
              seed: int = 42, workers: int = 1) -> SweepResult:
    """One rollout per ``(offset_row, offset_col)`` in the product grid.

    The planner is deterministic; ``seed`` is recorded for provenance only.
    """
    offsets = default_offsets() if offsets_grid is None else np.asarray(offsets_grid, dtype=float)
    if np.any(np.abs(offsets) > MAX_OFFSET + 1e-12):
        raise ValueError(f"offsets must lie within +-{MAX_OFFSET} m")
    scenario = Scenario(scenario)
    base = cfg or ScenarioConfig(scenario=scenario)
    if base.scenario is not scenario:
        base = replace(base, scenario=scenario, game=None, weights=None)
    base = replace(base, condition=Condition(condition))
    points = [(float(a), float(b)) for a, b in product(offsets, offsets)]
    jobs = [replace(base, offset_row=a, offset_col=b) for a, b in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]
    return SweepResult(base.scenario, base.condition, dict(zip(points, results)), seed)


def sweep_all(scenario, offsets_grid=None, cfg: Optional[ScenarioConfig] = None, seed: int = 42,
              workers: int = 1) -> dict:
    return {c: run_sweep(scenario, c, offsets_grid, cfg, seed, workers) for c in Condition}


def summary_table(scenario, results: dict) -> str:
    """2x2 table of average times: rows are the row player's assumption, columns the column player's."""
    scenario = Scenario(scenario)
    game = scenario.game
    row_led, col_led = _equilibrium_labels(game)

    def cell(cond):
        r, c = condition_to_intentions(scenario, cond, game)
        avg = results[cond].average_time if cond in results else float("nan")
        return f"({r},{c}) {avg:.2f}"

    head = ["", "col assumes lead", "col assumes follow"]
    body = [
        ["row assumes lead", cell(Condition.BOTH_LEAD), cell(Condition.AGREE_ROW)],
        ["row assumes follow", cell(Condition.AGREE_COL), cell(Condition.BOTH_FOLLOW)],
    ]
    widths = [max(len(r[i]) for r in [head] + body) for i in range(3)]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [head] + body)
