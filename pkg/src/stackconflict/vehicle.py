"""Kinematic vehicles, trajectory costs and a joint receding-horizon planner.

State is ``[x, y, v, theta]`` and control is ``[a, omega]`` with ``omega``
the heading rate. One planning call optimises the control sequences of both
vehicles at once under a single joint cost (the planning agent's view of
the agreed intentions). Control boxes are handled exactly by L-BFGS-B;
speed, road and separation constraints enter as quadratic penalties whose
weight is raised in stages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .exceptions import InfeasibleStart, LengthMismatch, NoConvergence

SENTINEL_TIME = 10.0


def wrap_angle(theta):
    """Wrap to (-pi, pi]."""
    return theta - 2 * np.pi * np.ceil((theta - np.pi) / (2 * np.pi))


def _lane_dir(angle: float) -> tuple[float, float]:
    c, s = math.cos(angle), math.sin(angle)
    # keep axis-aligned lanes exact
    c = 0.0 if abs(c) < 1e-12 else c
    s = 0.0 if abs(s) < 1e-12 else s
    return c, s


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    v: float
    theta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.v, self.theta], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "VehicleState":
        return cls(*(float(a) for a in arr))


@dataclass(frozen=True)
class ControlInput:
    a: float
    omega: float


@dataclass
class Trajectory:
    """States ``(K+1, 4)`` and the controls ``(K, 2)`` that produced them."""

    states: np.ndarray
    controls: np.ndarray
    dt: float = 0.2

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=float).reshape(-1, 4)
        self.controls = np.asarray(self.controls, dtype=float).reshape(-1, 2)
        if len(self.states) != len(self.controls) + 1:
            raise LengthMismatch("a trajectory needs exactly one more state than controls")

    def __len__(self):
        return len(self.states)

    def state(self, k: int) -> VehicleState:
        return VehicleState.from_array(self.states[k])

    def control(self, k: int) -> ControlInput:
        return ControlInput(*(float(c) for c in self.controls[k]))

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.states)) * self.dt

    def dynamics_residual(self) -> float:
        """Largest deviation between stored states and re-stepped states."""
        worst = 0.0
        for k in range(len(self.controls)):
            nxt = step_dynamics(self.state(k), self.control(k), self.dt).as_array()
            diff = nxt - self.states[k + 1]
            diff[3] = wrap_angle(diff[3])
            worst = max(worst, float(np.abs(diff).max()))
        return worst


@dataclass(frozen=True)
class CostSpec:
    """Feature weights and lane geometry of one intention.

    ``lane_angle`` is the direction of travel; ``lane_center`` is any point
    on the target lane's centre line. ``road_lateral`` bounds the signed
    lateral offset of the vehicle centre from that line (left positive).
    ``goal_distance`` is the along-lane coordinate the progress feature pulls
    toward. The give-way feature compares along-lane progress; the other
    vehicle's progress is measured on ``other_lane_angle`` (defaults to the
    own lane, which covers parallel lanes) and the yielding vehicle is
    penalised unless it trails by at least ``give_way_gap``.
    """

    intention: str = ""
    lane_weight: float = 1.0
    speed_weight: float = 0.5
    give_way_weight: float = 0.0
    priority_weight: float = 0.0
    progress_weight: float = 0.0
    lane_angle: float = math.pi / 2
    lane_center: tuple = (0.0, 0.0)
    road_lateral: tuple = (-1.0, 1.0)
    goal_distance: float = 0.0
    speed_target: float = 15.0
    other_lane_angle: Optional[float] = None
    give_way_gap: float = 0.0

    def __post_init__(self):
        for name in ("lane_weight", "speed_weight", "give_way_weight", "priority_weight", "progress_weight"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def lateral(self, x, y):
        c, s = _lane_dir(self.lane_angle)
        return -s * (x - self.lane_center[0]) + c * (y - self.lane_center[1])

    def along(self, x, y):
        c, s = _lane_dir(self.lane_angle)
        return c * x + s * y

    def other_along(self, x, y):
        angle = self.lane_angle if self.other_lane_angle is None else self.other_lane_angle
        c, s = _lane_dir(angle)
        return c * x + s * y


@dataclass(frozen=True)
class PlannerConfig:
    horizon: float = 4.0
    dt: float = 0.2
    replan_stride: int = 2
    vehicle_length: float = 4.6
    vehicle_width: float = 2.0
    lane_width: float = 4.0
    ellipse_delta: float = 0.5
    ellipse_epsilon: float = 0.5
    speed_limit: float = 15.0
    accel_min: float = -9.0
    accel_max: float = 3.0
    omega_max: float = math.radians(20.0)
    penalty_schedule: tuple = (1e3, 1e5)
    collision_weight: float = 1.0
    max_iterations: int = 60
    constraint_margin: float = 5e-3
    tolerance: float = 1e-3

    def __post_init__(self):
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9 or steps < 1:
            raise ValueError("horizon must be a positive integer multiple of dt")
        if self.replan_stride < 1:
            raise ValueError("replan_stride must be >= 1")
        if self.ellipse_delta <= 0 or self.ellipse_epsilon <= 0:
            raise ValueError("ellipse margins must be positive")
        if not self.accel_min <= 0 <= self.accel_max:
            raise ValueError("acceleration bounds must bracket 0")
        if self.omega_max < 0:
            raise ValueError("omega_max must be >= 0")

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def ellipse_a(self) -> float:
        return self.vehicle_width + self.ellipse_delta

    @property
    def ellipse_b(self) -> float:
        return self.vehicle_length + self.ellipse_epsilon


def load_planner_config(path, base: Optional[PlannerConfig] = None) -> PlannerConfig:
    """Read ``key = value`` lines (``#`` comments) over the defaults."""
    base = base or PlannerConfig()
    known = {f.name: f for f in fields(PlannerConfig)}
    updates = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown planner setting {key!r}")
        current = getattr(base, key)
        if isinstance(current, tuple):
            updates[key] = tuple(float(v) for v in value.split(","))
        elif isinstance(current, int) and not isinstance(current, bool):
            updates[key] = int(value)
        else:
            updates[key] = float(value)
    return replace(base, **updates)


def step_dynamics(state: VehicleState, control: ControlInput, dt: float) -> VehicleState:
    """One explicit Euler step; speed is clamped at zero (no reversing)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return VehicleState(
        x=state.x + state.v * math.cos(state.theta) * dt,
        y=state.y + state.v * math.sin(state.theta) * dt,
        v=max(state.v + control.a * dt, 0.0),
        theta=float(wrap_angle(state.theta + control.omega * dt)),
    )


def simulate(initial: VehicleState, controls, dt: float) -> Trajectory:
    controls = np.asarray(controls, dtype=float).reshape(-1, 2)
    states = [initial]
    for a, om in controls:
        states.append(step_dynamics(states[-1], ControlInput(a, om), dt))
    return Trajectory(np.array([s.as_array() for s in states]), controls, dt)


def ellipse_value(dx, dy, a: float, b: float):
    return (dx / a) ** 2 + (dy / b) ** 2


# cost features

def _feature_terms(xi, yi, vi, xj, yj, spec: CostSpec):
    """Per-timestep weighted features of one vehicle; ``xj`` is None without a partner."""
    c, s = _lane_dir(spec.lane_angle)
    lat = spec.lateral(xi, yi)
    total = spec.lane_weight * lat ** 2 + spec.speed_weight * (vi - spec.speed_target) ** 2
    if spec.progress_weight:
        total = total + spec.progress_weight * np.maximum(spec.goal_distance - spec.along(xi, yi), 0.0)
    if xj is not None:
        if spec.give_way_weight:
            ahead = np.maximum(spec.along(xi, yi) - spec.other_along(xj, yj) + spec.give_way_gap, 0.0)
            total = total + spec.give_way_weight * ahead
        if spec.priority_weight:
            behind = c * np.maximum(xj - xi, 0.0) + s * np.maximum(yj - yi, 0.0)
            total = total + spec.priority_weight * behind
    return total


def _as_states(traj) -> np.ndarray:
    if isinstance(traj, Trajectory):
        return traj.states
    return np.asarray(traj, dtype=float).reshape(-1, 4)


def evaluate_cost(traj_i, traj_other, spec_i: CostSpec, spec_other: CostSpec) -> float:
    """Joint cost of two trajectories: each vehicle's features under its own spec, summed over time."""
    si, so = _as_states(traj_i), _as_states(traj_other)
    if si.shape != so.shape:
        raise LengthMismatch(f"trajectory lengths differ: {len(si)} vs {len(so)}")
    ji = _feature_terms(si[:, 0], si[:, 1], si[:, 2], so[:, 0], so[:, 1], spec_i)
    jo = _feature_terms(so[:, 0], so[:, 1], so[:, 2], si[:, 0], si[:, 1], spec_other)
    return float(np.sum(ji) + np.sum(jo))


# planner internals

def _rollout(x0: np.ndarray, u: np.ndarray, dt: float):
    """Unclamped, unwrapped rollout for all vehicles. ``x0`` (V, 4), ``u`` (V, N, 2)."""
    V, N, _ = u.shape
    zeros = np.zeros((V, 1))
    v = x0[:, 2:3] + dt * np.concatenate([zeros, np.cumsum(u[:, :, 0], axis=1)], axis=1)
    th = x0[:, 3:4] + dt * np.concatenate([zeros, np.cumsum(u[:, :, 1], axis=1)], axis=1)
    cth, sth = np.cos(th), np.sin(th)
    x = x0[:, 0:1] + dt * np.concatenate([zeros, np.cumsum(v[:, :-1] * cth[:, :-1], axis=1)], axis=1)
    y = x0[:, 1:2] + dt * np.concatenate([zeros, np.cumsum(v[:, :-1] * sth[:, :-1], axis=1)], axis=1)
    return x, y, v, th, cth, sth


def _suffix_sum(g):
    """out[:, j] = sum_{k > j} g[:, k]."""
    rev = np.cumsum(g[:, ::-1], axis=1)[:, ::-1]
    return np.concatenate([rev[:, 1:], np.zeros((g.shape[0], 1))], axis=1)


class _JointProblem:
    """Objective and gradient for one planning call."""

    def __init__(self, x0: np.ndarray, specs: Sequence[CostSpec], cfg: PlannerConfig):
        self.x0 = x0
        self.specs = list(specs)
        self.cfg = cfg
        self.V = len(specs)
        self.N = cfg.steps
        self.mu = 1.0

    def unpack(self, z):
        return z.reshape(self.V, self.N, 2)

    def terms(self, z, with_grad=True):
        cfg = self.cfg
        u = self.unpack(z)
        x, y, v, th, cth, sth = _rollout(self.x0, u, cfg.dt)
        gx = np.zeros_like(x)
        gy = np.zeros_like(y)
        gv = np.zeros_like(v)
        cost = 0.0
        pen = 0.0
        mu = self.mu
        m = cfg.constraint_margin
        for i, spec in enumerate(self.specs):
            c, s = _lane_dir(spec.lane_angle)
            nx, ny = -s, c
            lat = spec.lateral(x[i], y[i])
            dv = v[i] - spec.speed_target
            cost += np.sum(spec.lane_weight * lat ** 2 + spec.speed_weight * dv ** 2)
            gx[i] += 2 * spec.lane_weight * lat * nx
            gy[i] += 2 * spec.lane_weight * lat * ny
            gv[i] += 2 * spec.speed_weight * dv
            if spec.progress_weight:
                rem = spec.goal_distance - (c * x[i] + s * y[i])
                act = rem > 0
                cost += spec.progress_weight * np.sum(rem[act])
                gx[i] -= spec.progress_weight * c * act
                gy[i] -= spec.progress_weight * s * act
            if self.V == 2:
                j = 1 - i
                if spec.give_way_weight:
                    w = spec.give_way_weight
                    co, so = _lane_dir(spec.lane_angle if spec.other_lane_angle is None else spec.other_lane_angle)
                    d = spec.along(x[i], y[i]) - spec.other_along(x[j], y[j]) + spec.give_way_gap
                    act = d >= 0
                    cost += w * np.sum(d[act])
                    gx[i] += w * c * act
                    gy[i] += w * s * act
                    gx[j] -= w * co * act
                    gy[j] -= w * so * act
                if spec.priority_weight:
                    w = spec.priority_weight
                    for garr, arr, coef in ((gx, x, c), (gy, y, s)):
                        if not coef:
                            continue
                        d = arr[j] - arr[i]
                        act = d > 0
                        cost += w * coef * np.sum(d[act])
                        garr[i] -= w * coef * act
                        garr[j] += w * coef * act
            # penalties on planned states k >= 1
            lo, hi = spec.road_lateral
            over = np.maximum(lat[1:] - (hi - m), 0.0)
            under = np.maximum((lo + m) - lat[1:], 0.0)
            pen += np.sum(over ** 2 + under ** 2)
            gx[i, 1:] += mu * 2 * (over - under) * nx
            gy[i, 1:] += mu * 2 * (over - under) * ny
            vo = np.maximum(v[i, 1:] - (cfg.speed_limit - m), 0.0)
            vu = np.maximum(-v[i, 1:], 0.0)
            pen += np.sum(vo ** 2 + vu ** 2)
            gv[i, 1:] += mu * 2 * (vo - vu)
        if self.V == 2:
            a2, b2 = cfg.ellipse_a ** 2, cfg.ellipse_b ** 2
            dx = x[0, 1:] - x[1, 1:]
            dy = y[0, 1:] - y[1, 1:]
            h = dx ** 2 / a2 + dy ** 2 / b2
            viol = np.maximum(1.0 + m - h, 0.0)
            w = cfg.collision_weight
            pen += w * np.sum(viol ** 2)
            coef = -2 * w * mu * viol
            gx[0, 1:] += coef * 2 * dx / a2
            gx[1, 1:] -= coef * 2 * dx / a2
            gy[0, 1:] += coef * 2 * dy / b2
            gy[1, 1:] -= coef * 2 * dy / b2
        total = cost + mu * pen
        if not with_grad:
            return total
        dt = cfg.dt
        Gx = _suffix_sum(gx)
        Gy = _suffix_sum(gy)
        gv_tot = gv + dt * (cth * Gx + sth * Gy)
        gth_tot = dt * v * (-sth * Gx + cth * Gy)
        ga = dt * _suffix_sum(gv_tot)[:, :-1]
        gw = dt * _suffix_sum(gth_tot)[:, :-1]
        grad = np.stack([ga, gw], axis=-1).ravel()
        return total, grad

    def __call__(self, z):
        return self.terms(z)


def constraint_violation(trajs: Sequence[Trajectory], specs: Sequence[CostSpec], cfg: PlannerConfig) -> float:
    """Worst violation of road, speed and separation constraints over planned states."""
    worst = 0.0
    for traj, spec in zip(trajs, specs):
        st = traj.states[1:]
        lat = spec.lateral(st[:, 0], st[:, 1])
        lo, hi = spec.road_lateral
        worst = max(worst, float(np.max(lat - hi, initial=0.0)), float(np.max(lo - lat, initial=0.0)))
        worst = max(worst, float(np.max(st[:, 2] - cfg.speed_limit, initial=0.0)),
                    float(np.max(-st[:, 2], initial=0.0)))
    if len(trajs) == 2:
        d = trajs[0].states[1:, :2] - trajs[1].states[1:, :2]
        h = ellipse_value(d[:, 0], d[:, 1], cfg.ellipse_a, cfg.ellipse_b)
        worst = max(worst, float(np.max(1.0 - h, initial=0.0)))
    return worst


def _bounds(cfg: PlannerConfig, V: int):
    one = [(cfg.accel_min, cfg.accel_max), (-cfg.omega_max, cfg.omega_max)]
    return one * (V * cfg.steps)


def _project(z, bounds):
    lo = np.array([b[0] for b in bounds])
    hi = np.array([b[1] for b in bounds])
    return np.clip(z, lo, hi)


def _cold_starts(x0: np.ndarray, cfg: PlannerConfig) -> list:
    """Initial guesses: coast, and for two vehicles each ordering of who holds back."""
    V = len(x0)
    starts = [np.zeros(V * cfg.steps * 2)]
    if V == 2:
        for k in range(2):
            u = np.zeros((2, cfg.steps, 2))
            # brake gently without reversing
            u[k, :, 0] = max(cfg.accel_min / 3, -x0[k, 2] / cfg.horizon)
            u[1 - k, :, 0] = cfg.accel_max
            starts.append(u.ravel())
    return starts


def _optimise(states: Sequence[VehicleState], specs: Sequence[CostSpec], cfg: PlannerConfig,
              warm_start: Optional[np.ndarray] = None):
    V = len(states)
    x0 = np.array([s.as_array() for s in states])
    problem = _JointProblem(x0, specs, cfg)
    # optimise over controls scaled to comparable magnitudes
    scale = np.tile([max(cfg.accel_max, -cfg.accel_min, 1e-6), max(cfg.omega_max, 1e-6)], V * cfg.steps)
    bounds = [(lo / sc, hi / sc) for (lo, hi), sc in zip(_bounds(cfg, V), scale)]

    def scaled(w):
        f, g = problem(w * scale)
        return f, g * scale

    if warm_start is None:
        starts = [_project(z / scale, bounds) for z in _cold_starts(x0, cfg)]
        schedule = cfg.penalty_schedule
    else:
        starts = [_project(np.asarray(warm_start, dtype=float).ravel() / scale, bounds)]
        # a shifted plan is already near-feasible, so skip the softest stage
        schedule = cfg.penalty_schedule[1:] or cfg.penalty_schedule
    best, best_f = None, np.inf
    for w in starts:
        for mu in schedule:
            problem.mu = mu
            res = minimize(scaled, w, jac=True, method="L-BFGS-B", bounds=bounds,
                           options={"maxiter": cfg.max_iterations, "ftol": 1e-10, "gtol": 1e-5})
            w = _project(res.x, bounds)
        f = problem.terms(w * scale, with_grad=False)
        if f < best_f:
            best, best_f = w, f
    z = _project(best * scale, _bounds(cfg, V))
    u = z.reshape(V, cfg.steps, 2)
    trajs = [simulate(s, u[i], cfg.dt) for i, s in enumerate(states)]
    return trajs, z


def plan_joint(initial_i: VehicleState, initial_other: VehicleState, spec_i: CostSpec, spec_other: CostSpec,
               cfg: PlannerConfig = PlannerConfig(), warm_start: Optional[np.ndarray] = None):
    """Jointly optimise both vehicles' controls under the cost ``J_i``.

    Returns ``(traj_i, traj_other)``. Raises :class:`InfeasibleStart` when the
    vehicles already overlap and :class:`NoConvergence` (carrying the plans)
    when a constraint stays violated beyond ``cfg.tolerance``.
    """
    h0 = ellipse_value(initial_i.x - initial_other.x, initial_i.y - initial_other.y, cfg.ellipse_a, cfg.ellipse_b)
    if h0 < 1.0:
        raise InfeasibleStart(f"initial states violate the separation ellipse (value {h0:.3f} < 1)")
    trajs, z = _optimise([initial_i, initial_other], [spec_i, spec_other], cfg, warm_start)
    viol = constraint_violation(trajs, [spec_i, spec_other], cfg)
    if viol > cfg.tolerance:
        raise NoConvergence(f"constraint violation {viol:.2e} above tolerance", plans=(trajs[0], trajs[1], z),
                            violation=viol)
    return trajs[0], trajs[1]


def plan_single(initial: VehicleState, spec: CostSpec, cfg: PlannerConfig = PlannerConfig(),
                warm_start: Optional[np.ndarray] = None) -> Trajectory:
    """Plan for a vehicle alone on the road."""
    trajs, z = _optimise([initial], [spec], cfg, warm_start)
    viol = constraint_violation(trajs, [spec], cfg)
    if viol > cfg.tolerance:
        raise NoConvergence(f"constraint violation {viol:.2e} above tolerance", plans=(trajs[0], z),
                            violation=viol)
    return trajs[0]


# receding horizon

CompletionCheck = Callable[[VehicleState, VehicleState], bool]


@dataclass
class SimOutcome:
    completion_time_row: float
    completion_time_col: float
    collided: bool
    completed: bool
    trajectories: tuple = field(default=(), repr=False)
    failure: str = ""

    @property
    def time(self) -> float:
        return max(self.completion_time_row, self.completion_time_col)


def _shift(z: np.ndarray, V: int, N: int, stride: int) -> np.ndarray:
    u = z.reshape(V, N, 2)
    tail = np.repeat(u[:, -1:, :], stride, axis=1)
    return np.concatenate([u[:, stride:, :], tail], axis=1).ravel()


def run_receding_horizon(initials: Sequence[VehicleState], beliefs, cfg: PlannerConfig = PlannerConfig(),
                         max_time: float = SENTINEL_TIME,
                         completion_checks: Sequence[CompletionCheck] = ()) -> SimOutcome:
    """Two-agent MPC rollout where each agent plans under its own view of the game.

    ``beliefs[k]`` is the ``(row_spec, col_spec)`` pair agent ``k`` (0 = row,
    1 = column) optimises for. Each agent executes its own part of its own
    plan for ``replan_stride`` steps, then both re-plan from the true states.
    The run ends once both completion checks hold at the same time, on
    collision, on planner failure, or at ``max_time``. Failed runs get the
    sentinel time for both agents.
    """
    if max_time <= 0:
        raise ValueError("max_time must be positive")
    if len(completion_checks) != 2:
        raise ValueError("need one completion check per agent")
    cfg_dt = cfg.dt
    total_steps = int(round(max_time / cfg_dt))
    states = [initials[0].as_array(), initials[1].as_array()]
    executed = [[states[0].copy()], [states[1].copy()]]
    controls = [[], []]
    since = [None, None]
    warm = [None, None]
    collided = False
    failure = ""
    done = False
    step = 0
    a2, b2 = cfg.ellipse_a, cfg.ellipse_b
    V, N = 2, cfg.steps

    def fail(reason):
        return SimOutcome(SENTINEL_TIME, SENTINEL_TIME, collided, False, _pack(), reason)

    def _pack():
        return tuple(Trajectory(np.array(executed[k]), np.array(controls[k]).reshape(-1, 2), cfg_dt)
                     for k in range(2))

    while step < total_steps and not done:
        current = [VehicleState.from_array(s) for s in states]
        plans = [None, None]
        cache = {}
        for k in range(2):
            key = tuple(beliefs[k])
            if key in cache:
                plans[k] = cache[key]
                warm[k] = warm[1 - k]
                continue
            try:
                trajs, z = _optimise(current, list(beliefs[k]), cfg, warm[k])
            except Exception as exc:  # pragma: no cover - numerical breakdown
                return fail(f"planner error: {exc}")
            viol = constraint_violation(trajs, list(beliefs[k]), cfg)
            if viol > cfg.tolerance:
                return fail(f"agent {k} planner violation {viol:.2e}")
            plans[k] = trajs
            cache[key] = trajs
            warm[k] = _shift(z, V, N, cfg.replan_stride)
        for s in range(cfg.replan_stride):
            if step >= total_steps:
                break
            for k in range(2):
                u = plans[k][k].controls[s]
                nxt = step_dynamics(VehicleState.from_array(states[k]), ControlInput(*u), cfg_dt)
                states[k] = nxt.as_array()
                executed[k].append(states[k].copy())
                controls[k].append(u.copy())
            step += 1
            d = states[0][:2] - states[1][:2]
            if ellipse_value(d[0], d[1], a2, b2) < 1.0:
                collided = True
                return fail("collision")
            row_s, col_s = (VehicleState.from_array(s) for s in states)
            ok = (completion_checks[0](row_s, col_s), completion_checks[1](col_s, row_s))
            for k in range(2):
                if ok[k]:
                    if since[k] is None:
                        since[k] = step * cfg_dt
                else:
                    since[k] = None
            if ok[0] and ok[1]:
                done = True
                break
    if not done:
        return fail("timeout")
    return SimOutcome(since[0], since[1], False, True, _pack())


def run_single(initial: VehicleState, spec: CostSpec, cfg: PlannerConfig = PlannerConfig(),
               max_time: float = SENTINEL_TIME,
               completion_check: Callable[[VehicleState], bool] = lambda s: False) -> tuple[float, Trajectory]:
    """Receding-horizon run of one vehicle alone; returns (completion time, executed trajectory)."""
    if max_time <= 0:
        raise ValueError("max_time must be positive")
    total_steps = int(round(max_time / cfg.dt))
    state = initial
    states, controls = [state.as_array()], []
    warm = None
    since = None
    step = 0
    while step < total_steps:
        trajs, z = _optimise([state], [spec], cfg, warm)
        warm = _shift(z, 1, cfg.steps, cfg.replan_stride)
        for s in range(cfg.replan_stride):
            if step >= total_steps:
                break
            u = trajs[0].controls[s]
            state = step_dynamics(state, ControlInput(*u), cfg.dt)
            states.append(state.as_array())
            controls.append(u.copy())
            step += 1
            if completion_check(state):
                since = step * cfg.dt if since is None else since
            else:
                since = None
        if since is not None:
            break
    traj = Trajectory(np.array(states), np.array(controls).reshape(-1, 2), cfg.dt)
    return (since if since is not None else SENTINEL_TIME), traj
