"""Area of Conflict: closed forms, region predicates and an equilibrium oracle.

All quantities are for a 2x2 game whose row player prefers cell (A2, B1)
and column player prefers (A1, B2). Only the preference margins
``A = r_row(A2,B1) - r_row(A1,B2)`` and ``B = r_col(A1,B2) - r_col(A2,B1)``
matter. Coefficients live in [0, 1]^2, SVO angles in [0, pi/2]^2.

Two independent routes are provided. The analytic route uses the
closed-form region boundaries; the oracle route transforms a concrete
game, solves both Stackelberg problems and checks whether they disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .game import BimatrixGame, PlayerId, _follower_response, _key, detect_conflict, reward_gaps
from .transforms import Model, SocialParams, transform_game, transform_pair

HALF_PI = math.pi / 2
# relative size under which two effective rewards count as tied
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class RewardGaps:
    A: float
    B: float

    def __post_init__(self):
        for name in ("A", "B"):
            v = float(getattr(self, name))
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a finite positive number, got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_game(cls, game: BimatrixGame) -> "RewardGaps":
        return cls(*reward_gaps(game))


@dataclass(frozen=True)
class AoCResult:
    model: Model
    gaps: RewardGaps
    analytic: float
    oracle_estimate: Optional[float] = None
    oracle_resolution: Optional[int] = None
    boundary_cells: int = 0


@dataclass(frozen=True, eq=False)
class ConflictRaster:
    """Predicate evaluated at cell centres.

    ``cells[i, j]`` refers to the point with first coefficient
    ``centers[j]`` and second coefficient ``centers[i]``.
    """

    model: Model
    gaps: RewardGaps
    resolution: int
    cells: np.ndarray = field(repr=False)

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.resolution) + 0.5) / self.resolution * self.model.upper

    @property
    def fraction(self) -> float:
        return float(self.cells.mean())


def _gaps(gaps) -> RewardGaps:
    if isinstance(gaps, RewardGaps):
        return gaps
    return RewardGaps(*gaps)


def aoc_analytic(model, gaps) -> float:
    """Closed-form Area of Conflict of a reward model."""
    model = Model.parse(model)
    g = _gaps(gaps)
    A, B = g.A, g.B
    if model is Model.BASELINE:
        value = 1.0
    elif model is Model.PURE_ALTRUISM:
        value = min(A / B, B / A)
    elif model is Model.ALTRUISM:
        value = 2 * A * B / (A + B) ** 2
    elif model is Model.AUGMENTED_ALTRUISM:
        # written as (B/A) ln((A+B)/B) + (A/B) ln((A+B)/A) - 1 for accuracy;
        # algebraically identical to the expanded ln(A+B)(A/B + B/A) form
        value = (B / A) * math.log1p(A / B) + (A / B) * math.log1p(B / A) - 1
    elif model is Model.SVO:
        p1 = max(0.0, min(HALF_PI, math.atan(A / B)))
        p2 = max(0.0, min(HALF_PI, math.atan(B / A)))
        value = (p1 * p2 + (HALF_PI - p1) * (HALF_PI - p2)) / HALF_PI ** 2
    else:
        raise ValueError(model)
    return min(1.0, max(0.0, value))


def aug_altruism_bounds(gaps, alpha1):
    """Lower and upper bound on the second coefficient of the conflict band."""
    g = _gaps(gaps)
    alpha1 = np.asarray(alpha1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = 1 - (1 - alpha1) / alpha1 * g.A / g.B
    upper = g.B / (g.B + (1 - alpha1) * g.A)
    return lower, upper


def conflict_predicate(model, gaps, alpha1, alpha2):
    """Whether ``(alpha1, alpha2)`` lies in the model's conflict region.

    Accepts scalars or broadcastable arrays. For SVO the coefficients are
    angles. Points exactly on a boundary count as no conflict.
    """
    model = Model.parse(model)
    g = _gaps(gaps)
    a1 = np.asarray(alpha1, dtype=float)
    a2 = np.asarray(alpha2, dtype=float)
    A, B = g.A, g.B
    if model is Model.BASELINE:
        out = np.ones(np.broadcast(a1, a2).shape, dtype=bool)
    elif model in (Model.PURE_ALTRUISM, Model.ALTRUISM, Model.SVO):
        if model is Model.PURE_ALTRUISM:
            t1, t2 = A / B, B / A
        elif model is Model.ALTRUISM:
            t1, t2 = A / (A + B), B / (A + B)
        else:
            t1, t2 = math.atan(A / B), math.atan(B / A)
        out = ((a1 > t1) & (a2 > t2)) | ((a1 < t1) & (a2 < t2))
    elif model is Model.AUGMENTED_ALTRUISM:
        inside = (a1 > 0) & (a1 < 1)
        safe = np.where(inside, a1, 0.5)
        lower, upper = aug_altruism_bounds(g, safe)
        out = inside & (lower < a2) & (a2 < upper)
    else:
        raise ValueError(model)
    if out.ndim == 0:
        return bool(out)
    return out


def canonical_game(gaps) -> BimatrixGame:
    """2x2 game realising the gaps: anti-diagonal (A, 0) and (0, B), diagonal at -1."""
    g = _gaps(gaps)
    low = min(g.A, 0.0, g.B) - 1.0
    return BimatrixGame.from_pairs(
        [[(low, low), (0.0, g.B)],
         [(g.A, 0.0), (low, low)]])


def _params(model, alpha1, alpha2) -> SocialParams:
    return SocialParams(Model.parse(model), alpha1, alpha2)


def _near(k1, k2, tol) -> bool:
    if k1[0] != k2[0]:
        return False
    return abs(k1[1] - k2[1]) <= tol


def _top_two_tied(keys, tol) -> bool:
    if len(keys) < 2:
        return False
    ordered = sorted(keys, reverse=True)
    return _near(ordered[0], ordered[1], tol)


def _has_tie(game: BimatrixGame) -> bool:
    """True when a decision of either Stackelberg solve rests on a near tie.

    Checks the follower's choice for every leader action and the leader's
    final choice, for both leader assignments.
    """

    scale = max(1.0, float(np.abs(game.payoffs).max()))
    tol = TIE_RTOL * scale
    for leader in (PlayerId.ROW, PlayerId.COL):
        follower = leader.other
        leader_keys = []
        for a in range(game.shape[leader]):
            cells = [(a, k) if leader is PlayerId.ROW else (k, a) for k in range(game.shape[follower])]
            if _top_two_tied([_key(game, *c, follower) for c in cells], tol):
                return True
            r = _follower_response(game, leader, a)
            leader_keys.append(_key(game, *cells[r], leader))
        if _top_two_tied(leader_keys, tol):
            return True
    return False


def equilibrium_conflict_oracle(game: BimatrixGame, model, alpha1, alpha2) -> Optional[bool]:
    """Conflict flag from transforming ``game`` and solving both Stackelberg games.

    Pure altruism is read per player. Returns ``None`` when the transformed
    game contains a reward tie, where the answer depends on tie-breaking.
    """
    reward_gaps(game)
    transformed = transform_game(game, _params(model, alpha1, alpha2), pure_altruism="per-player")
    if _has_tie(transformed):
        return None
    return detect_conflict(transformed).in_conflict


def _batch_stackelberg_2x2(r_row, r_col):
    """Vectorised Stackelberg solve for a batch of finite 2x2 games.

    ``r_row``/``r_col`` have shape ``(n, 2, 2)``. Returns the row-led and
    column-led equilibrium cells as flat indices ``2*m + k`` plus a mask of
    games where some decision of either solve rests on a near tie.
    """
    scale = np.maximum(1.0, np.maximum(np.abs(r_row).max(axis=(1, 2)), np.abs(r_col).max(axis=(1, 2))))
    tol = TIE_RTOL * scale
    tie = np.zeros(r_row.shape[0], dtype=bool)

    # row leads; in row m the column player compares its two cells
    lead_vals = []
    picks = []
    for m in range(2):
        d_follow = r_col[:, m, 1] - r_col[:, m, 0]
        d_lead = r_row[:, m, 1] - r_row[:, m, 0]
        tie |= np.abs(d_follow) <= tol
        pick = (d_follow > 0) | ((d_follow == 0) & (d_lead > 0))
        picks.append(pick)
        lead_vals.append(np.where(pick, r_row[:, m, 1], r_row[:, m, 0]))
    d = lead_vals[1] - lead_vals[0]
    tie |= np.abs(d) <= tol
    m_star = d > 0
    k_star = np.where(m_star, picks[1], picks[0])
    row_led = 2 * m_star + k_star

    # column leads
    lead_vals = []
    picks = []
    for k in range(2):
        d_follow = r_row[:, 1, k] - r_row[:, 0, k]
        d_lead = r_col[:, 1, k] - r_col[:, 0, k]
        tie |= np.abs(d_follow) <= tol
        pick = (d_follow > 0) | ((d_follow == 0) & (d_lead > 0))
        picks.append(pick)
        lead_vals.append(np.where(pick, r_col[:, 1, k], r_col[:, 0, k]))
    d = lead_vals[1] - lead_vals[0]
    tie |= np.abs(d) <= tol
    k_star = d > 0
    m_star = np.where(k_star, picks[1], picks[0])
    col_led = 2 * m_star + k_star
    return row_led, col_led, tie


def batch_conflict_oracle(gaps, model, alpha1, alpha2):
    """Oracle verdicts for arrays of coefficient points on the canonical game.

    Returns ``(conflict, boundary)`` boolean arrays. This is the vectorised
    counterpart of :func:`equilibrium_conflict_oracle`.
    """
    model = Model.parse(model)
    game = canonical_game(gaps)
    a1 = np.asarray(alpha1, dtype=float).ravel()
    a2 = np.asarray(alpha2, dtype=float).ravel()
    base_row = game.payoffs[:, :, 0][None]
    base_col = game.payoffs[:, :, 1][None]
    c1 = a1[:, None, None]
    c2 = a2[:, None, None]
    if model is Model.AUGMENTED_ALTRUISM and np.any(a1 * a2 >= 1):
        raise ValueError("augmented altruism requires alpha1 * alpha2 < 1")
    r_row = transform_pair(base_row, base_col, c1, c2, model)
    r_col = transform_pair(base_col, base_row, c2, c1, model)
    r_row = np.broadcast_to(r_row, (a1.size, 2, 2))
    r_col = np.broadcast_to(r_col, (a1.size, 2, 2))
    row_led, col_led, tie = _batch_stackelberg_2x2(r_row, r_col)
    return row_led != col_led, tie


def aoc_oracle(model, gaps, resolution: int, *, chunk: int = 250_000, return_boundary: bool = False):
    """Fraction of grid cell centres where the equilibrium oracle reports conflict.

    Cells flagged as ties are left out of both the count and the total.
    """
    if resolution < 10:
        raise ValueError("resolution must be >= 10")
    model = Model.parse(model)
    g = _gaps(gaps)
    centers = (np.arange(resolution) + 0.5) / resolution * model.upper
    hits = 0
    total = 0
    boundary = 0
    a1_all, a2_all = np.meshgrid(centers, centers, indexing="xy")
    a1_all = a1_all.ravel()
    a2_all = a2_all.ravel()
    for start in range(0, a1_all.size, chunk):
        conflict, tie = batch_conflict_oracle(g, model, a1_all[start:start + chunk], a2_all[start:start + chunk])
        keep = ~tie
        hits += int(np.count_nonzero(conflict & keep))
        total += int(np.count_nonzero(keep))
        boundary += int(np.count_nonzero(tie))
    estimate = hits / total if total else float("nan")
    if return_boundary:
        return estimate, boundary
    return estimate


def area_of_conflict(model, gaps, oracle_resolution: Optional[int] = None) -> AoCResult:
    model = Model.parse(model)
    g = _gaps(gaps)
    analytic = aoc_analytic(model, g)
    if oracle_resolution is None:
        return AoCResult(model, g, analytic)
    est, nb = aoc_oracle(model, g, oracle_resolution, return_boundary=True)
    return AoCResult(model, g, analytic, est, oracle_resolution, nb)


def rasterize_region(model, gaps, resolution: int) -> ConflictRaster:
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    model = Model.parse(model)
    g = _gaps(gaps)
    centers = (np.arange(resolution) + 0.5) / resolution * model.upper
    a1, a2 = np.meshgrid(centers, centers, indexing="xy")
    cells = np.asarray(conflict_predicate(model, g, a1, a2), dtype=bool)
    return ConflictRaster(model, g, resolution, cells)


def aoc_curve(model, B: float, A_range: tuple[float, float], samples: int) -> list[tuple[float, float]]:
    lo, hi = A_range
    if not lo > 0:
        raise ValueError("A range must start above 0")
    if hi < lo:
        raise ValueError("A range upper end below lower end")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    model = Model.parse(model)
    grid = np.linspace(lo, hi, samples) if samples > 1 else np.array([lo])
    return [(float(a), aoc_analytic(model, RewardGaps(float(a), B))) for a in grid]
