"""Reward-shaping models that turn true rewards into effective rewards.

Every model maps a player's own reward ``r_self`` and the other player's
reward ``r_other`` to the effective reward used for decision making:

* baseline: ``r_self``
* pure altruism: ``r_self + a * r_other``
* altruism: ``(1 - a_self) r_self + a_self r_other``
* augmented altruism: steady state of the mutual altruism recursion,
  ``((1 - a_s) r_s + a_s (1 - a_o) r_o) / (1 - a_s a_o)``
* svo: ``cos(t_self) r_self + sin(t_self) r_other`` with angles in [0, pi/2]
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateCoefficients
from .game import BimatrixGame, PlayerId


class Model(str, enum.Enum):
    BASELINE = "baseline"
    PURE_ALTRUISM = "pure"
    ALTRUISM = "altruism"
    AUGMENTED_ALTRUISM = "aug"
    SVO = "svo"

    @classmethod
    def parse(cls, value) -> "Model":
        if isinstance(value, cls):
            return value
        aliases = {
            "pure_altruism": cls.PURE_ALTRUISM,
            "augmented": cls.AUGMENTED_ALTRUISM,
            "augmented_altruism": cls.AUGMENTED_ALTRUISM,
        }
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown model {value!r}; expected one of {names}") from None

    @property
    def upper(self) -> float:
        """Upper end of the coefficient range (angles for SVO)."""
        return math.pi / 2 if self is Model.SVO else 1.0


@dataclass(frozen=True)
class SocialParams:
    """Social coefficients of both players.

    For SVO ``alpha_row``/``alpha_col`` hold the angles in radians. Pure
    altruism shares one coefficient between the players, taken from
    ``alpha_row``; ``alpha_col`` is ignored unless a per-player reading is
    requested from :func:`transform_game`.
    """

    kind: Model = Model.BASELINE
    alpha_row: float = 0.0
    alpha_col: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Model.parse(self.kind))
        hi = self.kind.upper
        for name in ("alpha_row", "alpha_col"):
            v = float(getattr(self, name))
            if not (0.0 <= v <= hi):
                raise ValueError(f"{name}={v} outside [0, {hi:g}] for model {self.kind.value}")
            object.__setattr__(self, name, v)
        if self.kind is Model.AUGMENTED_ALTRUISM and self.alpha_row * self.alpha_col >= 1.0:
            raise DegenerateCoefficients("augmented altruism requires alpha_row * alpha_col < 1")


def transform_pair(r_self, r_other, alpha_self, alpha_other, kind) -> float:
    """Effective reward of one player. Works elementwise on numpy arrays too."""
    kind = Model.parse(kind)
    if kind is Model.BASELINE:
        return r_self
    if kind is Model.PURE_ALTRUISM:
        return r_self + alpha_self * r_other
    if kind is Model.ALTRUISM:
        return (1 - alpha_self) * r_self + alpha_self * r_other
    if kind is Model.AUGMENTED_ALTRUISM:
        denom = 1 - np.multiply(alpha_self, alpha_other)
        if np.any(denom == 0):
            raise DegenerateCoefficients("alpha_self * alpha_other == 1 has no steady state")
        return ((1 - alpha_self) * r_self + alpha_self * (1 - alpha_other) * r_other) / denom
    if kind is Model.SVO:
        return np.cos(alpha_self) * r_self + np.sin(alpha_self) * r_other
    raise ValueError(kind)


def transform_game(game: BimatrixGame, params: SocialParams, *, pure_altruism: str = "shared") -> BimatrixGame:
    """Apply a reward model cell-wise to both players.

    ``pure_altruism`` selects how pure altruism reads the coefficients:
    ``"shared"`` uses ``alpha_row`` for both players, ``"per-player"`` gives
    each player its own coefficient. A cell with a sentinel for either player
    becomes a sentinel for both.
    """
    kind = params.kind
    a_row, a_col = params.alpha_row, params.alpha_col
    if kind is Model.PURE_ALTRUISM:
        if pure_altruism == "shared":
            a_col = a_row
        elif pure_altruism != "per-player":
            raise ValueError("pure_altruism must be 'shared' or 'per-player'")
    r_row = game.payoffs[:, :, PlayerId.ROW]
    r_col = game.payoffs[:, :, PlayerId.COL]
    new_row = transform_pair(r_row, r_col, a_row, a_col, kind)
    new_col = transform_pair(r_col, r_row, a_col, a_row, kind)
    payoffs = np.stack([new_row, new_col], axis=-1)
    dead = game.sentinel.any(axis=-1)
    sentinel = np.stack([dead, dead], axis=-1)
    return BimatrixGame(game.row_actions, game.col_actions, payoffs, sentinel)


def iterate_altruism(r1: float, r2: float, alpha1: float, alpha2: float, iterations: int,
                     tol: float = 1e-12) -> tuple[float, float]:
    """Run the mutual-altruism recursion from ``(r1, r2)``.

    Each step sets ``r1' = (1-a1) r1 + a1 r2_prev`` and
    ``r2' = (1-a2) r2 + a2 r1_prev``. Stops after ``iterations`` steps or once
    successive iterates move by less than ``tol``.
    """
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if alpha1 == 1 and alpha2 == 1:
        raise DegenerateCoefficients("alpha1 = alpha2 = 1 does not converge")
    x1, x2 = float(r1), float(r2)
    for _ in range(iterations):
        n1 = (1 - alpha1) * r1 + alpha1 * x2
        n2 = (1 - alpha2) * r2 + alpha2 * x1
        done = abs(n1 - x1) < tol and abs(n2 - x2) < tol
        x1, x2 = n1, n2
        if done:
            break
    return x1, x2
