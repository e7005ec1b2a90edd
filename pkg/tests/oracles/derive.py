"""Independent oracle for frozen reference values.

Area of Conflict is obtained by integrating, at 30 significant digits, the
length of the conflict set in the second coefficient for each value of the
first, using only the region descriptions (thresholds and band edges).
Altruism fixed points are solved exactly over the rationals. Nothing here
imports the package under test.

Run ``python3 tests/oracles/derive.py`` to rewrite ``frozen.json``.
"""

import json
from fractions import Fraction
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30
OUT = Path(__file__).with_name("frozen.json")

GAPS = [(1, 1), (2, 1), (2, 0.5), (0.4, 1), (2.5, 1), (3, 1), (2, 3.5), (10, 3.5), (0.1, 10), (7.3, 0.25)]


def _clip(v, lo, hi):
    return max(lo, min(hi, v))


def conflict_length(model, A, B, a1):
    """Measure of {a2 in range : (a1, a2) in conflict} for one a1."""
    A, B = mp.mpf(A), mp.mpf(B)
    if model == "baseline":
        return mp.mpf(1)
    if model in ("pure", "altruism", "svo"):
        if model == "pure":
            t1, t2, top = A / B, B / A, mp.mpf(1)
        elif model == "altruism":
            t1, t2, top = A / (A + B), B / (A + B), mp.mpf(1)
        else:
            t1, t2, top = mp.atan(A / B), mp.atan(B / A), mp.pi / 2
        t2 = _clip(t2, 0, top)
        # same side of both thresholds
        return (top - t2) if a1 > t1 else t2
    if model == "aug":
        if a1 <= 0 or a1 >= 1:
            return mp.mpf(0)
        lower = 1 - (1 - a1) / a1 * A / B
        upper = B / (B + (1 - a1) * A)
        return max(mp.mpf(0), _clip(upper, 0, 1) - _clip(lower, 0, 1))
    raise ValueError(model)


def breakpoints(model, A, B):
    A, B = mp.mpf(A), mp.mpf(B)
    if model == "pure":
        return [A / B]
    if model == "altruism":
        return [A / (A + B)]
    if model == "svo":
        return [mp.atan(A / B)]
    if model == "aug":
        # the lower edge crosses 0 at a1 = A / (A + B)
        return [A / (A + B)]
    return []


def aoc(model, A, B):
    top = mp.pi / 2 if model == "svo" else mp.mpf(1)
    pts = [mp.mpf(0)] + sorted(p for p in breakpoints(model, A, B) if 0 < p < top) + [top]
    area = mp.quad(lambda a: conflict_length(model, A, B, a), pts)
    return area / top ** 2


def fixed_point(r1, r2, a1, a2):
    """Solve x1 = (1-a1) r1 + a1 x2, x2 = (1-a2) r2 + a2 x1 exactly."""
    r1, r2, a1, a2 = (Fraction(v) for v in (r1, r2, a1, a2))
    x1 = ((1 - a1) * r1 + a1 * (1 - a2) * r2) / (1 - a1 * a2)
    x2 = (1 - a2) * r2 + a2 * x1
    return x1, x2


FIXED = [(1, 0, "1/2", "1/2"), (3, -2, "9/10", "1/5"), (-7, 4, "99/100", "99/100"), (2, 5, 0, "3/4")]


def derive():
    out = {"aoc": {}, "fixed_point": {}, "two_ln2_minus_1": mp.nstr(2 * mp.log(2) - 1, 20)}
    for model in ("baseline", "pure", "altruism", "aug", "svo"):
        out["aoc"][model] = {f"{A},{B}": float(aoc(model, A, B)) for A, B in GAPS}
    for r1, r2, a1, a2 in FIXED:
        x1, x2 = fixed_point(r1, r2, a1, a2)
        out["fixed_point"][f"{r1},{r2},{a1},{a2}"] = [float(x1), float(x2)]
    return out


if __name__ == "__main__":
    OUT.write_text(json.dumps(derive(), indent=2, sort_keys=True) + "\n")
    print(f"wrote {OUT}")
