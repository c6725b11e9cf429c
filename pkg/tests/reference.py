"""Independent brute-force recomputation of the spatiotemporal measures.

Deliberately naive: plain loops, plain floats, no shared code with the
library. Used as the oracle for the analysis pipeline.
"""

from __future__ import annotations

import math


def _mean(xs):
    return sum(xs) / len(xs) if xs else float("nan")


def _sd(xs):
    if not xs:
        return float("nan")
    m = _mean(xs)
    return math.sqrt(sum((x - m) ** 2 for x in xs) / len(xs))


def brute_force_spatiotemporal(footfalls, walkway_length, trim=True):
    """footfalls: iterable of (t_contact, t_liftoff, x, y, side) with side
    'left'/'right'. Returns a nested plain-dict result."""
    inside = [f for f in footfalls if 0.0 <= f[2] <= walkway_length]
    inside.sort(key=lambda f: f[0])
    if trim and len(inside) >= 2:
        inside = inside[1:-1]

    counts = {"left": 0, "right": 0}
    for f in inside:
        counts[f[4]] += 1
    if counts["left"] < 3 or counts["right"] < 3:
        raise ValueError("insufficient steps")

    values = {
        side: {k: [] for k in ("step_time", "step_length", "swing_pct", "stance_pct", "step_width")}
        for side in ("left", "right")
    }
    for i in range(1, len(inside)):
        prev, cur = inside[i - 1], inside[i]
        if prev[4] == cur[4]:
            continue
        values[cur[4]]["step_time"].append(cur[0] - prev[0])
        values[cur[4]]["step_length"].append(cur[2] - prev[2])
        values[cur[4]]["step_width"].append(abs(cur[3] - prev[3]))
    for side in ("left", "right"):
        rows = [f for f in inside if f[4] == side]
        for a, b in zip(rows, rows[1:]):
            stride = b[0] - a[0]
            if stride <= 0:
                continue
            stance = a[1] - a[0]
            values[side]["stance_pct"].append(100.0 * stance / stride)
            values[side]["swing_pct"].append(100.0 * (stride - stance) / stride)

    result = {"per_limb": {}, "si": {}}
    for side in ("left", "right"):
        result["per_limb"][side] = {
            k: {"mean": _mean(v), "sd": _sd(v), "n": len(v)} for k, v in values[side].items()
        }
    for measure in ("step_time", "step_length", "swing_pct", "stance_pct", "step_width"):
        l = result["per_limb"]["left"][measure]["mean"]
        r = result["per_limb"]["right"][measure]["mean"]
        result["si"][measure] = min(l, r) / max(l, r)

    elapsed = inside[-1][0] - inside[0][0]
    result["speed"] = (inside[-1][2] - inside[0][2]) / elapsed
    result["cadence"] = (len(inside) - 1) / elapsed * 60.0
    result["n_footfalls"] = len(inside)
    return result
