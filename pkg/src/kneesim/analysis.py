"""Gait outcome measures from walkway records and on-board sensor logs.

Spatiotemporal measures are computed per limb over the retained walkway
footfalls (first and last steps removed), symmetry is the min/max ratio of
the left/right means, and kinematic summaries (range of motion, peak
angular velocity, stance sagittal moment) are computed over steady
heel-strike-delimited cycles. Stance moments carry the placement tag and
cross-placement moment deltas are refused: the lever arm differs between
placements, so the numbers are not comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AnalysisDomainError,
    InsufficientDataError,
    ParticipantProfile,
    Placement,
    PlacementConfig,
    PlacementMismatchError,
)
from .plant import FootfallRecord, Side, WalkwayRecord

MEASURES = ("step_time", "step_length", "swing_pct", "stance_pct", "step_width")


def symmetry_index(x_l: float, x_r: float) -> float:
    """min/max ratio of a left/right measure; 1 means perfect symmetry.

    Defined for non-negative inputs with at least one positive value.
    """
    if x_l < 0 or x_r < 0:
        raise AnalysisDomainError(f"symmetry index undefined for negative inputs ({x_l}, {x_r})")
    hi = max(x_l, x_r)
    if hi <= 0:
        raise AnalysisDomainError("symmetry index undefined when both measures are zero")
    return min(x_l, x_r) / hi


@dataclass(frozen=True)
class MeanSd:
    mean: float
    sd: float
    n: int


@dataclass(frozen=True)
class LimbStats:
    step_time: MeanSd
    step_length: MeanSd
    swing_pct: MeanSd
    stance_pct: MeanSd
    step_width: MeanSd


@dataclass(frozen=True)
class GaitMetrics:
    speed_mps: float
    cadence_spm: float
    per_limb: dict[Side, LimbStats]
    si: dict[str, float]
    n_footfalls: int
    participant_id: str = ""


def _mean_sd(values: list[float], ddof: int = 0) -> MeanSd:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return MeanSd(math.nan, math.nan, 0)
    sd = float(arr.std(ddof=ddof)) if arr.size > ddof else math.nan
    return MeanSd(float(arr.mean()), sd, int(arr.size))


def retained_footfalls(record: WalkwayRecord, trim: bool = True) -> list[FootfallRecord]:
    """Footfalls inside the walkway window, optionally with the first and
    last removed, ordered by contact time."""
    inside = [
        ff for ff in record.footfalls
        if 0.0 <= ff.x <= record.walkway_length_m
    ]
    inside.sort(key=lambda ff: ff.t_contact)
    if trim and len(inside) >= 2:
        inside = inside[1:-1]
    return inside


def spatiotemporal(
    record: WalkwayRecord,
    participant: ParticipantProfile | None = None,
    trim: bool = True,
    ddof: int = 0,
) -> GaitMetrics:
    """Per-limb spatiotemporal means/SDs, walking speed, cadence, and the
    symmetry index of each measure.

    A step belongs to the limb it ends on: step time and length are the
    time/forward distance from the preceding contralateral contact, step
    width the lateral offset between the same pair. Stance and swing
    percentages come from same-side stride segmentation. Speed is retained
    forward distance over elapsed contact time; population SD by default.
    """
    steps = retained_footfalls(record, trim=trim)
    per_side_counts = {s: sum(1 for ff in steps if ff.side is s) for s in Side}
    if min(per_side_counts.values(), default=0) < 3:
        raise InsufficientDataError(
            "need at least 3 footfalls per side after trimming, got "
            f"left={per_side_counts.get(Side.LEFT, 0)} right={per_side_counts.get(Side.RIGHT, 0)}"
        )

    values: dict[Side, dict[str, list[float]]] = {
        s: {m: [] for m in MEASURES} for s in Side
    }
    for prev, cur in zip(steps, steps[1:]):
        if prev.side is cur.side:
            continue  # missed contralateral step; skip the pair
        values[cur.side]["step_time"].append(cur.t_contact - prev.t_contact)
        values[cur.side]["step_length"].append(cur.x - prev.x)
        values[cur.side]["step_width"].append(abs(cur.y - prev.y))
    by_side = {s: [ff for ff in steps if ff.side is s] for s in Side}
    for side, rows in by_side.items():
        for a, b in zip(rows, rows[1:]):
            stride = b.t_contact - a.t_contact
            if stride <= 0:
                continue
            stance = a.t_liftoff - a.t_contact
            values[side]["stance_pct"].append(100.0 * stance / stride)
            values[side]["swing_pct"].append(100.0 * (stride - stance) / stride)

    per_limb = {
        side: LimbStats(**{m: _mean_sd(vals[m], ddof=ddof) for m in MEASURES})
        for side, vals in values.items()
    }
    si = {
        m: symmetry_index(
            per_limb[Side.LEFT].__getattribute__(m).mean,
            per_limb[Side.RIGHT].__getattribute__(m).mean,
        )
        for m in MEASURES
    }

    elapsed = steps[-1].t_contact - steps[0].t_contact
    if elapsed <= 0:
        raise InsufficientDataError("retained footfalls span no elapsed time")
    speed = (steps[-1].x - steps[0].x) / elapsed
    cadence = (len(steps) - 1) / elapsed * 60.0

    return GaitMetrics(
        speed_mps=speed,
        cadence_spm=cadence,
        per_limb=per_limb,
        si=si,
        n_footfalls=len(steps),
        participant_id=participant.id if participant is not None else "",
    )


@dataclass(frozen=True)
class KinematicSummary:
    """Range of motion, peak velocity, and stance moment over steady cycles.

    Placement-tagged; use compare_stance_moments to difference two
    summaries, which refuses mismatched placements.
    """

    rom_deg: float
    peak_velocity_dps: float
    stance_moment_mean_nm: float
    stance_moment_sd_nm: float
    placement: Placement
    n_cycles: int


def kinematic_summary(
    t: np.ndarray,
    theta: np.ndarray,
    theta_dot: np.ndarray,
    m_sagittal: np.ndarray,
    heel_strike_times: np.ndarray,
    stance_mask: np.ndarray,
    placement: PlacementConfig | Placement,
) -> KinematicSummary:
    """Summarize knee kinematics over steady heel-strike-delimited cycles.

    The first and last cycles are dropped; needs at least 3 full cycles.
    Range of motion and peak |velocity| are per-cycle values averaged over
    the steady cycles; the stance moment statistics cover stance-phase
    ticks inside the steady span.
    """
    placement_tag = placement.placement if isinstance(placement, PlacementConfig) else placement
    hs = np.asarray(heel_strike_times, dtype=float)
    if hs.size - 1 < 3:
        raise InsufficientDataError(
            f"need at least 3 full gait cycles (4 heel strikes), got {max(hs.size - 1, 0)} cycles"
        )
    steady = [(hs[i], hs[i + 1]) for i in range(1, hs.size - 2)]
    roms, peaks = [], []
    for start, end in steady:
        mask = (t >= start) & (t < end)
        if not mask.any():
            continue
        roms.append(float(theta[mask].max() - theta[mask].min()))
        peaks.append(float(np.abs(theta_dot[mask]).max()))
    if not roms:
        raise InsufficientDataError("no samples inside the steady cycles")
    span = (t >= steady[0][0]) & (t < steady[-1][1])
    stance = span & np.asarray(stance_mask, dtype=bool)
    if stance.any():
        m_mean = float(m_sagittal[stance].mean())
        m_sd = float(m_sagittal[stance].std())
    else:
        m_mean, m_sd = math.nan, math.nan
    return KinematicSummary(
        rom_deg=float(np.mean(roms)),
        peak_velocity_dps=float(np.mean(peaks)),
        stance_moment_mean_nm=m_mean,
        stance_moment_sd_nm=m_sd,
        placement=placement_tag,
        n_cycles=len(roms),
    )


def compare_stance_moments(a: KinematicSummary, b: KinematicSummary) -> float:
    """Difference of mean stance moments for two summaries of the SAME
    placement; refuses cross-placement comparison (different lever arms)."""
    if a.placement is not b.placement:
        raise PlacementMismatchError(
            "stance sagittal moments are not comparable across placements "
            f"({a.placement.value} vs {b.placement.value}): the load-cell lever arm differs"
        )
    return a.stance_moment_mean_nm - b.stance_moment_mean_nm


@dataclass(frozen=True)
class StrideNormalized:
    """Per-cycle traces resampled to a 0..100% grid with pointwise mean/SD."""

    grid_pct: np.ndarray  # 101 points, 0..100
    cycles: np.ndarray  # shape (n_cycles, 101)
    mean: np.ndarray
    sd: np.ndarray


def stride_normalize(
    t: np.ndarray,
    signal: np.ndarray,
    heel_strike_times: np.ndarray,
    n_points: int = 101,
) -> StrideNormalized:
    """Time-normalize each heel-strike-to-heel-strike cycle to a percent
    grid by linear interpolation."""
    t = np.asarray(t, dtype=float)
    signal = np.asarray(signal, dtype=float)
    hs = np.asarray(heel_strike_times, dtype=float)
    if hs.size < 2:
        raise InsufficientDataError("need at least 2 heel strikes to segment a cycle")
    grid = np.linspace(0.0, 100.0, n_points)
    rows = []
    for start, end in zip(hs, hs[1:]):
        if end <= start:
            continue
        sample_t = start + (grid / 100.0) * (end - start)
        rows.append(np.interp(sample_t, t, signal))
    if not rows:
        raise InsufficientDataError("no valid cycles between the heel strikes")
    cycles = np.vstack(rows)
    return StrideNormalized(
        grid_pct=grid,
        cycles=cycles,
        mean=cycles.mean(axis=0),
        sd=cycles.std(axis=0),
    )
