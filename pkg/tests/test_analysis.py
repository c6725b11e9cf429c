from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import synthetic_record
from reference import brute_force_spatiotemporal
from kneesim.analysis import (
    compare_stance_moments,
    kinematic_summary,
    spatiotemporal,
    stride_normalize,
    symmetry_index,
    KinematicSummary,
)
from kneesim.core import (
    AnalysisDomainError,
    InsufficientDataError,
    Placement,
    PlacementMismatchError,
)
from kneesim.plant import FootfallRecord, Side, WalkwayRecord


def test_si_perfect_symmetry():
    assert symmetry_index(0.5, 0.5) == 1.0


def test_si_direct_evaluation():
    assert symmetry_index(0.4, 0.5) == 0.8


def test_si_order_invariant():
    assert symmetry_index(0.4, 0.5) == symmetry_index(0.5, 0.4)


def test_si_domain_errors():
    with pytest.raises(AnalysisDomainError):
        symmetry_index(0.0, 0.0)
    with pytest.raises(AnalysisDomainError):
        symmetry_index(-1.0, 2.0)


@given(x=st.floats(1e-6, 1e6), y=st.floats(1e-6, 1e6))
def test_si_bounds_and_symmetry(x, y):
    si = symmetry_index(x, y)
    assert 0.0 <= si <= 1.0
    assert si == symmetry_index(y, x)
    assert symmetry_index(x, x) == 1.0


@given(x=st.floats(1e-6, 1e6), y=st.floats(1e-6, 1e6), p=st.integers(-8, 8))
def test_si_scale_invariance_exact_for_pow2(x, y, p):
    a = 2.0 ** p  # power-of-two scaling is exact in binary floats
    assert symmetry_index(a * x, a * y) == symmetry_index(x, y)


def test_step_time_si_hand_built():
    # left step time 0.62 s, right 0.58 s everywhere -> SI = 0.58/0.62
    record = synthetic_record(step_time_left=0.62, step_time_right=0.58, n_footfalls=12)
    metrics = spatiotemporal(record)
    assert metrics.si["step_time"] == pytest.approx(0.58 / 0.62, abs=1e-12)
    assert metrics.si["step_time"] == pytest.approx(0.9355, abs=1e-4)


def test_symmetric_record_all_si_one():
    record = synthetic_record(n_footfalls=14)
    metrics = spatiotemporal(record)
    for measure, si in metrics.si.items():
        assert si == pytest.approx(1.0, abs=1e-12), measure


def test_stance_swing_partition():
    record = synthetic_record(stance_frac=0.62, n_footfalls=14)
    metrics = spatiotemporal(record)
    for side in Side:
        limb = metrics.per_limb[side]
        assert limb.stance_pct.mean + limb.swing_pct.mean == pytest.approx(100.0, abs=0.1)


def test_speed_and_cadence_from_steady_record():
    record = synthetic_record(step_time_left=0.6, step_time_right=0.6,
                              step_length_left=0.7, step_length_right=0.7,
                              n_footfalls=14)
    metrics = spatiotemporal(record)
    assert metrics.speed_mps == pytest.approx(0.7 / 0.6, rel=1e-12)
    assert metrics.cadence_spm == pytest.approx(60.0 / 0.6, rel=1e-12)


def test_trim_consistency_with_out_of_window_footfalls():
    record = synthetic_record(n_footfalls=12, walkway_length_m=8.0,
                              step_length_left=0.7, step_length_right=0.7)
    base = spatiotemporal(record)
    extra = (
        FootfallRecord(t_contact=-1.0, t_liftoff=-0.3, x=-0.7, y=-0.06, side=Side.RIGHT),
        *record.footfalls,
        FootfallRecord(t_contact=99.0, t_liftoff=99.6, x=9.5, y=0.06, side=Side.LEFT),
    )
    widened = WalkwayRecord(footfalls=extra, walkway_length_m=8.0)
    again = spatiotemporal(widened)
    assert again.speed_mps == base.speed_mps
    assert again.si == base.si
    assert again.n_footfalls == base.n_footfalls


def test_insufficient_steps():
    record = synthetic_record(n_footfalls=6)  # 4 after trim -> 2 per side
    with pytest.raises(InsufficientDataError):
        spatiotemporal(record)
    with pytest.raises(InsufficientDataError):
        spatiotemporal(WalkwayRecord(footfalls=(), walkway_length_m=8.0))


def _random_record(rng: np.random.Generator) -> WalkwayRecord:
    n = int(rng.integers(8, 11))
    step_time = {Side.LEFT: rng.uniform(0.4, 0.9), Side.RIGHT: rng.uniform(0.4, 0.9)}
    step_len = {Side.LEFT: rng.uniform(0.4, 0.9), Side.RIGHT: rng.uniform(0.4, 0.9)}
    stance_frac = rng.uniform(0.5, 0.7)
    footfalls = []
    t, x = 0.0, 0.0
    side = Side.RIGHT if rng.random() < 0.5 else Side.LEFT
    for _ in range(n):
        y = 0.06 if side is Side.LEFT else -0.06
        y += rng.uniform(-0.01, 0.01)
        stride = step_time[Side.LEFT] + step_time[Side.RIGHT]
        footfalls.append(FootfallRecord(
            t_contact=t, t_liftoff=t + stance_frac * stride + rng.uniform(0, 0.05),
            x=x, y=y, side=side,
        ))
        side = side.other
        t += step_time[side] * rng.uniform(0.95, 1.05)
        x += step_len[side] * rng.uniform(0.95, 1.05)
    return WalkwayRecord(footfalls=tuple(footfalls), walkway_length_m=100.0)


def _assert_matches_reference(record: WalkwayRecord):
    metrics = spatiotemporal(record)
    ref = brute_force_spatiotemporal(
        [(f.t_contact, f.t_liftoff, f.x, f.y, f.side.value) for f in record.footfalls],
        record.walkway_length_m,
    )
    assert metrics.speed_mps == pytest.approx(ref["speed"], rel=1e-9)
    assert metrics.cadence_spm == pytest.approx(ref["cadence"], rel=1e-9)
    for side in Side:
        for measure in ("step_time", "step_length", "swing_pct", "stance_pct", "step_width"):
            got = getattr(metrics.per_limb[side], measure)
            want = ref["per_limb"][side.value][measure]
            assert got.mean == pytest.approx(want["mean"], rel=1e-9)
            assert got.sd == pytest.approx(want["sd"], rel=1e-9, abs=1e-12)
            assert got.n == want["n"]
    for measure, si in metrics.si.items():
        assert si == pytest.approx(ref["si"][measure], rel=1e-9)


def test_matches_brute_force_reference_sample():
    rng = np.random.default_rng(7)
    for _ in range(10):
        _assert_matches_reference(_random_record(rng))


def _kin_inputs(n_cycles=5, cycle_s=1.2, rom=60.0, noise_sd=0.0, seed=0):
    dt = 0.004
    t = np.arange(0.0, n_cycles * cycle_s, dt)
    omega = 2.0 * math.pi / cycle_s
    theta = rom / 2.0 * (1.0 - np.cos(omega * t))
    theta_dot = rom / 2.0 * omega * np.sin(omega * t) * 180.0 / math.pi * 0  # deg-based below
    theta_dot = np.gradient(theta, dt)
    m = -20.0 * np.ones_like(t)
    hs = np.arange(0, n_cycles + 1) * cycle_s
    stance = np.ones_like(t, dtype=bool)
    if noise_sd:
        theta = theta + np.random.default_rng(seed).normal(0, noise_sd, theta.size)
    return t, theta, theta_dot, m, hs, stance


def test_kinematic_summary_rom_and_peak():
    t, theta, theta_dot, m, hs, stance = _kin_inputs(rom=60.0, cycle_s=1.2)
    ks = kinematic_summary(t, theta, theta_dot, m, hs, stance, Placement.ABOVE_KNEE)
    assert ks.rom_deg == pytest.approx(60.0, abs=0.01)
    peak_expected = 60.0 / 2.0 * (2.0 * math.pi / 1.2)
    assert ks.peak_velocity_dps == pytest.approx(peak_expected, rel=0.01)
    assert ks.stance_moment_mean_nm == pytest.approx(-20.0, abs=1e-9)
    assert ks.placement is Placement.ABOVE_KNEE


def test_kinematic_summary_constant_signal():
    dt = 0.004
    t = np.arange(0.0, 6.0, dt)
    theta = np.full_like(t, 12.0)
    theta_dot = np.zeros_like(t)
    m = np.zeros_like(t)
    hs = np.array([0.0, 1.5, 3.0, 4.5, 6.0])
    ks = kinematic_summary(t, theta, theta_dot, m, hs, np.ones_like(t, dtype=bool),
                           Placement.BELOW_KNEE)
    assert ks.rom_deg == 0.0
    assert ks.peak_velocity_dps == 0.0


def test_kinematic_summary_insufficient_cycles():
    t = np.arange(0.0, 2.0, 0.004)
    sig = np.zeros_like(t)
    with pytest.raises(InsufficientDataError):
        kinematic_summary(t, sig, sig, sig, np.array([0.0, 1.0, 2.0]), sig > 1,
                          Placement.ABOVE_KNEE)


def test_cross_placement_moment_delta_refused():
    a = KinematicSummary(60.0, 300.0, -7.0, 0.5, Placement.ABOVE_KNEE, 5)
    b = KinematicSummary(60.0, 300.0, -21.0, 0.5, Placement.BELOW_KNEE, 5)
    with pytest.raises(PlacementMismatchError):
        compare_stance_moments(a, b)
    a2 = KinematicSummary(61.0, 310.0, -8.0, 0.5, Placement.ABOVE_KNEE, 5)
    assert compare_stance_moments(a, a2) == pytest.approx(1.0)


def test_stride_normalize_identical_cycles_zero_sd():
    dt = 0.004
    cycle = 1.0
    t = np.arange(0.0, 2 * cycle + dt, dt)
    sig = np.sin(2.0 * math.pi * (t % cycle))
    out = stride_normalize(t, sig, np.array([0.0, cycle, 2 * cycle]))
    assert out.cycles.shape == (2, 101)
    assert np.abs(out.sd).max() <= 1e-9


def test_stride_normalize_matches_analytic_sine():
    dt = 0.004
    cycle = 1.37
    t = np.arange(0.0, cycle + dt, dt)
    sig = np.sin(2.0 * math.pi * t / cycle)
    out = stride_normalize(t, sig, np.array([0.0, cycle]))
    analytic = np.sin(2.0 * math.pi * out.grid_pct / 100.0)
    assert np.abs(out.mean - analytic).max() <= 1e-3


def test_stride_normalize_time_warp_invariance():
    # same shape in phase, different cycle durations -> identical traces
    dt = 0.004

    def cycle_trace(duration):
        t = np.arange(0.0, duration + dt, dt)
        sig = np.sin(2.0 * math.pi * t / duration)
        return stride_normalize(t, sig, np.array([0.0, duration]))

    a = cycle_trace(1.0)
    b = cycle_trace(1.7)
    assert np.abs(a.mean - b.mean).max() <= 1e-3


def test_stride_normalize_too_few_events():
    t = np.arange(0.0, 1.0, 0.004)
    with pytest.raises(InsufficientDataError):
        stride_normalize(t, np.sin(t), np.array([0.0]))
