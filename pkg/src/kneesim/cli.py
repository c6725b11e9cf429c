"""Command line: `simulate` scripted sessions, `analyze` recorded logs,
`serve` a live session for the tuning console.

Exit codes: 0 success, 2 missing/unreadable input files or bad usage,
1 runtime errors (schema violations, insufficient data, bind failures).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .analysis import (
    GaitMetrics,
    KinematicSummary,
    kinematic_summary,
    spatiotemporal,
)
from .config import SessionConfig, load_config, resolve_config_path
from .core import (
    InsufficientDataError,
    KneesimError,
    Placement,
    PlacementMismatchError,
)
from .logs import (
    read_sensor_csv,
    read_state_csv,
    read_walkway_csv,
    write_sensor_csv,
    write_state_csv,
    write_summary_csv,
    write_walkway_csv,
)
from .plant import Side, WalkwayRecord
from .session import SessionResult, load_script, scripted_session

SENSOR_LOG_NAME = "sensor_log.csv"
STATE_LOG_NAME = "state_log.csv"
WALKWAY_NAME = "walkway.csv"
SUMMARY_NAME = "summary.csv"


def _fail(message: str, code: int = 1) -> "int":
    print(f"kneesim: {message}", file=sys.stderr)
    return code


def summary_row(
    participant: str, placement: Placement, condition: str, metrics: GaitMetrics | None
) -> dict[str, object]:
    row: dict[str, object] = {
        "participant": participant,
        "placement": placement.value,
        "condition": condition,
    }
    if metrics is None:
        for key in ("speed_mps", "cadence_spm", "si_step_time", "si_step_length",
                    "si_swing_pct", "si_stance_pct", "si_step_width"):
            row[key] = math.nan
        return row
    row["speed_mps"] = metrics.speed_mps
    row["cadence_spm"] = metrics.cadence_spm
    for measure in ("step_time", "step_length", "swing_pct", "stance_pct", "step_width"):
        row[f"si_{measure}"] = metrics.si[measure]
    return row


def summary_text(
    participant: str,
    placement: Placement,
    condition: str,
    metrics: GaitMetrics | None,
    kin: KinematicSummary | None,
) -> str:
    lines = [f"Gait summary: participant={participant} placement={placement.value} condition={condition}"]
    if metrics is None:
        lines.append("  spatiotemporal: not enough retained footfalls")
    else:
        lines.append(f"  speed    : {metrics.speed_mps:.3f} m/s")
        lines.append(f"  cadence  : {metrics.cadence_spm:.1f} steps/min")
        lines.append(f"  footfalls: {metrics.n_footfalls} retained")
        lines.append("  per-limb mean +/- SD (population), symmetry index min/max")
        header = f"    {'measure':<14}{'left':>18}{'right':>18}{'SI':>8}"
        lines.append(header)
        units = {"step_time": "s", "step_length": "m", "swing_pct": "%",
                 "stance_pct": "%", "step_width": "m"}
        for measure, unit in units.items():
            left = getattr(metrics.per_limb[Side.LEFT], measure)
            right = getattr(metrics.per_limb[Side.RIGHT], measure)
            lines.append(
                f"    {measure + ' (' + unit + ')':<14}"
                f"{left.mean:>10.3f} +/- {left.sd:<5.3f}"
                f"{right.mean:>10.3f} +/- {right.sd:<5.3f}"
                f"{metrics.si[measure]:>8.4f}"
            )
    if kin is not None:
        lines.append("  kinematics over steady cycles "
                     f"(n={kin.n_cycles}, placement={kin.placement.value})")
        lines.append(f"    knee range of motion : {kin.rom_deg:.1f} deg")
        lines.append(f"    peak knee velocity   : {kin.peak_velocity_dps:.0f} deg/s")
        lines.append(
            f"    stance sagittal moment: {kin.stance_moment_mean_nm:.1f} "
            f"+/- {kin.stance_moment_sd_nm:.1f} Nm (placement-specific; not "
            "comparable across placements)"
        )
    return "\n".join(lines) + "\n"


def _session_metrics(
    result: SessionResult, config: SessionConfig
) -> tuple[GaitMetrics | None, KinematicSummary | None]:
    try:
        metrics = spatiotemporal(result.walkway, config.participant)
    except InsufficientDataError:
        metrics = None
    try:
        kin = kinematic_summary(
            result.sensor_log.t,
            result.sensor_log.q,
            result.sensor_log.q_dot,
            result.sensor_log.m_sagittal,
            result.state_log.heel_strike_times(),
            result.state_log.stance_mask(),
            config.placement,
        )
    except InsufficientDataError:
        kin = None
    return metrics, kin


def write_session_outputs(result: SessionResult, config: SessionConfig, out_dir: Path) -> str:
    """Write the four documented output files; returns the text summary."""
    out_dir.mkdir(parents=True, exist_ok=True)
    write_sensor_csv(out_dir / SENSOR_LOG_NAME, result.sensor_log)
    write_state_csv(out_dir / STATE_LOG_NAME, result.state_log)
    write_walkway_csv(
        out_dir / WALKWAY_NAME, result.walkway,
        config.placement.placement, config.participant.id,
    )
    metrics, kin = _session_metrics(result, config)
    row = summary_row(config.participant.id, config.placement.placement, config.label, metrics)
    write_summary_csv(out_dir / SUMMARY_NAME, [row] if metrics is not None else [])
    return summary_text(
        config.participant.id, config.placement.placement, config.label, metrics, kin
    )


def cmd_simulate(args: argparse.Namespace) -> int:
    config_path = resolve_config_path(args.config)
    if not config_path.exists():
        return _fail(f"config file not found: {config_path}", code=2)
    try:
        config = load_config(config_path)
        script = load_script(args.script) if args.script else None
    except FileNotFoundError as exc:
        return _fail(f"file not found: {exc.filename}", code=2)
    except KneesimError as exc:
        return _fail(str(exc))
    result = scripted_session(config, script, duration_s=args.duration, seed=args.seed)
    text = write_session_outputs(result, config, Path(args.out_dir))
    print(text, end="")
    print(f"wrote {SENSOR_LOG_NAME}, {STATE_LOG_NAME}, {WALKWAY_NAME}, {SUMMARY_NAME} "
          f"to {args.out_dir}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    try:
        flag_placement = Placement(args.placement)
    except ValueError:
        return _fail(f"unknown placement {args.placement!r}; use above_knee or below_knee", code=2)
    for path in (args.walkway, args.sensor_log, args.state_log):
        if not Path(path).exists():
            return _fail(f"input file not found: {path}", code=2)
    try:
        walkway, ww_placement, participant = read_walkway_csv(args.walkway)
        sensor = read_sensor_csv(args.sensor_log)
        state = read_state_csv(args.state_log)
        for name, got in (("walkway", ww_placement), ("sensor log", sensor.placement),
                          ("state log", state.placement)):
            if got is not flag_placement:
                raise PlacementMismatchError(
                    f"{name} header says placement={got.value} but --placement is "
                    f"{flag_placement.value}; refusing to mix placements"
                )
        metrics = spatiotemporal(walkway, trim=not args.no_trim)
        kin = kinematic_summary(
            sensor.t, sensor.q, sensor.q_dot, sensor.m_sagittal,
            state.heel_strike_times(), state.stance_mask(), flag_placement,
        )
    except KneesimError as exc:
        return _fail(str(exc))
    participant = participant or sensor.participant_id
    text = summary_text(participant, flag_placement, args.condition, metrics, kin)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_summary_csv(out_dir / SUMMARY_NAME, [
        summary_row(participant, flag_placement, args.condition, metrics)
    ])
    (out_dir / "summary.txt").write_text(text)
    print(text, end="")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import LiveSession  # local import keeps --help snappy

    config_path = resolve_config_path(args.config)
    if not config_path.exists():
        return _fail(f"config file not found: {config_path}", code=2)
    try:
        config = load_config(config_path)
        script = load_script(args.script) if args.script else None
    except KneesimError as exc:
        return _fail(str(exc))
    session = LiveSession(
        config,
        script=script,
        seed=args.seed,
        time_scale=args.time_scale,
        duration_s=args.duration,
        telemetry_hz=args.telemetry_hz,
    )
    print(f"serving ws://{args.host}:{args.port} "
          f"(time_scale={args.time_scale}, telemetry={args.telemetry_hz} Hz)",
          flush=True)
    try:
        session.run(host=args.host, port=args.port,
                    out_dir=Path(args.out_dir) if args.out_dir else None)
    except OSError as exc:
        return _fail(f"cannot bind {args.host}:{args.port}: {exc}")
    except KeyboardInterrupt:
        session.stop()
        print("stopped")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kneesim",
        description="Powered knee impedance control: simulate, analyze, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scripted closed-loop session")
    sim.add_argument("--config", required=True, help="session config YAML")
    sim.add_argument("--script", help="key-fob event script (t, request_mode, <mode>)")
    sim.add_argument("--duration", type=float, default=60.0, help="seconds of simulated time")
    sim.add_argument("--seed", type=int, default=None, help="override the config noise seed")
    sim.add_argument("--out-dir", default="out", help="directory for the four output files")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="compute gait metrics from recorded logs")
    ana.add_argument("--walkway", required=True)
    ana.add_argument("--sensor-log", required=True)
    ana.add_argument("--state-log", required=True)
    ana.add_argument("--placement", required=True, help="above_knee or below_knee")
    ana.add_argument("--condition", default="recorded", help="condition label for the summary row")
    ana.add_argument("--no-trim", action="store_true",
                     help="keep the first and last retained footfalls")
    ana.add_argument("--out-dir", default="out")
    ana.set_defaults(func=cmd_analyze)

    srv = sub.add_parser("serve", help="live session with telemetry and command intake")
    srv.add_argument("--config", required=True)
    srv.add_argument("--script", help="optional scripted events on top of live commands")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8765)
    srv.add_argument("--duration", type=float, default=None,
                     help="simulated seconds to run (default: until interrupted)")
    srv.add_argument("--seed", type=int, default=None)
    srv.add_argument("--time-scale", type=float, default=1.0,
                     help="simulated seconds per wall second; 0 = unthrottled")
    srv.add_argument("--telemetry-hz", type=float, default=25.0)
    srv.add_argument("--out-dir", default=None, help="also write the session logs here")
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
