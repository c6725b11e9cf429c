"""Session configuration: one YAML file defines a full run.

Placement, device limits, participant, impedance tables, state-machine
thresholds (per placement), gait profiles, plant extras, and the noise
seed. `load_config` validates every invariant and names the violated field;
`save_config` round-trips losslessly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml

from .core import (
    ActivityMode,
    ConfigError,
    DeviceSpec,
    GaitPhase,
    ParticipantProfile,
    Placement,
    PlacementConfig,
    ValidationError,
    phases_for_mode,
)
from .fsm import GaitRules, SitStandTiming, build_rules
from .impedance import Cell, ImpedanceParams, ParamTable, default_param_table
from .plant import DEFAULT_LEVERAGE, GaitProfile, NoiseModel, Side, default_profiles

CONFIG_SCHEMA = "kneesim/session/v1"
CONFIG_DIR_ENV = "KNEESIM_CONFIG_DIR"


@dataclass(frozen=True)
class LoadThresholds:
    heel_strike_bw: float = 0.20
    toe_off_bw: float = 0.10

    def __post_init__(self) -> None:
        if not 0 < self.toe_off_bw < self.heel_strike_bw:
            raise ValidationError(
                "thresholds must satisfy 0 < toe_off_bw < heel_strike_bw, got "
                f"toe_off={self.toe_off_bw} heel_strike={self.heel_strike_bw}"
            )


@dataclass(frozen=True)
class FsmConfig:
    dwell_s: float = 0.06
    thresholds: dict[Placement, LoadThresholds] = field(
        default_factory=lambda: {p: LoadThresholds() for p in Placement}
    )
    sit_stand: SitStandTiming = SitStandTiming()

    def __post_init__(self) -> None:
        if not self.dwell_s > 0:
            raise ValidationError("fsm.dwell_s must be > 0")


@dataclass
class SessionConfig:
    label: str = "session"
    placement: PlacementConfig = field(default_factory=lambda: PlacementConfig(Placement.ABOVE_KNEE))
    seed: int = 0
    initial_mode: ActivityMode = ActivityMode.LEVEL_WALK
    device: DeviceSpec = field(default_factory=DeviceSpec)
    participant: ParticipantProfile = field(default_factory=ParticipantProfile)
    noise: NoiseModel = field(default_factory=NoiseModel)
    fsm: FsmConfig = field(default_factory=FsmConfig)
    table: ParamTable = field(default_factory=default_param_table)
    profiles: dict[ActivityMode, GaitProfile] = field(default_factory=default_profiles)
    walkway_length_m: float = 8.0
    prosthetic_side: Side = Side.RIGHT
    leverage: dict[Placement, float] = field(default_factory=lambda: dict(DEFAULT_LEVERAGE))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SessionConfig):
            return NotImplemented
        return to_dict(self) == to_dict(other)

    def build_rules(self) -> GaitRules:
        thr = self.fsm.thresholds[self.placement.placement]
        return build_rules(
            body_weight_n=self.participant.body_weight_n,
            heel_strike_bw=thr.heel_strike_bw,
            toe_off_bw=thr.toe_off_bw,
            dwell_s=self.fsm.dwell_s,
            sit_stand=self.fsm.sit_stand,
        )

    def noise_with_seed(self, seed: int | None = None) -> NoiseModel:
        return replace(self.noise, seed=self.seed if seed is None else seed)


def default_session_config(placement: Placement = Placement.ABOVE_KNEE) -> SessionConfig:
    return SessionConfig(placement=PlacementConfig(placement))


def _cell_key(cell: Cell) -> tuple[str, str]:
    mode, phase = cell
    return mode.value, phase.value


def to_dict(cfg: SessionConfig) -> dict[str, Any]:
    """Plain-dict form of a config; YAML-safe and order-stable."""
    cells: dict[str, dict[str, dict[str, float]]] = {}
    for (mode, phase), params in sorted(cfg.table.items(), key=lambda kv: _cell_key(kv[0])):
        cells.setdefault(mode.value, {})[phase.value] = {
            "k": params.k, "b": params.b, "theta_eq": params.theta_eq,
        }
    tunable_cells = sorted(_cell_key(c) for c in cfg.table.tunable)
    all_cells = sorted(_cell_key(c) for c, _ in cfg.table.items())
    tunable: Any = "all" if tunable_cells == all_cells else [f"{m}/{p}" for m, p in tunable_cells]

    profiles: dict[str, dict[str, Any]] = {}
    for mode in ActivityMode:
        prof = cfg.profiles[mode]
        entry = {f.name: getattr(prof, f.name) for f in fields(GaitProfile) if f.name != "activity"}
        profiles[mode.value] = entry

    return {
        "schema": CONFIG_SCHEMA,
        "label": cfg.label,
        "placement": cfg.placement.placement.value,
        "seed": cfg.seed,
        "initial_mode": cfg.initial_mode.value,
        "device": {
            "torque_limit_nm": cfg.device.torque_limit_nm,
            "loadcell_rate_hz": cfg.device.loadcell_rate_hz,
            "encoder_rate_hz": cfg.device.encoder_rate_hz,
            "imu_rate_hz": cfg.device.imu_rate_hz,
            "device_mass_kg": cfg.device.device_mass_kg,
            "theta_min_deg": cfg.device.theta_min_deg,
            "theta_max_deg": cfg.device.theta_max_deg,
        },
        "participant": {
            "id": cfg.participant.id,
            "body_mass_kg": cfg.participant.body_mass_kg,
            "height_cm": cfg.participant.height_cm,
        },
        "noise": {
            "theta_imu_deg": cfg.noise.sd_theta_imu_deg,
            "q_deg": cfg.noise.sd_q_deg,
            "f_vertical_n": cfg.noise.sd_f_vertical_n,
            "m_sagittal_nm": cfg.noise.sd_m_sagittal_nm,
        },
        "fsm": {
            "dwell_s": cfg.fsm.dwell_s,
            "thresholds": {
                p.value: {
                    "heel_strike_bw": cfg.fsm.thresholds[p].heel_strike_bw,
                    "toe_off_bw": cfg.fsm.thresholds[p].toe_off_bw,
                }
                for p in Placement
            },
            "sit_stand": {
                "seated_angle_deg": cfg.fsm.sit_stand.seated_angle_deg,
                "standing_angle_deg": cfg.fsm.sit_stand.standing_angle_deg,
                "ramp_s": cfg.fsm.sit_stand.ramp_s,
                "seated_hold_s": cfg.fsm.sit_stand.seated_hold_s,
                "standing_hold_s": cfg.fsm.sit_stand.standing_hold_s,
            },
        },
        "impedance": {"tunable": tunable, "cells": cells},
        "profiles": profiles,
        "plant": {
            "walkway_length_m": cfg.walkway_length_m,
            "prosthetic_side": cfg.prosthetic_side.value,
            "leverage": {p.value: cfg.leverage[p] for p in Placement},
        },
    }


class _Reader:
    """Walks the raw YAML tree with dotted-path error messages."""

    def __init__(self, data: Any, path: str = ""):
        self.data = data
        self.path = path

    def _name(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def child(self, key: str, default: Any = None, required: bool = False) -> "_Reader":
        if not isinstance(self.data, dict):
            raise ConfigError(f"'{self.path or '<root>'}' must be a mapping")
        if key not in self.data:
            if required:
                raise ConfigError(f"missing required section '{self._name(key)}'")
            return _Reader(default if default is not None else {}, self._name(key))
        return _Reader(self.data[key], self._name(key))

    def value(self, key: str, kind: type, default: Any = ...) -> Any:
        if not isinstance(self.data, dict):
            raise ConfigError(f"'{self.path or '<root>'}' must be a mapping")
        if key not in self.data:
            if default is ...:
                raise ConfigError(f"missing required field '{self._name(key)}'")
            return default
        raw = self.data[key]
        if kind is float and isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return float(raw)
        if kind is int and isinstance(raw, int) and not isinstance(raw, bool):
            return int(raw)
        if kind is str and isinstance(raw, str):
            return raw
        if kind is float and raw is None:
            return None
        raise ConfigError(f"field '{self._name(key)}' must be {kind.__name__}, got {raw!r}")

    def enum(self, key: str, enum_cls: type, default: Any = ...) -> Any:
        raw = self.value(key, str, default=... if default is ... else default.value)
        try:
            return enum_cls(raw)
        except ValueError:
            valid = ", ".join(e.value for e in enum_cls)
            raise ConfigError(
                f"field '{self._name(key)}' must be one of [{valid}], got {raw!r}"
            ) from None


def from_dict(data: Any) -> SessionConfig:
    root = _Reader(data)
    schema = root.value("schema", str, default=CONFIG_SCHEMA)
    if schema != CONFIG_SCHEMA:
        raise ConfigError(f"unsupported config schema {schema!r}; expected {CONFIG_SCHEMA!r}")

    placement = PlacementConfig(root.enum("placement", Placement, default=Placement.ABOVE_KNEE))

    dev = root.child("device")
    device = _validated(lambda: DeviceSpec(
        torque_limit_nm=dev.value("torque_limit_nm", float, 100.0),
        loadcell_rate_hz=dev.value("loadcell_rate_hz", float, 100.0),
        encoder_rate_hz=dev.value("encoder_rate_hz", float, 250.0),
        imu_rate_hz=dev.value("imu_rate_hz", float, 250.0),
        device_mass_kg=dev.value("device_mass_kg", float, 1.8),
        theta_min_deg=dev.value("theta_min_deg", float, 0.0),
        theta_max_deg=dev.value("theta_max_deg", float, 120.0),
    ), "device")

    part = root.child("participant")
    participant = _validated(lambda: ParticipantProfile(
        body_mass_kg=part.value("body_mass_kg", float, 85.0),
        height_cm=part.value("height_cm", float, 180.0),
        id=part.value("id", str, "demo"),
    ), "participant")

    noi = root.child("noise")
    noise = _validated(lambda: NoiseModel(
        sd_theta_imu_deg=noi.value("theta_imu_deg", float, 0.0),
        sd_q_deg=noi.value("q_deg", float, 0.0),
        sd_f_vertical_n=noi.value("f_vertical_n", float, 0.0),
        sd_m_sagittal_nm=noi.value("m_sagittal_nm", float, 0.0),
    ), "noise")

    fsm_r = root.child("fsm")
    thr_r = fsm_r.child("thresholds")
    thresholds = {}
    for p in Placement:
        block = thr_r.child(p.value)
        thresholds[p] = _validated(lambda b=block: LoadThresholds(
            heel_strike_bw=b.value("heel_strike_bw", float, 0.20),
            toe_off_bw=b.value("toe_off_bw", float, 0.10),
        ), f"fsm.thresholds.{p.value}")
    ss_r = fsm_r.child("sit_stand")
    sit_stand = SitStandTiming(
        seated_angle_deg=ss_r.value("seated_angle_deg", float, 90.0),
        standing_angle_deg=ss_r.value("standing_angle_deg", float, 0.0),
        ramp_s=ss_r.value("ramp_s", float, 2.0),
        seated_hold_s=ss_r.value("seated_hold_s", float, 2.0),
        standing_hold_s=ss_r.value("standing_hold_s", float, 3.0),
    )
    fsm_cfg = _validated(lambda: FsmConfig(
        dwell_s=fsm_r.value("dwell_s", float, 0.06),
        thresholds=thresholds,
        sit_stand=sit_stand,
    ), "fsm")

    theta_range = (device.theta_min_deg, device.theta_max_deg)
    imp_r = root.child("impedance")
    if "cells" in (imp_r.data or {}):
        cells_r = imp_r.child("cells")
        cells: dict[Cell, ImpedanceParams] = {}
        for mode in ActivityMode:
            mode_r = cells_r.child(mode.value, required=True)
            for phase in phases_for_mode(mode):
                cell_r = mode_r.child(phase.value, required=True)
                cells[(mode, phase)] = _validated(lambda c=cell_r: ImpedanceParams(
                    k=c.value("k", float),
                    b=c.value("b", float),
                    theta_eq=c.value("theta_eq", float),
                ), f"impedance.cells.{mode.value}.{phase.value}")
        tunable = _parse_tunable(imp_r.data.get("tunable", "all"), cells, "impedance.tunable")
        table = _validated(
            lambda: ParamTable(cells, tunable=tunable, theta_range=theta_range), "impedance"
        )
    else:
        table = default_param_table(theta_range=theta_range)

    prof_defaults = default_profiles()
    profiles: dict[ActivityMode, GaitProfile] = {}
    prof_r = root.child("profiles")
    for mode in ActivityMode:
        base = prof_defaults[mode]
        block = prof_r.child(mode.value)
        kwargs: dict[str, Any] = {}
        for f in fields(GaitProfile):
            if f.name == "activity":
                continue
            default_val = getattr(base, f.name)
            if f.name == "peak_velocity_dps":
                kwargs[f.name] = block.value(f.name, float, default_val)
            else:
                kwargs[f.name] = block.value(f.name, float, default_val)
        profiles[mode] = _validated(
            lambda m=mode, kw=kwargs: GaitProfile(activity=m, **kw), f"profiles.{mode.value}"
        )

    plant_r = root.child("plant")
    lev_r = plant_r.child("leverage")
    leverage = {
        p: lev_r.value(p.value, float, DEFAULT_LEVERAGE[p]) for p in Placement
    }
    side_raw = plant_r.value("prosthetic_side", str, Side.RIGHT.value)
    try:
        prosthetic_side = Side(side_raw)
    except ValueError:
        raise ConfigError(
            f"field 'plant.prosthetic_side' must be one of [left, right], got {side_raw!r}"
        ) from None

    return SessionConfig(
        label=root.value("label", str, "session"),
        placement=placement,
        seed=root.value("seed", int, 0),
        initial_mode=root.enum("initial_mode", ActivityMode, default=ActivityMode.LEVEL_WALK),
        device=device,
        participant=participant,
        noise=noise,
        fsm=fsm_cfg,
        table=table,
        profiles=profiles,
        walkway_length_m=plant_r.value("walkway_length_m", float, 8.0),
        prosthetic_side=prosthetic_side,
        leverage=leverage,
    )


def _parse_tunable(raw: Any, cells: dict[Cell, ImpedanceParams], where: str) -> list[Cell]:
    if raw == "all":
        return list(cells)
    if not isinstance(raw, list):
        raise ConfigError(f"'{where}' must be 'all' or a list of 'mode/phase' strings")
    out: list[Cell] = []
    for item in raw:
        try:
            mode_s, phase_s = str(item).split("/", 1)
            out.append((ActivityMode(mode_s), GaitPhase(phase_s)))
        except ValueError:
            raise ConfigError(f"'{where}' entry {item!r} is not a valid 'mode/phase' cell") from None
    return out


def _validated(builder, where: str):
    try:
        return builder()
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def loads_config(text: str, source: str = "<string>") -> SessionConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark else source
        raise ConfigError(f"{where}: YAML parse error: {exc}") from None
    if data is None:
        data = {}
    return from_dict(data)


def load_config(path: str | Path) -> SessionConfig:
    path = Path(path)
    return loads_config(path.read_text(), source=str(path))


def dumps_config(cfg: SessionConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False, default_flow_style=False)


def save_config(cfg: SessionConfig, path: str | Path) -> None:
    Path(path).write_text(dumps_config(cfg))


def resolve_config_path(path: str | Path) -> Path:
    """Resolve a config path, falling back to $KNEESIM_CONFIG_DIR for
    relative paths that do not exist in the working directory."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(CONFIG_DIR_ENV)
    if base:
        candidate = Path(base) / p
        if candidate.exists():
            return candidate
    return p
