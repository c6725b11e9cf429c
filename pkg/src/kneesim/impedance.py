"""Joint impedance law and per-(activity, phase) parameter tables.

The low-level controller emulates a spring-damper about an equilibrium
angle:  tau = -k * (theta - theta_eq) - b * theta_dot,  clamped to the
device torque limit. Which (k, b, theta_eq) triple is active depends on the
current activity mode and gait phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .core import (
    ActivityMode,
    DeviceSpec,
    GaitPhase,
    JointState,
    MissingCellError,
    ValidationError,
    phases_for_mode,
    require_finite,
)

Cell = tuple[ActivityMode, GaitPhase]


def reachable_cells() -> tuple[Cell, ...]:
    """Every (activity, phase) pair the state machine can occupy."""
    cells: list[Cell] = []
    for mode in ActivityMode:
        for phase in phases_for_mode(mode):
            cells.append((mode, phase))
    return tuple(cells)


@dataclass(frozen=True)
class ImpedanceParams:
    """Stiffness (Nm/deg), damping (Nm*s/deg), equilibrium angle (deg)."""

    k: float
    b: float
    theta_eq: float

    def __post_init__(self) -> None:
        for name in ("k", "b", "theta_eq"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v!r}")
        if self.k < 0:
            raise ValidationError(f"stiffness k must be >= 0, got {self.k}")
        if self.b < 0:
            raise ValidationError(f"damping b must be >= 0, got {self.b}")


def impedance_torque(state: JointState, params: ImpedanceParams) -> float:
    """Unsaturated spring-damper torque about the equilibrium angle, Nm."""
    require_finite(state.theta, "theta")
    require_finite(state.theta_dot, "theta_dot")
    return -params.k * (state.theta - params.theta_eq) - params.b * state.theta_dot


def saturate(torque: float, spec: DeviceSpec) -> tuple[float, bool]:
    """Clamp a torque to the device limit; returns (torque, saturated)."""
    limit = spec.torque_limit_nm
    if torque > limit:
        return limit, True
    if torque < -limit:
        return -limit, True
    return torque, False


class ParamTable:
    """Map from (activity, phase) to impedance parameters, with a tunable mask.

    One writer (live tuning) and one reader (control loop) are supported:
    cells are replaced whole with immutable triples, so a reader never sees
    a torn (k, b, theta_eq) update. The live session additionally applies
    updates only between control ticks.
    """

    def __init__(
        self,
        cells: Mapping[Cell, ImpedanceParams],
        tunable: Iterable[Cell] | None = None,
        theta_range: tuple[float, float] = (0.0, 120.0),
        require_total: bool = True,
    ):
        self._theta_range = (float(theta_range[0]), float(theta_range[1]))
        self._cells: dict[Cell, ImpedanceParams] = {}
        for cell, params in cells.items():
            self._check_range(cell, params)
            self._cells[cell] = params
        if require_total:
            missing = [c for c in reachable_cells() if c not in self._cells]
            if missing:
                names = ", ".join(f"({m.value}, {p.value})" for m, p in missing)
                raise ValidationError(f"parameter table is missing cells: {names}")
        if tunable is None:
            self.tunable: frozenset[Cell] = frozenset(self._cells)
        else:
            self.tunable = frozenset(tunable)
            unknown = self.tunable - set(self._cells)
            if unknown:
                raise ValidationError(f"tunable mask names unknown cells: {sorted(unknown, key=str)}")

    def _check_range(self, cell: Cell, params: ImpedanceParams) -> None:
        lo, hi = self._theta_range
        if not lo <= params.theta_eq <= hi:
            mode, phase = cell
            raise ValidationError(
                f"theta_eq {params.theta_eq} outside mechanical range [{lo}, {hi}] "
                f"for cell ({mode.value}, {phase.value})"
            )

    @property
    def theta_range(self) -> tuple[float, float]:
        return self._theta_range

    def lookup(self, mode: ActivityMode, phase: GaitPhase) -> ImpedanceParams:
        try:
            return self._cells[(mode, phase)]
        except KeyError:
            raise MissingCellError(
                f"no parameters for cell ({mode.value}, {phase.value})"
            ) from None

    def update_cell(
        self,
        mode: ActivityMode,
        phase: GaitPhase,
        params: ImpedanceParams,
        enforce_tunable: bool = True,
    ) -> None:
        cell = (mode, phase)
        if cell not in self._cells:
            raise MissingCellError(f"no such cell ({mode.value}, {phase.value})")
        if enforce_tunable and cell not in self.tunable:
            raise ValidationError(f"cell ({mode.value}, {phase.value}) is not tunable")
        self._check_range(cell, params)
        self._cells[cell] = params  # single assignment of an immutable triple

    def items(self) -> list[tuple[Cell, ImpedanceParams]]:
        return list(self._cells.items())

    def copy(self) -> "ParamTable":
        return ParamTable(
            dict(self._cells),
            tunable=self.tunable,
            theta_range=self._theta_range,
            require_total=False,
        )


def lookup_params(table: ParamTable, mode: ActivityMode, phase: GaitPhase) -> ImpedanceParams:
    return table.lookup(mode, phase)


def default_param_table(theta_range: tuple[float, float] = (0.0, 120.0)) -> ParamTable:
    """Shipped defaults, chosen so the bundled gait plant walks stably.

    These are simulation defaults, not clinical settings. Equilibrium angles
    roughly follow each activity's knee excursion so commanded torques stay
    well inside the device limit.
    """
    # per cyclic activity: theta_eq by phase (ES, LS, SF, SE)
    eq = {
        ActivityMode.LEVEL_WALK: (10.0, 4.0, 55.0, 8.0),
        ActivityMode.RAMP_ASCENT: (12.0, 5.0, 40.0, 8.0),
        ActivityMode.RAMP_DESCENT: (14.0, 6.0, 42.0, 10.0),
        ActivityMode.STAIR_ASCENT: (16.0, 6.0, 72.0, 12.0),
        ActivityMode.STAIR_DESCENT: (16.0, 8.0, 65.0, 12.0),
    }
    gains = {
        GaitPhase.EARLY_STANCE: (4.0, 0.06),
        GaitPhase.LATE_STANCE: (3.0, 0.05),
        GaitPhase.SWING_FLEXION: (1.2, 0.03),
        GaitPhase.SWING_EXTENSION: (1.2, 0.04),
    }
    cells: dict[Cell, ImpedanceParams] = {}
    for mode, eqs in eq.items():
        for phase, theta_eq in zip(
            (GaitPhase.EARLY_STANCE, GaitPhase.LATE_STANCE,
             GaitPhase.SWING_FLEXION, GaitPhase.SWING_EXTENSION),
            eqs,
        ):
            k, b = gains[phase]
            cells[(mode, phase)] = ImpedanceParams(k=k, b=b, theta_eq=theta_eq)
    cells[(ActivityMode.SIT_STAND, GaitPhase.SEATED)] = ImpedanceParams(2.0, 0.05, 90.0)
    cells[(ActivityMode.SIT_STAND, GaitPhase.RISING)] = ImpedanceParams(3.0, 0.08, 0.0)
    cells[(ActivityMode.SIT_STAND, GaitPhase.STANDING)] = ImpedanceParams(4.0, 0.06, 0.0)
    cells[(ActivityMode.SIT_STAND, GaitPhase.LOWERING)] = ImpedanceParams(2.5, 0.08, 90.0)
    return ParamTable(cells, theta_range=theta_range)
