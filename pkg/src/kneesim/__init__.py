"""Powered prosthetic knee control and gait simulation library.

Subsystems: shared domain types (`core`), placement-aware sensor geometry
(`sensors`), the joint impedance law and parameter tables (`impedance`),
the gait-phase state machine (`fsm`), the simulated gait plant (`plant`),
outcome-measure analysis (`analysis`), versioned CSV log schemas (`logs`),
session configuration (`config`), the closed-loop runner (`session`), and
the live telemetry/command service (`protocol`, `server`, `cli`).
"""

from .analysis import (
    GaitMetrics,
    KinematicSummary,
    StrideNormalized,
    compare_stance_moments,
    kinematic_summary,
    spatiotemporal,
    stride_normalize,
    symmetry_index,
)
from .config import (
    SessionConfig,
    default_session_config,
    dumps_config,
    load_config,
    loads_config,
    save_config,
)
from .core import (
    ActivityMode,
    DeviceSpec,
    GaitPhase,
    JointState,
    KneesimError,
    ParticipantProfile,
    Placement,
    PlacementConfig,
)
from .fsm import (
    ControllerState,
    GaitEvent,
    GaitRules,
    TransitionRule,
    build_rules,
    initial_state,
    request_mode,
    tick,
    validate_rules,
)
from .impedance import (
    ImpedanceParams,
    ParamTable,
    default_param_table,
    impedance_torque,
    lookup_params,
    saturate,
)
from .plant import (
    GaitProfile,
    NoiseModel,
    PlantState,
    Side,
    WalkwayRecord,
    default_profiles,
    emit_walkway,
    make_plant,
    step_plant,
)
from .sensors import (
    RawSensorFrame,
    SegmentAngles,
    loadcell_semantics,
    resample,
    segment_angles,
)
from .session import ScriptEvent, SessionResult, SessionRunner, scripted_session

__version__ = "0.1.0"

__all__ = [
    "ActivityMode",
    "ControllerState",
    "DeviceSpec",
    "GaitEvent",
    "GaitMetrics",
    "GaitPhase",
    "GaitProfile",
    "GaitRules",
    "ImpedanceParams",
    "JointState",
    "KinematicSummary",
    "KneesimError",
    "NoiseModel",
    "ParamTable",
    "ParticipantProfile",
    "Placement",
    "PlacementConfig",
    "PlantState",
    "RawSensorFrame",
    "ScriptEvent",
    "SegmentAngles",
    "SessionConfig",
    "SessionResult",
    "SessionRunner",
    "Side",
    "StrideNormalized",
    "TransitionRule",
    "WalkwayRecord",
    "build_rules",
    "compare_stance_moments",
    "default_param_table",
    "default_profiles",
    "default_session_config",
    "dumps_config",
    "emit_walkway",
    "impedance_torque",
    "initial_state",
    "kinematic_summary",
    "load_config",
    "loads_config",
    "lookup_params",
    "make_plant",
    "request_mode",
    "resample",
    "saturate",
    "save_config",
    "scripted_session",
    "segment_angles",
    "spatiotemporal",
    "step_plant",
    "stride_normalize",
    "symmetry_index",
    "tick",
    "validate_rules",
]
