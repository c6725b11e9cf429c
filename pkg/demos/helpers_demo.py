"""Tiny shared builders for the demo scripts."""

from kneesim.config import SessionConfig, default_session_config
from kneesim.core import Placement


def make_placement_config(placement: Placement, seed: int = 7) -> SessionConfig:
    cfg = default_session_config(placement)
    cfg.seed = seed
    cfg.label = placement.value
    return cfg
