"""
Settings — Numeric Defaults from config/harmonic_config.yaml

Provides:
  1. load_settings()   — parsed YAML defaults (cached), .env applied
  2. section()         — one top-level block of the settings
  3. quad_panels_override() — HARMONIC_QUAD_PANELS environment override
"""

import os
import logging
from functools import lru_cache
from pathlib import Path

import yaml
from dotenv import load_dotenv

from common.errors import ConfigError

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "config" / "harmonic_config.yaml"

REQUIRED_SECTIONS = (
    "quadrature",
    "spherical_functions",
    "heat",
    "beurling",
    "verdicts",
    "sharpness",
    "registry",
)


@lru_cache(maxsize=None)
def load_settings(path: str = None) -> dict:
    """
    Load the YAML defaults once per process.

    Parameters
    ----------
    path : str, optional
        Alternative YAML file; defaults to HARMONIC_CONFIG or the bundled file.
    """
    load_dotenv()
    config_path = Path(path or os.getenv("HARMONIC_CONFIG", str(DEFAULT_CONFIG_PATH)))
    if not config_path.exists():
        raise ConfigError(f"Settings file not found: {config_path}")

    with open(config_path) as fh:
        settings = yaml.safe_load(fh) or {}

    missing = [name for name in REQUIRED_SECTIONS if name not in settings]
    if missing:
        raise ConfigError(f"Settings file {config_path} lacks sections: {missing}")

    logger.debug(f"Loaded settings from {config_path}")
    return settings


def section(name: str) -> dict:
    """Return one top-level settings block."""
    return load_settings()[name]


def quad_panels_override():
    """Panels-per-unit from HARMONIC_QUAD_PANELS, or None when unset."""
    load_dotenv()
    raw = os.getenv("HARMONIC_QUAD_PANELS")
    if raw is None or raw.strip() == "":
        return None
    try:
        panels = int(raw)
    except ValueError:
        raise ConfigError(f"HARMONIC_QUAD_PANELS must be an integer, got {raw!r}")
    if panels <= 0:
        raise ConfigError(f"HARMONIC_QUAD_PANELS must be positive, got {panels}")
    return panels
