"""
Report Writer — CSV Tables and JSON Reports for Harmonic Runs

Provides functions to persist and re-read command output:
  1. RunConfig / load_run_config() — flat JSON run configuration
  2. config_hash()                 — short digest of a canonical config
  3. write_table_csv()             — '#' header + grid,value[,value_im] rows
  4. write_report_json()           — report dict with the fixed top-level keys
  5. read_table_csv() / read_report_json() — parsers for both formats

Floats are written with 17 significant digits so every value survives a
write/read cycle unchanged.
"""

import io
import json
import hashlib
import logging
from dataclasses import dataclass, asdict, replace, fields
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from common.errors import ConfigError
from transforms.quadrature import QuadratureScheme

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
REPORT_KEYS = ("operation", "config", "ladder", "classification", "value", "verdict", "cited_case")
OUTPUT_FORMATS = ("csv", "json")


# -------------------------------------------------------------------
# 1. Run configuration
# -------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    space: str = "h3"
    panels_per_unit: Optional[int] = None
    t_max: Optional[float] = None
    lambda_max: Optional[float] = None
    abs_tol: Optional[float] = None
    rel_tol: Optional[float] = None
    output_format: Optional[str] = None
    output_path: Optional[str] = None

    def __post_init__(self):
        for name in ("panels_per_unit", "t_max", "lambda_max", "abs_tol", "rel_tol"):
            value = getattr(self, name)
            if value is not None and not (isinstance(value, (int, float)) and not isinstance(value, bool) and value > 0):
                raise ConfigError(f"{name} must be positive, got {value!r}")
        if self.panels_per_unit is not None and int(self.panels_per_unit) != self.panels_per_unit:
            raise ConfigError(f"panels_per_unit must be an integer, got {self.panels_per_unit}")
        if self.output_format is not None and self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"output_format must be one of {OUTPUT_FORMATS}, got {self.output_format!r}")

    def merged(self, **overrides) -> "RunConfig":
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def quadrature(self, base: QuadratureScheme) -> QuadratureScheme:
        changes = {
            name: getattr(self, name)
            for name in ("panels_per_unit", "t_max", "lambda_max", "abs_tol", "rel_tol")
            if getattr(self, name) is not None
        }
        if "panels_per_unit" in changes:
            changes["panels_per_unit"] = int(changes["panels_per_unit"])
        return replace(base, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


def load_run_config(path) -> RunConfig:
    """
    Read a flat JSON run configuration.

    Raises
    ------
    ConfigError
        On unreadable JSON, a non-object document or unknown keys.
    """
    try:
        with open(path) as fh:
            document = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read run config {path}: {e}")
    if not isinstance(document, dict):
        raise ConfigError(f"Run config {path} must be a JSON object")

    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(document) - known)
    if unknown:
        raise ConfigError(f"Unknown run config keys in {path}: {unknown}")
    logger.info(f"Loaded run config from {path}")
    return RunConfig(**document)


def config_hash(config: dict) -> str:
    """First 12 hex digits of the SHA-256 of the canonical JSON form."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


# -------------------------------------------------------------------
# 2. Writers
# -------------------------------------------------------------------

def table_frame(grid, values) -> pd.DataFrame:
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return pd.DataFrame({"grid": grid, "value_re": values.real, "value_im": values.imag})
    return pd.DataFrame({"grid": grid, "value": values.astype(float)})


def render_table_csv(grid, values, space_name: str, operation: str, config: dict) -> str:
    header = (
        f"# space={space_name}\n"
        f"# operation={operation}\n"
        f"# config_hash={config_hash(config)}\n"
    )
    body = table_frame(grid, values).to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return header + body


def write_table_csv(grid, values, space_name: str, operation: str, config: dict, path=None, stream=None) -> dict:
    """
    Write a numeric table to path, or to stream when no path is given.

    Returns
    -------
    dict
        {"rows": int, "path": str or None}
    """
    text = render_table_csv(grid, values, space_name, operation, config)
    if path is not None:
        Path(path).write_text(text)
        logger.info(f"✓ {operation}: wrote {len(grid)} rows to {path}")
    else:
        stream.write(text)
    return {"rows": len(grid), "path": None if path is None else str(path)}


def build_report(operation: str, config: dict, **entries) -> dict:
    """Report dict with every fixed key present (None when not applicable)."""
    report = {key: None for key in REPORT_KEYS}
    report["operation"] = operation
    report["config"] = config
    report.update(entries)
    return report


def render_report_json(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def write_report_json(report: dict, path=None, stream=None) -> dict:
    text = render_report_json(report)
    if path is not None:
        Path(path).write_text(text)
        logger.info(f"✓ {report.get('operation')}: wrote report to {path}")
    else:
        stream.write(text)
    return {"keys": len(report), "path": None if path is None else str(path)}


def _plain(value):
    """numpy scalars and tuples into JSON-native types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


# -------------------------------------------------------------------
# 3. Parsers
# -------------------------------------------------------------------

def read_table_csv(source) -> dict:
    """
    Parse a table written by write_table_csv.

    Parameters
    ----------
    source : path or str
        A file path, or the CSV text itself when it starts with '#'.

    Returns
    -------
    dict
        {"header": {space, operation, config_hash}, "frame": DataFrame}
    """
    text = source if isinstance(source, str) and source.startswith("#") else Path(source).read_text()
    header = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].strip().partition("=")
        header[key] = value
    frame = pd.read_csv(io.StringIO(text), comment="#", float_precision="round_trip")
    return {"header": header, "frame": frame}


def read_report_json(source) -> dict:
    """Parse a report written by write_report_json (path or JSON text)."""
    text = source if isinstance(source, str) and source.lstrip().startswith("{") else Path(source).read_text()
    report = json.loads(text)
    missing = [key for key in REPORT_KEYS if key not in report]
    if missing:
        raise ConfigError(f"Report lacks keys: {missing}")
    return report
