"""Conservation-law experiments on the discretized unit disk."""

import json

from ._conslab import (
    ConfigError,
    Error,
    fit_slope,
    frame_summary,
    gauge_summary,
    grid,
    run_config,
    stereo_sphere_map,
    wente_solve,
)

__all__ = [
    "ConfigError",
    "Error",
    "fit_slope",
    "frame_summary",
    "gauge_summary",
    "grid",
    "run",
    "run_config",
    "stereo_sphere_map",
    "wente_solve",
]


def run(config, out_dir=""):
    """Run a config given as a dict or JSON text."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return run_config(config, out_dir)
