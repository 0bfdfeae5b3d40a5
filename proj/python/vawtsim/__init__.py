"""Two-dimensional vertical-axis wind turbine force models (vortex and actuator line)."""

from ._vawtsim import (
    ConfigError,
    ForceSeries,
    FormatError,
    OperatingPoint,
    PolarTable,
    Scenario,
    StepError,
    TurbineGeometry,
    compare,
    emit_plot,
    induced_velocity,
    load_config,
    load_series,
    parse_config,
    rpm_to_rad_per_s,
    run_scenario,
    save_series,
    tip_speed_ratio,
)

__all__ = [
    "ConfigError",
    "ForceSeries",
    "FormatError",
    "OperatingPoint",
    "PolarTable",
    "Scenario",
    "StepError",
    "TurbineGeometry",
    "compare",
    "emit_plot",
    "induced_velocity",
    "load_config",
    "load_series",
    "parse_config",
    "rpm_to_rad_per_s",
    "run_scenario",
    "save_series",
    "tip_speed_ratio",
]
