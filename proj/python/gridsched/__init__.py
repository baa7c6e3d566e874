"""Day-ahead EV/HVAC scheduling and microgrid bidding."""

from ._core import (
    BuildingThermalParams,
    GridschedError,
    HvacMode,
    bid,
    export_model,
    lhs_sample,
    reduced_scenarios_csv,
    schedule,
    simulate_indoor,
    solar_power,
    wind_power,
)

__all__ = [
    "BuildingThermalParams",
    "GridschedError",
    "HvacMode",
    "bid",
    "export_model",
    "lhs_sample",
    "reduced_scenarios_csv",
    "schedule",
    "simulate_indoor",
    "solar_power",
    "wind_power",
]
