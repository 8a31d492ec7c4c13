"""Wind turbine power curve modeling and forecasting."""

from wtpc._core import (
    CleanDataset,
    DynamicModel,
    EnhancedModel,
    FittedModel,
    ResidualProfile,
    WtpcError,
    build_profile,
    coverage_audit,
    enhance,
    fit,
    fit_dynamic,
    load_scada,
    mse,
    mse_at_horizon,
    predict_power,
    select,
    simulate,
)

__all__ = [
    "CleanDataset",
    "DynamicModel",
    "EnhancedModel",
    "FittedModel",
    "ResidualProfile",
    "WtpcError",
    "build_profile",
    "coverage_audit",
    "enhance",
    "fit",
    "fit_dynamic",
    "load_scada",
    "mse",
    "mse_at_horizon",
    "predict_power",
    "select",
    "simulate",
]
