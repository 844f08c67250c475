"""Python bindings for the gchr engine."""

from ._gchr import (
    ConfigError,
    ContractViolation,
    Env,
    NumericError,
    TabularGCMDP,
    config_keys,
    config_text,
    evaluate,
    load_gcmdp,
    occupancy,
    parse_gcmdp,
    train,
    verify,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "Env",
    "NumericError",
    "TabularGCMDP",
    "config_keys",
    "config_text",
    "evaluate",
    "load_gcmdp",
    "occupancy",
    "parse_gcmdp",
    "train",
    "verify",
]
