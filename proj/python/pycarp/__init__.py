"""Python bindings for the carp library."""

from ._pycarp import (
    DisconnectedGraph,
    Edge,
    IllegalAction,
    Instance,
    ModelConfig,
    ParseError,
    Policy,
    Prepared,
    Solution,
    classical_mds,
    gap_percent,
    generate,
    presets,
    pretrain,
    shortest_paths,
    solve,
)

__all__ = [
    "DisconnectedGraph",
    "Edge",
    "IllegalAction",
    "Instance",
    "ModelConfig",
    "ParseError",
    "Policy",
    "Prepared",
    "Solution",
    "classical_mds",
    "gap_percent",
    "generate",
    "presets",
    "pretrain",
    "shortest_paths",
    "solve",
]
