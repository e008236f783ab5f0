"""Reachability analysis for recursive processes communicating over FIFO channels."""
from .model import (
    Channel,
    Configuration,
    Local,
    Pop,
    Push,
    PushdownProcess,
    Recv,
    Rqcp,
    Run,
    Send,
    Step,
    Topology,
    enabled_moves,
    matching_pairs,
    validate_system,
)

__all__ = [
    "Channel",
    "Configuration",
    "Local",
    "Pop",
    "Push",
    "PushdownProcess",
    "Recv",
    "Rqcp",
    "Run",
    "Send",
    "Step",
    "Topology",
    "enabled_moves",
    "matching_pairs",
    "validate_system",
]

__version__ = "0.1.0"
