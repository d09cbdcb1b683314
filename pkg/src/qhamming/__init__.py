"""Hamming-type transport distances between traces on quantum permutation groups."""

from . import distances, linalg, magic, states, transport
from .config import RunConfig
from .distances import (
    DistanceReport,
    all_distances,
    distance,
    distance_free,
    distance_l1,
    distance_tensor,
)
from .magic import MagicUnitary
from .states import AtomicTrace, StateMixture

__all__ = [
    "AtomicTrace",
    "DistanceReport",
    "MagicUnitary",
    "RunConfig",
    "StateMixture",
    "all_distances",
    "distance",
    "distance_free",
    "distance_l1",
    "distance_tensor",
    "distances",
    "linalg",
    "magic",
    "states",
    "transport",
]

__version__ = "0.1.0"
