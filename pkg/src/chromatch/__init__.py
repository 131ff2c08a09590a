"""Nearly color-balanced perfect matchings in k-edge-colored complete graphs."""

from .graph import (
    MODE_A,
    MODE_B,
    ColoredCompleteGraph,
    ColorVector,
    PerfectMatching,
    apply_swap,
    color_vector,
    edge_index,
    imbalance,
    swap_delta,
)
from .kernels import BACKEND

__version__ = "0.1.0"
