"""Dominator's strategy for the domination game on isolate-free forests."""
from .game_engine import Variant, initial_state, t_max
from .graph_core import Forest, GraphError

__all__ = ["Forest", "GraphError", "Variant", "initial_state", "t_max"]
__version__ = "0.1.0"
