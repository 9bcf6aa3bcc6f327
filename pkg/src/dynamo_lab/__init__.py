"""Dynamos of bootstrap percolation and majority dynamics on the torus T_n^d."""

from .dynamics import Outcome, Rule, bp_closure, is_dynamo, is_monotone_dynamo, is_stable_set, run, step
from .torus import Configuration, TorusShape, VertexSet, make_torus

__all__ = [
    "Configuration",
    "Outcome",
    "Rule",
    "TorusShape",
    "VertexSet",
    "bp_closure",
    "is_dynamo",
    "is_monotone_dynamo",
    "is_stable_set",
    "make_torus",
    "run",
    "step",
]
__version__ = "0.1.0"
