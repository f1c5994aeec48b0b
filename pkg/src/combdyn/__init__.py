"""Exact combinatorial dynamics of interval, tree and graph vertex maps."""

from .permutation import Permutation, compose, cycle_type, enumerate_cycles, fixed_points, power
from .markov import MarkovGraph, SignedMatrix, markov_graph, markov_matrix, mat_mul, mat_pow, om_of, trace
from .walks import Walk, count_closed, count_nonrepetitive_closed, enumerate_closed, is_repetitive
from .pwl import PLMap, build_map, eval_map, least_period_set, lift_walk, periodic_points
from .orders import basic_forced, remove_ones, shark_cmp, shark_forced, tree_forced

__all__ = [
    "Permutation", "compose", "cycle_type", "enumerate_cycles", "fixed_points", "power",
    "MarkovGraph", "SignedMatrix", "markov_graph", "markov_matrix", "mat_mul", "mat_pow", "om_of", "trace",
    "Walk", "count_closed", "count_nonrepetitive_closed", "enumerate_closed", "is_repetitive",
    "PLMap", "build_map", "eval_map", "least_period_set", "lift_walk", "periodic_points",
    "basic_forced", "remove_ones", "shark_cmp", "shark_forced", "tree_forced",
]

__version__ = "0.1.0"
