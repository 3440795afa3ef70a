"""Exact stationary distributions of random walks on finite semigroups via
Karnofsky–Rhodes and McCammond expansions and loop graphs."""
from .exactnum import Poly, RatFunc, Rational, rf_limit_at_zero, rf_star
from .semigroup import FiniteSemigroup, adjoin_zero, close_generators, from_table, minimal_ideal
from .cayley import CayleyGraph, right_cayley
from .expand import KRGraph, McGraph, kr_expand, mc_expand
from .loopgraph import LabeledDigraph, LoopGraph, pict, validate_usp
from .kleene import eval_expr, kleene_of_loopgraph, zimin_eliminate
from .markov import build_chain, stationary_oracle, stationary_semigroup

__version__ = "0.1.0"
