"""Entropy engines: lap census, Markov graphs, constant-slope models, cycles."""

from .census import LapCensus, lap_census
from .bracket import EntropyEstimate, entropy_bracket, entropy_lap, entropy_poly, entropy_poly_direct
from .markov import (RomeMatrix, TransitionGraph, certify_spectral_drop, leading_eigenvalue,
                     markov_graph, rome_identity_check, rome_reduce)
from .cycles import (CycleDecomposition, IntervalCycle, constant_slope_map, cycle_bound_holds,
                     minimal_cycles, stun_at)
from .semiconj import ConstantSlopeModel, constant_slope_model
