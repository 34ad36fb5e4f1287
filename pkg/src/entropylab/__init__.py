"""Topological entropy, kneading data and deformations of multimodal interval maps."""

from .errors import *  # noqa: F401,F403
from .maps import (PiecewiseAffineMap, PolynomialMap, SawtoothGeometry, Shape, StuntedParams,
                   build_stunted, eval_sawtooth, family_member, make_geometry, polynomial_map,
                   sawtooth_map, stunted)
from .symbolic import (KneadingInvariant, Symbol, SymbolSequence, itinerary, kneading,
                       realize_in_sawtooth, signed_lex_compare)

__version__ = "0.1.0"
