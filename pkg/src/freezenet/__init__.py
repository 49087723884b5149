"""Specification checking for freezing automata networks over tree decompositions."""
from .core import (Alphabet, Graph, LazyAlphabet, Network, NetworkError, Orbit, ResourceLimitError,
                   ValidationReport, and_network, async_lift, boolean_alphabet, complete_graph,
                   constant_network, cycle_graph, expand_set_rule, grid_graph, identity_network,
                   is_orbit, max_orbit_length, or_network, orbit, path_graph, star_graph,
                   step_deterministic, successors, threshold_network, validate_network)
from .traces import (AllOf, Endpoints, RleTrace, SequenceEncoding, Specification, StatePredicate,
                     TraceSet, canonical_key, decode, encode, encode_spec, restrict)
from .treedecomp import (TreeDecomposition, binarize, binarize_balance, heuristic_decomposition,
                         levels, validate_decomposition)
from .validity import LocalTrace, PartialTrace, enumerate_pvt, is_locally_valid, is_partially_valid
from .solver import Verdict, check_spec, extract_witness

__version__ = "0.1.0"
