from .circuits import CircuitDag, Gate, contradiction_circuit, parse_circuit, random_circuit
from .domset import DominatingSetGadget, dominating_set_gadget
from .embedding import (BOT, AsyncGadget, Layout, NilpotencyGadget, PredecessorGadget, PredictionGadget,
                        circuit_async_gadget, circuit_predecessor_gadget, embed_circuit,
                        routed_prediction_gadget, sat_nilpotency_gadget)
from .routing import (Bramble, Digraph, GadgetError, RoutedEmbedding, grid_bramble, grid_host,
                      is_square_coloring, route, square_coloring, validate_bramble)
