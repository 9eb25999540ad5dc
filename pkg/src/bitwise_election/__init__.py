"""Leader election by pipelined bitwise spreading of the maximum identifier."""

from .encoding import decode_alpha, encode_alpha, is_well_formed, lex_compare, Order
from .protocol import (
    NodeState,
    RoundMessage,
    SpreadSignal,
    TreeSignal,
    apply_round,
    ingest_messages,
    init_node,
    select_spreading_action,
)
from .simulator import AssertionLevel, Granularity, SimConfig, run
from .topology import Topology, diameter, load_topology, parse_topology

__version__ = "0.1.0"
