"""Property graph store on sparse boolean matrices, with a Cypher subset and a k-hop benchmark."""

from .khop import KHopQuery, k_hop_count, k_hop_frontier
from .store import ANY, PropertyGraph

__version__ = "0.1.0"

__all__ = ["ANY", "KHopQuery", "PropertyGraph", "k_hop_count", "k_hop_frontier", "__version__"]
