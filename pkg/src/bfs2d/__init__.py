"""Distributed-memory BFS with 2D decomposition on a simulated process grid."""
from .graph import CSRMatrix, DCSCMatrix, EdgeList, column_adjacency, csr_from_edges, dcsc_from_edges
from .grid import DistributedGraph, ProcGrid, VertexOwnership, distribute
from .rmat import RmatParams, canonicalize, generate
from .vectors import SPA, DenseBitmap, SparseVector, spmsv

__version__ = "0.1.0"
