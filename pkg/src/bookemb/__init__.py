"""Exact book embedding toolkit: graphs, embeddings, constraints, a
backtracking solver, a SAT encoding with a small DPLL, gadget builders and a
lemma harness."""

from .embedding import BookEmbedding, is_valid, validate_embedding
from .graph import CompactGraph, Graph
from .solver import Budget, Status, decide_k_pages, pagenumber

__version__ = "0.1.0"

__all__ = [
    "BookEmbedding",
    "Budget",
    "CompactGraph",
    "Graph",
    "Status",
    "decide_k_pages",
    "is_valid",
    "pagenumber",
    "validate_embedding",
]
