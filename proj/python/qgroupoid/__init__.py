"""Finite quantum groupoids (weak Hopf C*-algebras) given by structure tensors.

Coordinates are concatenated row-major matrix-unit blocks. Reports come back as plain dicts.
"""

import json as _json

from . import _core
from ._core import (
    AlgebraError,
    IoError,
    WeakHopfAlgebra,
    bidual_residual,
    build_example,
    build_from_presentation,
    dual,
    haar_functional,
    haar_projection,
    heisenberg_blocks,
    reduced_depth_formula,
    wha_from_json,
)

__all__ = [
    "AlgebraError",
    "IoError",
    "WeakHopfAlgebra",
    "bidual_residual",
    "build_example",
    "build_from_presentation",
    "coideals",
    "depth_from_graph",
    "dual",
    "extract",
    "galois",
    "haar_functional",
    "haar_projection",
    "heisenberg_blocks",
    "path_graph",
    "principal_graph",
    "reduced_depth_formula",
    "strong_invariance",
    "tower_summary",
    "verify_axioms",
    "wha_from_json",
]


def _graph_json(graph):
    return graph if isinstance(graph, str) else _json.dumps(graph)


def path_graph(n):
    """Graph dict for A_n rooted at an end."""
    return {"vertices": [f"v{i}" for i in range(n)], "edges": [[i, i + 1] for i in range(n - 1)], "root": 0}


def verify_axioms(W, tol=1e-9):
    return _json.loads(_core._verify_axioms(W, tol))


def strong_invariance(W, phi=None):
    return _json.loads(_core._strong_invariance(W, phi))


def coideals(W, conjugacy=False, max_dim=16, tol=1e-9):
    """Lattice dict (nodes, covering edges) and the list of orthonormal bases."""
    lattice, bases = _core._coideals(W, conjugacy, max_dim, tol)
    return _json.loads(lattice), bases


def galois(W, tol=1e-9):
    return _json.loads(_core._galois(W, tol))


def principal_graph(W, coideal=None, tol=1e-9):
    """Principal graph of K (columns of `coideal` span K; K = B when omitted) and its DOT text."""
    report, dot = _core._principal_graph(W, coideal, tol)
    return _json.loads(report), dot


def depth_from_graph(graph, k=0):
    return _json.loads(_core._depth_from_graph(_graph_json(graph), k))


def tower_summary(graph, levels, tol=1e-9):
    return _json.loads(_core._tower_summary(_graph_json(graph), levels, tol))


def extract(graph, k, tol=1e-9):
    """Quantum groupoid of N subset M_k from the path tower of `graph`, with its report."""
    W, report = _core._extract(_graph_json(graph), k, tol)
    return W, _json.loads(report)
