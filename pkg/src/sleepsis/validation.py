"""Input coercion helpers, in the spirit of ``sklearn.utils.check_array``."""
import numbers

import numpy as np
import scipy.sparse as sp

from .exceptions import ValidationError
from .params import ModelParams


def check_graph(X):
    """Coerce ``X`` to a :class:`~sleepsis.graph.Graph`.

    Accepts a Graph, a square scipy sparse matrix, a square dense array, or a
    ``networkx`` graph with integer nodes ``0..n-1``. Matrices must be
    symmetric and 0/1 with an empty diagonal.
    """
    from .graph import Graph, build_from_edges

    if isinstance(X, Graph):
        return X
    if hasattr(X, "number_of_nodes") and hasattr(X, "edges"):
        n = X.number_of_nodes()
        if sorted(X.nodes()) != list(range(n)):
            raise ValidationError("networkx graph nodes must be 0..n-1")
        return build_from_edges(n, list(X.edges()))
    if sp.issparse(X):
        mat = sp.coo_matrix(X)
    else:
        arr = np.asarray(X)
        if arr.ndim != 2:
            raise ValidationError(f"expected a square adjacency matrix, got shape {arr.shape}")
        mat = sp.coo_matrix(arr)
    if mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"adjacency must be square, got {mat.shape}")
    mat = mat.tocsr()
    mat.eliminate_zeros()
    if mat.nnz and not np.all(mat.data == 1):
        raise ValidationError("adjacency entries must be 0 or 1")
    if (mat != mat.T).nnz:
        raise ValidationError("adjacency must be symmetric")
    coo = mat.tocoo()
    return build_from_edges(mat.shape[0], np.column_stack([coo.row, coo.col]))


def check_params(params):
    if isinstance(params, ModelParams):
        return params
    if isinstance(params, dict):
        return ModelParams(**params)
    try:
        return ModelParams(*params)
    except TypeError:
        raise ValidationError(f"cannot interpret {params!r} as (beta, gamma, u, v)") from None


def check_state(state, n, atol=1e-9):
    """Validate an ``(n, 4)`` per-node probability array; returns a float copy."""
    arr = np.array(state, dtype=float)
    if arr.shape != (n, 4):
        raise ValidationError(f"state must have shape ({n}, 4), got {arr.shape}")
    if np.any(arr < -atol) or np.any(arr > 1 + atol):
        raise ValidationError("state probabilities must lie in [0, 1]")
    if np.any(np.abs(arr.sum(axis=1) - 1.0) > atol):
        raise ValidationError("each node's state probabilities must sum to 1")
    return arr


def check_count(value, name, minimum=0):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValidationError(f"{name} must be >= {minimum}, got {value}")
    return int(value)
