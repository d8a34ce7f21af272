"""
Static network topologies: construction, Price-model generation, spectra.

A :class:`Graph` stores its adjacency as per-node sorted neighbour lists in
CSR form (``indptr``/``indices``). Instances are immutable and can be shared
freely between threads or processes.
"""
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .exceptions import ConvergenceError, ValidationError


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on nodes ``0..n-1``.

    Use :func:`build_from_edges` or :func:`generate_price` rather than the
    constructor; they guarantee the symmetry / no-self-loop / no-duplicate
    invariants.
    """

    n: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges})"

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @cached_property
    def degrees(self):
        deg = np.diff(self.indptr)
        deg.setflags(write=False)
        return deg

    @property
    def n_edges(self):
        return len(self.indices) // 2

    def edges(self):
        """Edge array of shape (n_edges, 2) with ``i < j``, lexicographically sorted."""
        rows = np.repeat(np.arange(self.n), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    @cached_property
    def adjacency(self):
        """Symmetric CSR adjacency matrix with float entries."""
        data = np.ones(len(self.indices))
        mat = sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))
        return mat

    def subgraph(self, nodes):
        """Node-induced subgraph; nodes are relabelled in ascending order."""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        if nodes.size and (nodes[0] < 0 or nodes[-1] >= self.n):
            raise ValidationError("subgraph nodes out of range")
        relabel = np.full(self.n, -1, dtype=np.int64)
        relabel[nodes] = np.arange(nodes.size)
        e = self.edges()
        if len(e):
            e = relabel[e]
            e = e[(e >= 0).all(axis=1)]
        return build_from_edges(int(nodes.size), e)


def _validated_edges(n, edges):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError(f"node count must be a positive integer, got {n!r}")
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError("edges must be a sequence of (i, j) pairs")
    bad = (arr < 0) | (arr >= n)
    if bad.any():
        i, j = arr[np.flatnonzero(bad.any(axis=1))[0]]
        raise ValidationError(f"edge ({i}, {j}) has an endpoint outside [0, {n})")
    loops = arr[:, 0] == arr[:, 1]
    if loops.any():
        i = arr[np.flatnonzero(loops)[0], 0]
        raise ValidationError(f"edge ({i}, {i}) is a self-loop")
    return arr


def build_from_edges(n, edges):
    """Build a :class:`Graph` from node pairs.

    Edges are symmetrised and duplicates (in either orientation) collapse.

    Raises
    ------
    ValidationError
        If an endpoint is outside ``[0, n)`` or an edge is a self-loop.
    """
    arr = _validated_edges(n, edges)
    both = np.concatenate([arr, arr[:, ::-1]])
    both = np.unique(both, axis=0)
    counts = np.bincount(both[:, 0], minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return Graph(int(n), indptr, both[:, 1].copy())


def complete_graph(n):
    return build_from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves):
    return build_from_edges(leaves + 1, [(0, j) for j in range(1, leaves + 1)])


def ring_graph(n):
    return build_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def generate_price(n, m=2, seed=None):
    """Grow a Price / preferential-attachment graph, treated as undirected.

    Starts from a complete graph on ``m + 1`` nodes. Each arriving node links to
    ``m`` distinct existing nodes chosen with probability proportional to
    ``degree + 1``. Mean degree is ``2m`` up to a boundary correction.

    Parameters
    ----------
    n : int
        Final node count; must exceed ``m``.
    m : int
        Links added per arriving node.
    seed : int or None
        Seed for ``numpy.random.default_rng``; equal seeds give identical graphs.
    """
    if m < 1 or n <= m:
        raise ValidationError(f"Price model needs n > m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    core = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    edges = np.empty((len(core) + m * (n - m - 1), 2), dtype=np.int64)
    edges[: len(core)] = core
    weight = np.zeros(n)
    weight[: m + 1] = m + 1  # degree m plus the attractiveness offset
    pos = len(core)
    for new in range(m + 1, n):
        w = weight[:new]
        targets = rng.choice(new, size=m, replace=False, p=w / w.sum())
        edges[pos:pos + m, 0] = new
        edges[pos:pos + m, 1] = targets
        pos += m
        weight[targets] += 1
        weight[new] = m + 1
    return build_from_edges(n, edges)


def fit_powerlaw_exponent(degrees, kmin=4):
    """Maximum-likelihood tail exponent of a degree sample (discrete approximation,
    Clauset-Shalizi-Newman) using degrees ``>= kmin``."""
    k = np.asarray(degrees, dtype=float)
    k = k[k >= kmin]
    if k.size == 0:
        raise ValidationError(f"no degrees >= {kmin}")
    return 1.0 + k.size / np.log(k / (kmin - 0.5)).sum()


class SpectralResult(NamedTuple):
    lambda_max: float
    eigenvector: np.ndarray
    residual: float
    n_iter: int


def largest_real_eigenvalue(g, tol=1e-10, max_iter=100_000, shift=1.0):
    """Perron eigenvalue of the adjacency matrix by shifted power iteration.

    Iterates on ``A + shift * I`` from the uniform vector so that bipartite
    graphs (spectrum symmetric about zero) still converge. Stops when the
    eigen-residual ``max|A x - lambda x|`` drops to ``tol``.

    Raises
    ------
    ConvergenceError
        After ``max_iter`` iterations; carries the last iterate and residual.
    """
    if g.n < 1:
        raise ValidationError("graph is empty")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    x = np.full(g.n, 1.0 / np.sqrt(g.n))
    if g.n_edges == 0:
        return SpectralResult(0.0, x, 0.0, 0)
    A = g.adjacency
    residual = np.inf
    for it in range(1, max_iter + 1):
        y = A @ x
        lam = float(x @ y)
        residual = float(np.max(np.abs(y - lam * x)))
        if residual <= tol:
            return SpectralResult(lam, x, residual, it)
        y += shift * x
        x = y / np.linalg.norm(y)
    raise ConvergenceError(
        f"power iteration did not reach residual {tol:g} in {max_iter} iterations "
        f"(last residual {residual:.3g})",
        last_iterate=x,
        residual=residual,
    )


class DegreeStats(NamedTuple):
    mean: float
    max: int
    histogram: dict
    n_components: int


def degree_stats(g):
    deg = g.degrees
    n_comp, _ = connected_components(g.adjacency, directed=False)
    hist = dict(sorted(Counter(deg.tolist()).items()))
    return DegreeStats(2.0 * g.n_edges / g.n, int(deg.max(initial=0)), hist, int(n_comp))


def write_edge_list(g, path):
    """Write ``g`` as ``i j`` lines (``i < j``) after a ``# nodes <n>`` comment.

    The node-count comment preserves trailing isolated nodes; it is the only
    comment the reader interprets.
    """
    lines = [f"# nodes {g.n}\n"]
    lines.extend(f"{i} {j}\n" for i, j in g.edges().tolist())
    with open(path, "w", newline="\n") as fh:
        fh.writelines(lines)


def read_edge_list(path, n=None):
    """Read an edge-list file. ``n`` defaults to the ``# nodes`` header when
    present, otherwise to one more than the largest endpoint."""
    edges = []
    header_n = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "nodes" and header_n is None:
                    header_n = int(parts[1])
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValidationError(f"{path}:{lineno}: expected 'i j', got {line!r}")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
    if n is None:
        n = header_n if header_n is not None else (max(max(e) for e in edges) + 1 if edges else 1)
    return build_from_edges(n, edges)
