"""The evolving 1-skeleton and its bounded polyhedral domains.

Storage is struct-of-arrays: flat numpy arrays per field, append-only growth
within an iteration, dead cells flagged rather than removed, and deferred
compaction. Sign matrices are int8 with values in {-1, 0, +1}; rows align
with vertex/edge ids.
"""

from dataclasses import dataclass, field

import numpy as np

from . import signvec


class SkeletonError(RuntimeError):
    """A structural invariant of the skeleton is violated."""


@dataclass(frozen=True)
class Halfspace:
    """Affine halfspace; the interior side is positive: w.x - b >= 0."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64)
        if n.ndim != 1 or not np.any(n != 0.0):
            raise ValueError("halfspace normal must be a non-zero vector")
        object.__setattr__(self, "normal", n)

    def value(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return points @ self.normal - self.offset


@dataclass
class Domain:
    """Bounded intersection of m affine halfspaces."""

    facets: list
    kind: str
    dim: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.normals = np.array([h.normal for h in self.facets], dtype=np.float64)
        self.offsets = np.array([h.offset for h in self.facets], dtype=np.float64)

    @property
    def m(self):
        return len(self.facets)

    def facet_values(self, points):
        """(n, m) matrix of facet values; >= 0 means inside that halfspace."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return points @ self.normals.T - self.offsets

    def contains(self, points, tol=1e-9):
        return np.all(self.facet_values(points) >= -tol, axis=1)

    @property
    def extent(self):
        return self.meta["extent"]


class Skeleton:
    """Vertices (positions + signs) and edges (id pairs + signs).

    Edge endpoint pairs are stored (lo, hi) with lo < hi. `t` is the number
    of neurons processed so far; all sign rows have width m + t.
    """

    def __init__(self, dim, m, positions, vertex_signs, edges, edge_signs):
        self.dim = int(dim)
        self.m = int(m)
        self.positions = np.asarray(positions, dtype=np.float64)
        self.vertex_signs = np.asarray(vertex_signs, dtype=np.int8)
        self.vertex_alive = np.ones(len(self.positions), dtype=bool)
        self.edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.edge_signs = np.asarray(edge_signs, dtype=np.int8)
        self.edge_alive = np.ones(len(self.edges), dtype=bool)
        self.degenerate_count = 0

    # -- bookkeeping ----------------------------------------------------------

    @property
    def t(self):
        return self.vertex_signs.shape[1] - self.m

    @property
    def sign_width(self):
        return self.vertex_signs.shape[1]

    @property
    def n_vertices(self):
        return len(self.positions)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_vertices_alive(self):
        return int(np.count_nonzero(self.vertex_alive))

    @property
    def n_edges_alive(self):
        return int(np.count_nonzero(self.edge_alive))

    def alive_vertex_ids(self):
        return np.flatnonzero(self.vertex_alive)

    def alive_edge_ids(self):
        return np.flatnonzero(self.edge_alive)

    def nbytes(self):
        return (
            self.positions.nbytes
            + self.vertex_signs.nbytes
            + self.vertex_alive.nbytes
            + self.edges.nbytes
            + self.edge_signs.nbytes
            + self.edge_alive.nbytes
        )

    # -- growth ---------------------------------------------------------------

    def append_sign_column(self, vertex_col, edge_col):
        self.vertex_signs = np.concatenate(
            [self.vertex_signs, np.asarray(vertex_col, dtype=np.int8)[:, None]], axis=1
        )
        self.edge_signs = np.concatenate(
            [self.edge_signs, np.asarray(edge_col, dtype=np.int8)[:, None]], axis=1
        )

    def append_vertices(self, positions, signs):
        positions = np.atleast_2d(np.asarray(positions, dtype=np.float64))
        first = self.n_vertices
        self.positions = np.concatenate([self.positions, positions], axis=0)
        self.vertex_signs = np.concatenate(
            [self.vertex_signs, np.asarray(signs, dtype=np.int8)], axis=0
        )
        self.vertex_alive = np.concatenate(
            [self.vertex_alive, np.ones(len(positions), dtype=bool)]
        )
        return np.arange(first, self.n_vertices)

    def append_edges(self, pairs, signs):
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if pairs.size and np.any(pairs[:, 0] >= pairs[:, 1]):
            raise SkeletonError("edge endpoints must satisfy lo < hi")
        first = self.n_edges
        self.edges = np.concatenate([self.edges, pairs], axis=0)
        self.edge_signs = np.concatenate(
            [self.edge_signs, np.asarray(signs, dtype=np.int8)], axis=0
        )
        self.edge_alive = np.concatenate(
            [self.edge_alive, np.ones(len(pairs), dtype=bool)]
        )
        return np.arange(first, self.n_edges)


# -- domain initializers -------------------------------------------------------


def init_hypercube(dim, lo, hi):
    """Hypercube [lo, hi]^dim: 2*dim facets, 2^dim vertices, dim*2^(dim-1) edges.

    Facet order is per axis j: x_j >= lo, then x_j <= hi. Corner ids
    enumerate axis sides as bits (bit j set means x_j = hi).
    """
    if lo >= hi:
        raise ValueError("need lo < hi")
    if dim < 1:
        raise ValueError("need dim >= 1")
    facets = []
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        facets.append(Halfspace(e.copy(), lo))
        facets.append(Halfspace(-e, -hi))
    domain = Domain(facets, "hypercube", dim, {"lo": lo, "hi": hi, "extent": hi - lo})

    n = 1 << dim
    ids = np.arange(n)
    bits = (ids[:, None] >> np.arange(dim)) & 1
    positions = np.where(bits == 1, hi, lo).astype(np.float64)
    vsigns = np.ones((n, 2 * dim), dtype=np.int8)
    for j in range(dim):
        vsigns[bits[:, j] == 0, 2 * j] = 0
        vsigns[bits[:, j] == 1, 2 * j + 1] = 0

    pairs = []
    esigns = []
    for j in range(dim):
        base = ids[bits[:, j] == 0]
        pairs.append(np.column_stack([base, base | (1 << j)]))
        esigns.append(signvec.merge_edge_rows(vsigns[base], vsigns[base | (1 << j)]))
    edges = np.concatenate(pairs, axis=0)
    esigns = np.concatenate(esigns, axis=0)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return domain, Skeleton(dim, 2 * dim, positions, vsigns, edges[order], esigns[order])


def init_simplex(dim, scale):
    """Simplex {x_j >= -scale for all j, sum(x) <= dim*scale}.

    dim+1 facets (axis facets first, the sum facet last), dim+1 vertices,
    dim*(dim+1)/2 edges; contains the origin in its interior. Vertex j
    (j < dim) maxes coordinate j; vertex dim is the all-(-scale) corner.
    """
    if scale <= 0:
        raise ValueError("need scale > 0")
    if dim < 1:
        raise ValueError("need dim >= 1")
    facets = []
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        facets.append(Halfspace(e, -scale))
    facets.append(Halfspace(-np.ones(dim), -dim * scale))
    domain = Domain(facets, "simplex", dim, {"scale": scale, "extent": 2 * dim * scale})

    n = dim + 1
    positions = np.full((n, dim), -scale, dtype=np.float64)
    for j in range(dim):
        positions[j, j] = (2 * dim - 1) * scale
    vsigns = np.zeros((n, dim + 1), dtype=np.int8)
    for j in range(dim):
        vsigns[j, j] = 1
        vsigns[j, dim] = 0
    vsigns[dim, :dim] = 0
    vsigns[dim, dim] = 1

    pairs = np.array([(a, b) for a in range(n) for b in range(a + 1, n)], dtype=np.int64)
    esigns = signvec.merge_edge_rows(vsigns[pairs[:, 0]], vsigns[pairs[:, 1]])
    return domain, Skeleton(dim, dim + 1, positions, vsigns, pairs, esigns)


# -- maintenance ---------------------------------------------------------------


def compact(sk):
    """New skeleton with dead cells dropped and ids densely remapped.

    Surviving cells keep their relative order (ascending original id).
    """
    vkeep = sk.vertex_alive
    ekeep = sk.edge_alive
    vmap = np.cumsum(vkeep) - 1
    out = Skeleton(
        sk.dim,
        sk.m,
        sk.positions[vkeep].copy(),
        sk.vertex_signs[vkeep].copy(),
        vmap[sk.edges[ekeep]],
        sk.edge_signs[ekeep].copy(),
    )
    out.degenerate_count = sk.degenerate_count
    check_invariants(out)
    return out


def check_invariants(sk):
    """Verify the four structural invariants; O(|V| + |E|). Raises SkeletonError."""
    if sk.vertex_signs.shape != (sk.n_vertices, sk.sign_width):
        raise SkeletonError("vertex sign matrix shape mismatch")
    if sk.edge_signs.shape != (sk.n_edges, sk.sign_width):
        raise SkeletonError("edge sign matrix width mismatch")
    ae = sk.alive_edge_ids()
    if ae.size:
        ends = sk.edges[ae]
        if not np.all(sk.vertex_alive[ends].all(axis=1)):
            raise SkeletonError("alive edge references dead vertex")
        if np.any(ends[:, 0] >= ends[:, 1]):
            raise SkeletonError("edge endpoint ordering violated")
    av = sk.alive_vertex_ids()
    vzeros = np.count_nonzero(sk.vertex_signs[av] == 0, axis=1)
    if av.size and not np.all(vzeros == sk.dim):
        bad = av[vzeros != sk.dim][0]
        raise SkeletonError(f"vertex {bad} has {vzeros[vzeros != sk.dim][0]} zeros, expected {sk.dim}")
    ezeros = np.count_nonzero(sk.edge_signs[ae] == 0, axis=1)
    if ae.size and not np.all(ezeros == sk.dim - 1):
        bad = ae[ezeros != sk.dim - 1][0]
        raise SkeletonError(f"edge {bad} zero count is not {sk.dim - 1}")
    if ae.size:
        merged = signvec.merge_edge_rows(
            sk.vertex_signs[sk.edges[ae, 0]], sk.vertex_signs[sk.edges[ae, 1]]
        )
        if not np.array_equal(merged, sk.edge_signs[ae]):
            raise SkeletonError("edge sign-vector disagrees with its endpoints")
