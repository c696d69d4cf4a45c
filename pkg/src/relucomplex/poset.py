"""Rebuilding higher-dimensional cells from the 1-skeleton.

Perturbing each zero of a k-cell's sign-vector names its parent (k+1)-cells,
so iterating perturbation and deduplication from the edge set reconstructs
every cell dimension up to the regions, including the child links of the
inclusion order.
"""

from dataclasses import dataclass

import numpy as np

from . import signvec


class CountBudgetError(RuntimeError):
    """Cell counting exceeded its memory budget; partial counts attached."""

    def __init__(self, message, partial_counts):
        super().__init__(message)
        self.partial_counts = partial_counts


@dataclass
class CellSet:
    """Deduplicated k-cells in canonical key order.

    `children[i]` holds indices into the generating (k-1)-cell set (None in
    counting mode); `source_ids` maps rows back to skeleton ids for sets
    lifted directly from the skeleton.
    """

    dim: int
    signs: np.ndarray
    children: list = None
    source_ids: np.ndarray = None

    def __len__(self):
        return len(self.signs)


def cellsets_from_skeleton(sk):
    """(vertex CellSet, edge CellSet) for the alive part of a skeleton."""
    av = sk.alive_vertex_ids()
    vrows = sk.vertex_signs[av]
    vuniq, vinv, vcounts = signvec.group_rows(vrows)
    if len(vuniq) != len(vrows):
        raise ValueError("alive vertices carry duplicate sign-vectors")
    vorder = np.argsort(vinv, kind="stable")
    verts = CellSet(0, vuniq, None, av[vorder])
    vpos = np.empty(sk.n_vertices, dtype=np.int64)
    vpos[av[vorder]] = np.arange(len(av))

    ae = sk.alive_edge_ids()
    erows = sk.edge_signs[ae]
    euniq, einv, ecounts = signvec.group_rows(erows)
    if len(euniq) != len(erows):
        raise ValueError("alive edges carry duplicate sign-vectors")
    eorder = np.argsort(einv, kind="stable")
    eids = ae[eorder]
    children = [np.sort(vpos[sk.edges[e]]) for e in eids]
    edges = CellSet(1, euniq, children, eids)
    return verts, edges


def build_parent_cells(cells, m, with_children=True):
    """All (k+1)-cells generated by perturbing a k-cell set."""
    cand, src = signvec.perturb_rows(cells.signs, m)
    uniq, inverse, counts = signvec.group_rows(cand)
    children = None
    if with_children:
        order = np.argsort(inverse, kind="stable")
        bounds = np.concatenate([[0], np.cumsum(counts)])
        srcs = src[order]
        children = [
            np.sort(srcs[bounds[g] : bounds[g + 1]]) for g in range(len(uniq))
        ]
    return CellSet(cells.dim + 1, uniq, children)


def _parents_counting(rows, m, max_cells, chunk_rows=1 << 18):
    """Deduplicated parent rows without child links, chunked for memory."""
    pieces = []
    for start in range(0, len(rows), chunk_rows):
        cand, _ = signvec.perturb_rows(rows[start : start + chunk_rows], m)
        uniq, _, _ = signvec.group_rows(cand)
        pieces.append(uniq)
    merged, _, _ = signvec.group_rows(np.concatenate(pieces, axis=0))
    if max_cells is not None and len(merged) > max_cells:
        raise CountBudgetError(f"{len(merged)} cells exceed budget {max_cells}", None)
    return merged


def count_cells(sk, m, up_to, max_cells=None):
    """Cell counts n_0..n_up_to; dims 0 and 1 read off the skeleton.

    On budget overrun raises CountBudgetError carrying the counts completed
    so far.
    """
    if up_to > sk.dim:
        raise ValueError("up_to exceeds the ambient dimension")
    counts = [sk.n_vertices_alive]
    if up_to >= 1:
        counts.append(sk.n_edges_alive)
    rows = sk.edge_signs[sk.alive_edge_ids()]
    for k in range(2, up_to + 1):
        try:
            rows = _parents_counting(rows, m, max_cells)
        except CountBudgetError as exc:
            raise CountBudgetError(str(exc), list(counts)) from None
        counts.append(len(rows))
    return counts


def region_signatures(sk, m):
    """Sign-vectors of all D-cells (no zeros), canonical key order."""
    rows = sk.edge_signs[sk.alive_edge_ids()]
    for k in range(2, sk.dim + 1):
        rows = _parents_counting(rows, m, None)
    if rows.size and np.any(rows == 0):
        raise ValueError("region signature still contains zeros")
    return rows


def euler_characteristic(counts):
    """Alternating sum of cell counts; 1 for any complex covering a ball."""
    return int(sum((-1) ** k * n for k, n in enumerate(counts)))
