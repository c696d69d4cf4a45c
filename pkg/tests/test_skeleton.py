import numpy as np
import pytest

from conftest import centered_output_net
from relucomplex.model import NeuronSchedule
from relucomplex.skeleton import (
    Halfspace,
    SkeletonError,
    check_invariants,
    compact,
    init_hypercube,
    init_simplex,
)
from relucomplex.subdivide import extract_complex


@pytest.mark.parametrize(
    "dim,n_vertices,n_edges",
    [(1, 2, 1), (2, 4, 4), (3, 8, 12), (10, 1024, 5120)],
)
def test_hypercube_counts(dim, n_vertices, n_edges):
    domain, sk = init_hypercube(dim, 0.0, 1.0)
    assert domain.m == 2 * dim
    assert sk.n_vertices_alive == n_vertices
    assert sk.n_edges_alive == n_edges
    check_invariants(sk)
    assert sk.t == 0


def test_hypercube_sign_structure():
    _, sk = init_hypercube(3, -1.0, 1.0)
    assert np.all(np.count_nonzero(sk.vertex_signs == 0, axis=1) == 3)
    assert np.all(np.count_nonzero(sk.edge_signs == 0, axis=1) == 2)
    # corner (-1,-1,-1) sits on the three lower facets
    corner = np.flatnonzero((sk.positions == -1.0).all(axis=1))[0]
    assert sk.vertex_signs[corner].tolist() == [0, 1, 0, 1, 0, 1]


def test_hypercube_bad_bounds():
    with pytest.raises(ValueError):
        init_hypercube(2, 1.0, 1.0)


@pytest.mark.parametrize("dim,n_vertices,n_edges", [(2, 3, 3), (10, 11, 55)])
def test_simplex_counts(dim, n_vertices, n_edges):
    domain, sk = init_simplex(dim, 1.0)
    assert domain.m == dim + 1
    assert sk.n_vertices_alive == n_vertices
    assert sk.n_edges_alive == n_edges
    check_invariants(sk)
    assert np.all(np.count_nonzero(sk.vertex_signs == 0, axis=1) == dim)


def test_simplex_contains_origin():
    domain, _ = init_simplex(3, 0.5)
    assert domain.contains(np.zeros((1, 3)), tol=0.0)[0]
    assert not domain.contains(np.full((1, 3), 100.0))[0]


def test_simplex_bad_scale():
    with pytest.raises(ValueError):
        init_simplex(2, 0.0)


def test_halfspace():
    with pytest.raises(ValueError):
        Halfspace(np.zeros(2), 0.0)
    h = Halfspace(np.array([1.0, 0.0]), -1.0)
    assert h.value(np.array([[0.0, 5.0]]))[0] == 1.0


def test_domain_facet_values():
    domain, _ = init_hypercube(2, 0.0, 1.0)
    vals = domain.facet_values(np.array([[0.25, 0.75]]))[0]
    assert vals.tolist() == [0.25, 0.75, 0.75, 0.25]
    assert domain.extent == 1.0


def test_compact_identity():
    _, sk = init_hypercube(2, 0.0, 1.0)
    out = compact(sk)
    assert np.array_equal(out.positions, sk.positions)
    assert np.array_equal(out.edges, sk.edges)


def test_compact_drops_dead():
    _, sk = init_hypercube(2, 0.0, 1.0)
    sk.edge_alive[sk.edges[:, 0] == 0] = False
    sk.vertex_alive[0] = False
    out = compact(sk)
    assert out.n_vertices == 3
    assert out.n_edges == 2
    check_invariants(out)


def test_compact_after_level_set_prune():
    net = centered_output_net(2, 2, 6, seed=4)
    domain, sk = init_hypercube(2, -1.0, 1.0)
    schedule = NeuronSchedule.for_model(net, include_output=True)
    out, _ = extract_complex(net, domain, sk, schedule, level_set_prune=True)
    assert out.n_vertices == out.n_vertices_alive
    assert out.n_edges == out.n_edges_alive
    # no isolated vertices survive compaction
    degree = np.bincount(out.edges.ravel(), minlength=out.n_vertices)
    assert degree.min() >= 1


def test_check_invariants_detects_corruption():
    _, sk = init_hypercube(2, 0.0, 1.0)
    sk.vertex_signs[0, 0] = 1
    with pytest.raises(SkeletonError):
        check_invariants(sk)


def test_append_edges_ordering_enforced():
    _, sk = init_hypercube(2, 0.0, 1.0)
    with pytest.raises(SkeletonError):
        sk.append_edges(np.array([[3, 1]]), sk.edge_signs[:1])
