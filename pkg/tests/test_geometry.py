import numpy as np
import pytest

from conftest import centered_output_net
from relucomplex.geometry import (
    EmptyBoundaryError,
    area_divergence_2d,
    area_perimeter_2d,
    assemble_faces,
    boundary_subcomplex,
    compactness,
    distance_histogram,
    export_csv,
    export_obj,
    export_svg,
)
from relucomplex.model import (
    LayerSpec,
    MlpSpec,
    NeuronSchedule,
    diamond_model,
)
from relucomplex.skeleton import init_hypercube
from relucomplex.subdivide import extract_complex
from relucomplex.validate import match_point_sets


def extract_with_output(net, lo, hi):
    domain, sk = init_hypercube(net.in_dim, lo, hi)
    schedule = NeuronSchedule.for_model(net, include_output=True)
    sk, _ = extract_complex(net, domain, sk, schedule)
    return domain, schedule, sk, schedule.output_entry(sk.m)


@pytest.fixture(scope="module")
def diamond():
    net = diamond_model()
    domain, schedule, sk, out_entry = extract_with_output(net, -2.0, 2.0)
    return net, domain, schedule, sk, out_entry


def test_diamond_boundary_cells(diamond):
    net, domain, schedule, sk, out_entry = diamond
    mesh = boundary_subcomplex(sk, out_entry)
    assert mesh.n_vertices == 4 and mesh.n_edges == 4
    assert match_point_sets(
        mesh.positions, [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], 0.0
    )
    assert np.all(mesh.signs[:, out_entry] == 0)


def test_diamond_metrics(diamond):
    net, domain, schedule, sk, out_entry = diamond
    metrics = area_perimeter_2d(sk, out_entry, sk.m)
    assert metrics.area == pytest.approx(2.0, abs=1e-12)
    assert metrics.perimeter == pytest.approx(4.0 * np.sqrt(2.0), abs=1e-12)
    assert metrics.compactness == pytest.approx(np.pi / 4.0, abs=1e-12)


def test_diamond_divergence_cross_check(diamond):
    net, domain, schedule, sk, out_entry = diamond
    shoelace = area_perimeter_2d(sk, out_entry, sk.m).area
    div = area_divergence_2d(sk, out_entry, sk.m, net, domain, schedule)
    assert abs(shoelace - div) <= 1e-9


def test_divergence_cross_check_random():
    net = centered_output_net(2, 3, 8, seed=3)
    domain, schedule, sk, out_entry = extract_with_output(net, -1.0, 1.0)
    metrics = area_perimeter_2d(sk, out_entry, sk.m)
    div = area_divergence_2d(sk, out_entry, sk.m, net, domain, schedule)
    assert abs(metrics.area - div) <= 1e-9


def test_compactness_values():
    assert compactness(np.pi, 2.0 * np.pi) == 1.0
    assert compactness(2.0, 4.0 * np.sqrt(2.0)) == pytest.approx(np.pi / 4, abs=1e-12)
    assert compactness(0.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        compactness(1.0, 0.0)


def test_boundary_out_entry_range(diamond):
    net, domain, schedule, sk, out_entry = diamond
    with pytest.raises(ValueError):
        boundary_subcomplex(sk, sk.sign_width)


def test_empty_level_set():
    # output = ReLU(x) + 100 never crosses zero on the domain
    net = MlpSpec(
        (
            LayerSpec(np.array([[1.0, 0.0]]), np.array([0.0])),
            LayerSpec(np.array([[1.0]]), np.array([100.0])),
        ),
        2,
    )
    domain, schedule, sk, out_entry = extract_with_output(net, -1.0, 1.0)
    mesh = boundary_subcomplex(sk, out_entry)
    assert mesh.n_vertices == 0 and mesh.n_edges == 0
    with pytest.raises(EmptyBoundaryError):
        area_perimeter_2d(sk, out_entry, sk.m)


def test_boundary_vertex_degree_2(diamond):
    # level set is a 1-manifold: interior boundary vertices have degree 2
    net, domain, schedule, sk, out_entry = diamond
    mesh = boundary_subcomplex(sk, out_entry)
    degree = np.bincount(mesh.edges.ravel(), minlength=mesh.n_vertices)
    on_facet = np.any(mesh.signs[:, : sk.m] == 0, axis=1)
    assert np.all(degree[~on_facet] == 2)


def test_boundary_vertex_degree_2_random():
    net = centered_output_net(2, 4, 10, seed=1)
    domain, schedule, sk, out_entry = extract_with_output(net, -1.0, 1.0)
    mesh = boundary_subcomplex(sk, out_entry)
    degree = np.bincount(mesh.edges.ravel(), minlength=mesh.n_vertices)
    on_facet = np.any(mesh.signs[:, : sk.m] == 0, axis=1)
    assert np.all(degree[~on_facet] == 2)
    assert np.all(degree[on_facet] == 1)


def plane_net():
    return MlpSpec((LayerSpec(np.array([[0.0, 0.0, 1.0]]), np.array([0.0])),), 3)


def test_plane_face_assembly(tmp_path):
    net = plane_net()
    domain, schedule, sk, out_entry = extract_with_output(net, -1.0, 1.0)
    mesh = boundary_subcomplex(sk, out_entry)
    mesh = assemble_faces(mesh, sk, sk.m, net, schedule)
    assert mesh.n_vertices == 4 and mesh.n_edges == 4
    assert len(mesh.faces) == 1
    loop = mesh.positions[mesh.faces[0]]
    # in-plane shoelace: the square z=0 in [-1,1]^3 has area 4
    x, y = loop[:, 0], loop[:, 1]
    area = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    assert area == pytest.approx(4.0, abs=1e-12)
    # orientation: counter-clockwise around +z (the output gradient)
    signed = 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    assert signed > 0
    path = tmp_path / "plane.obj"
    export_obj(mesh, path)
    text = path.read_text().splitlines()
    assert sum(1 for l in text if l.startswith("v ")) == 4
    assert sum(1 for l in text if l.startswith("f ")) == 1


def test_random_3d_faces_edge_sharing():
    net = centered_output_net(3, 2, 6, seed=2)
    domain, schedule, sk, out_entry = extract_with_output(net, -1.0, 1.0)
    mesh = boundary_subcomplex(sk, out_entry)
    mesh = assemble_faces(mesh, sk, sk.m, net, schedule)
    assert len(mesh.faces) > 0
    # count face membership per boundary edge
    pair_count = {}
    for loop in mesh.faces:
        for i in range(len(loop)):
            a, b = loop[i], loop[(i + 1) % len(loop)]
            key = (min(a, b), max(a, b))
            pair_count[key] = pair_count.get(key, 0) + 1
    edge_on_facet = np.any(mesh.edge_signs[:, : sk.m] == 0, axis=1)
    for i, (a, b) in enumerate(mesh.edges):
        key = (min(a, b), max(a, b))
        shared = pair_count.get(key, 0)
        assert shared == (1 if edge_on_facet[i] else 2)


def test_distance_histogram_trivial():
    _, sk = init_hypercube(2, -1.0, 1.0)
    hist = distance_histogram(sk)
    assert hist.boundary_fraction == 1.0 and hist.interior_fraction == 0.0
    assert np.allclose(hist.r, np.sqrt(2.0))
    assert hist.interior_fraction + hist.boundary_fraction == 1.0
    assert hist.boundary.sum() == 4


def test_svg_export(diamond, tmp_path):
    net, domain, schedule, sk, out_entry = diamond
    path = tmp_path / "diamond.svg"
    export_svg(sk, path, out_entry, box=([-2, -2], [2, 2]))
    text = path.read_text()
    heavy = text.split('stroke="#d62728"')[1]
    assert heavy.count("<line") == 4
    again = tmp_path / "again.svg"
    export_svg(sk, again, out_entry, box=([-2, -2], [2, 2]))
    assert path.read_bytes() == again.read_bytes()
    with pytest.raises(ValueError):
        export_svg(init_hypercube(3, 0, 1)[1], tmp_path / "x.svg")


def test_csv_export(tmp_path, diamond):
    net, domain, schedule, sk, out_entry = diamond
    export_csv(sk, tmp_path)
    vlines = (tmp_path / "vertices.csv").read_text().splitlines()
    elines = (tmp_path / "edges.csv").read_text().splitlines()
    assert vlines[0] == "id,x_0,x_1,sign"
    assert elines[0] == "id,v_lo,v_hi,sign"
    assert len(vlines) == sk.n_vertices_alive + 1
    assert len(elines) == sk.n_edges_alive + 1
