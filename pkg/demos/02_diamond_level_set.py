# Level-set extraction with exact ground truth: a hand-built network
# computing |x| + |y| - 1, whose zero level set is the L1 diamond with
# vertices (+-1, 0) and (0, +-1). Area 2, perimeter 4*sqrt(2), and shape
# compactness 4*pi*A/P^2 = pi/4 are all known in closed form.

from pathlib import Path

import numpy as np

from relucomplex.geometry import (
    area_divergence_2d,
    area_perimeter_2d,
    boundary_subcomplex,
    export_svg,
)
from relucomplex.model import NeuronSchedule, diamond_model
from relucomplex.skeleton import init_hypercube
from relucomplex.subdivide import extract_complex

net = diamond_model()
domain, sk = init_hypercube(2, -2.0, 2.0)
schedule = NeuronSchedule.for_model(net, include_output=True)
sk, stats = extract_complex(net, domain, sk, schedule)
out_entry = schedule.output_entry(sk.m)

mesh = boundary_subcomplex(sk, out_entry)
print("complex : %d vertices, %d edges" % (sk.n_vertices_alive, sk.n_edges_alive))
print("boundary: %d vertices, %d edges" % (mesh.n_vertices, mesh.n_edges))
print("tips    :", sorted(map(tuple, mesh.positions.tolist())))

metrics = area_perimeter_2d(sk, out_entry, sk.m)
print("area        %.17g  (exact 2)" % metrics.area)
print("perimeter   %.17g  (exact 4*sqrt(2) = %.17g)" % (metrics.perimeter, 4 * np.sqrt(2)))
print("compactness %.17g  (exact pi/4    = %.17g)" % (metrics.compactness, np.pi / 4))

# independent area route: divergence theorem over the oriented boundary
div_area = area_divergence_2d(sk, out_entry, sk.m, net, domain, schedule)
print("area via divergence theorem: %.17g" % div_area)

out = Path("out")
out.mkdir(exist_ok=True)
export_svg(sk, out / "diamond.svg", out_entry, box=([-2, -2], [2, 2]))
print("wrote", out / "diamond.svg", "(light: full complex, heavy: level set)")
