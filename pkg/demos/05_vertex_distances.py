# The effect of bounding the domain: on a large box, vertex distances from
# the origin are bi-modal. Interior vertices (folded hyperplane crossings)
# cluster near the origin where random folds concentrate; boundary vertices
# all sit at r >= half-width because every box facet is that far out.

from relucomplex.geometry import distance_histogram
from relucomplex.model import NeuronSchedule, random_model
from relucomplex.skeleton import init_hypercube
from relucomplex.subdivide import extract_complex

net = random_model(2, 4, 10, 1, seed=0)
domain, sk = init_hypercube(2, -100.0, 100.0)
sk, _ = extract_complex(net, domain, sk, NeuronSchedule.for_model(net))

hist = distance_histogram(sk, bins=32)
print("vertices: %d interior (%.0f%%), %d boundary (%.0f%%)" % (
    (~hist.is_boundary).sum(), 100 * hist.interior_fraction,
    hist.is_boundary.sum(), 100 * hist.boundary_fraction))
print("interior r range: %.3f .. %.3f" % (
    hist.r[~hist.is_boundary].min(), hist.r[~hist.is_boundary].max()))
print("boundary r range: %.3f .. %.3f" % (
    hist.r[hist.is_boundary].min(), hist.r[hist.is_boundary].max()))
print()
print("r / r_max    interior | boundary")
peak = max(hist.interior.max(), hist.boundary.max())
for i in range(len(hist.interior)):
    bar_i = "#" * int(round(30 * hist.interior[i] / peak))
    bar_b = "*" * int(round(30 * hist.boundary[i] / peak))
    print("%.3f-%.3f %9d %-30s | %d %s" % (
        hist.bin_edges[i], hist.bin_edges[i + 1],
        hist.interior[i], bar_i, hist.boundary[i], bar_b))
