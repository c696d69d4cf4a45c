# How the cost grows with the complex. Each iteration is linear-time
# vectorized work in the current vertex/edge counts (plus a log factor from
# sorting in the 2-face pairing step), so total time against final vertex
# count on a log-log plot should sit near a straight line.

import time

from relucomplex.model import NeuronSchedule, random_model
from relucomplex.skeleton import init_hypercube
from relucomplex.subdivide import extract_complex
from relucomplex.validate import scaling_report, split_bound_violations

runs = []
print(" width seed  vertices    edges  seconds")
for width in (5, 10, 20, 30):
    for seed in range(2):
        net = random_model(3, 4, width, 1, seed)
        domain, sk = init_hypercube(3, -1.0, 1.0)
        t0 = time.perf_counter()
        sk, stats = extract_complex(net, domain, sk, NeuronSchedule.for_model(net))
        dt = time.perf_counter() - t0
        print("%6d %4d %9d %8d %8.3f" % (
            width, seed, sk.n_vertices_alive, sk.n_edges_alive, dt))
        runs.append(stats)

rep = scaling_report(runs)
print()
print("log(time) vs log(|V|) slope: %.3f (rms residual %.3f)" % (
    rep.slope, rep.rms_residual))

# per-iteration splitting-edge fraction: mostly under D/i once i >> D,
# with occasional excursions above (single folds can be unusually large)
last = runs[-1]
over = split_bound_violations(last, 3)
print("iterations over the D/i splitting bound in the largest run:", over or "none")
