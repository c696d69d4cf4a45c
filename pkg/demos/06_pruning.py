# Two pruning strategies around a level set.
#
# Parameter pruning: a hidden neuron whose pre-activation is negative at
# every boundary vertex contributes nothing on the shape and can be deleted
# outright (its weight row, bias entry, and outgoing column).
#
# Subdivision pruning: while extracting only the level set, an edge whose
# endpoints agree in sign for every not-yet-processed neuron can never split
# again, so it is dropped after each layer, shrinking all later iterations.

import numpy as np

from relucomplex.geometry import boundary_subcomplex
from relucomplex.model import (
    NeuronSchedule,
    batch_preactivations,
    classify_neurons_on_boundary,
    prune_stably_negative,
    random_model,
    shift_output_bias,
)
from relucomplex.skeleton import init_hypercube
from relucomplex.subdivide import extract_complex
from relucomplex.validate import sample_domain

net = random_model(2, 3, 12, 1, seed=0)
domain, _ = init_hypercube(2, -1.0, 1.0)
vals = batch_preactivations(net, sample_domain(domain, 1000, 7))[-1][:, 0]
net = shift_output_bias(net, -float(np.median(vals)))
schedule = NeuronSchedule.for_model(net, include_output=True)

# -- parameter pruning ---------------------------------------------------------
domain, sk = init_hypercube(2, -1.0, 1.0)
sk, _ = extract_complex(net, domain, sk, schedule)
mesh = boundary_subcomplex(sk, schedule.output_entry(sk.m))
labels = classify_neurons_on_boundary(net, mesh.positions)
tally = {}
for label in labels.values():
    tally[label] = tally.get(label, 0) + 1
print("neuron labels on the boundary:", tally)

pruned = prune_stably_negative(net, labels)
print("widths %s -> %s" % (list(net.widths), list(pruned.widths)))
print("parameters %d -> %d" % (net.parameter_count(), pruned.parameter_count()))

# removal is exact wherever every pruned neuron is inactive; in particular
# on the boundary itself (elsewhere a boundary-dead neuron may still fire)
dead = [n for n, label in labels.items() if label == "stably_negative"]
pts = sample_domain(domain, 10000, 3)
pres = batch_preactivations(net, pts)
inactive = np.all(
    np.column_stack([pres[n.layer - 1][:, n.index] < 0 for n in dead]), axis=1
)
drift_inactive = np.abs(
    pres[-1][inactive] - batch_preactivations(pruned, pts[inactive])[-1]
).max()
drift_boundary = np.abs(
    batch_preactivations(net, mesh.positions)[-1]
    - batch_preactivations(pruned, mesh.positions)[-1]
).max()
print("max |f_pruned - f| where pruned neurons inactive (%d/10000 samples): %.2e" % (
    inactive.sum(), drift_inactive))
print("max |f_pruned - f| at the %d boundary vertices: %.2e" % (
    mesh.n_vertices, drift_boundary))

# -- pruning during subdivision --------------------------------------------------
for prune in (False, True):
    domain, sk = init_hypercube(2, -1.0, 1.0)
    sk, stats = extract_complex(net, domain, sk, schedule, level_set_prune=prune)
    mesh = boundary_subcomplex(sk, schedule.output_entry(sk.m))
    print("level_set_prune=%-5s edges processed %6d, final %5d, boundary %d/%d" % (
        prune, sum(s.edges_before for s in stats), sk.n_edges_alive,
        mesh.n_vertices, mesh.n_edges))
