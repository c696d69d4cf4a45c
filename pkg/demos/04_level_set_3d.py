# Polygon mesh of a 3-D level set. The output bias is shifted so the zero
# level set cuts through the domain, faces are reassembled from the
# 1-skeleton by perturbation, and the result is written as an OBJ file.

from pathlib import Path

import numpy as np

from relucomplex.geometry import assemble_faces, boundary_subcomplex, export_obj
from relucomplex.model import (
    NeuronSchedule,
    batch_preactivations,
    random_model,
    shift_output_bias,
)
from relucomplex.skeleton import init_hypercube
from relucomplex.subdivide import extract_complex
from relucomplex.validate import sample_domain

net = random_model(3, 3, 10, 1, seed=1)
domain, sk = init_hypercube(3, -1.0, 1.0)
vals = batch_preactivations(net, sample_domain(domain, 1000, 7))[-1][:, 0]
net = shift_output_bias(net, -float(np.median(vals)))

schedule = NeuronSchedule.for_model(net, include_output=True)
sk, stats = extract_complex(net, domain, sk, schedule, level_set_prune=True)
out_entry = schedule.output_entry(sk.m)

mesh = boundary_subcomplex(sk, out_entry)
mesh = assemble_faces(mesh, sk, sk.m, net, schedule)
sides = [len(loop) for loop in mesh.faces]
print("boundary: %d vertices, %d edges, %d faces" % (
    mesh.n_vertices, mesh.n_edges, len(mesh.faces)))
print("polygon sides: min %d, max %d, mean %.2f" % (
    min(sides), max(sides), np.mean(sides)))

out = Path("out")
out.mkdir(exist_ok=True)
export_obj(mesh, out / "level_set.obj")
print("wrote", out / "level_set.obj")
