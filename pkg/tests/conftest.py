import numpy as np

from relucomplex.model import (
    NeuronSchedule,
    batch_preactivations,
    random_model,
    shift_output_bias,
)
from relucomplex.skeleton import init_hypercube
from relucomplex.subdivide import extract_complex
from relucomplex.validate import sample_domain


def extract_random(dim, depth, width, seed, lo=-1.0, hi=1.0, include_output=False, **kw):
    """Random net + hypercube domain + full extraction; returns everything."""
    net = random_model(dim, depth, width, 1, seed)
    domain, sk = init_hypercube(dim, lo, hi)
    schedule = NeuronSchedule.for_model(net, include_output=include_output)
    sk, stats = extract_complex(net, domain, sk, schedule, **kw)
    return net, domain, schedule, sk, stats


def centered_output_net(dim, depth, width, seed, lo=-1.0, hi=1.0):
    """Random net with the output bias shifted so the zero level set is nonempty."""
    net = random_model(dim, depth, width, 1, seed)
    domain, _ = init_hypercube(dim, lo, hi)
    vals = batch_preactivations(net, sample_domain(domain, 1000, 7))[-1][:, 0]
    return shift_output_bias(net, -float(np.median(vals)))
