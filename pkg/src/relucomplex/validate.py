"""Correctness oracles and numerical validation.

residuals: every zero in a vertex's sign-vector asserts incidence with a
facet or a folded hyperplane; the re-evaluated value there measures the
numerical error of the extraction. midpoint_check extends the same idea to
edge interiors. The brute-force oracles give independent ground truth at
desk scale.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import _rng
from . import model as model_mod
from . import signvec


@dataclass
class ResidualReport:
    max_abs: float
    mean_abs: float
    by_group: dict
    extent: float
    degenerate_count: int
    n_vertices: int
    n_checks: int

    def to_json(self):
        return {
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "by_group": self.by_group,
            "extent": self.extent,
            "relative_max": self.max_abs / self.extent if self.extent else None,
            "degenerate_count": self.degenerate_count,
            "n_vertices": self.n_vertices,
            "n_checks": self.n_checks,
        }


def _scheduled_values(model, points, schedule):
    """(n, len(schedule)) pre-activation matrix in schedule order."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if len(schedule) == 0:
        return np.zeros((len(points), 0))
    pres = model_mod.batch_preactivations(model, points)
    return np.column_stack([pres[nr.layer - 1][:, nr.index] for nr in schedule])


def residuals(sk, model, domain, schedule=None):
    """Re-evaluate every zero entry of every alive vertex.

    Facet zeros score |w.x - b|, neuron zeros |pre-activation|. Aggregates
    come back per group (facets, then one group per layer).
    """
    if schedule is None:
        schedule = model_mod.infer_schedule(model, sk.t)
    av = sk.alive_vertex_ids()
    pts = sk.positions[av]
    rows = sk.vertex_signs[av]
    facet_vals = np.abs(domain.facet_values(pts))
    neuron_vals = np.abs(_scheduled_values(model, pts, schedule))
    allvals = np.concatenate([facet_vals, neuron_vals], axis=1)
    mask = rows == 0
    picked = allvals[mask]
    by_group = {}
    facet_mask = mask[:, : sk.m]
    if facet_mask.any():
        fv = facet_vals[facet_mask]
        by_group["facets"] = {"max_abs": float(fv.max()), "mean_abs": float(fv.mean())}
    for layer in sorted({nr.layer for nr in schedule}):
        cols = [sk.m + i for i, nr in enumerate(schedule) if nr.layer == layer]
        lm = mask[:, cols]
        if lm.any():
            lv = allvals[:, cols][lm]
            by_group[f"layer_{layer}"] = {
                "max_abs": float(lv.max()),
                "mean_abs": float(lv.mean()),
            }
    return ResidualReport(
        float(picked.max()) if picked.size else 0.0,
        float(picked.mean()) if picked.size else 0.0,
        by_group,
        domain.extent,
        sk.degenerate_count,
        len(av),
        int(picked.size),
    )


@dataclass
class MidpointReport:
    n_edges: int
    n_pass: int
    n_fail: int
    failed_edges: list
    tol: float

    def to_json(self):
        return {
            "n_edges": self.n_edges,
            "n_pass": self.n_pass,
            "n_fail": self.n_fail,
            "failed_edges": self.failed_edges[:100],
            "tol": self.tol,
        }


def midpoint_check(sk, model, domain, tol=1e-8, schedule=None):
    """Evaluate every facet and processed neuron at each alive edge midpoint.

    Non-zero entries of the edge sign-vector must match the evaluated sign
    (exact zero counting as minus); zero entries must satisfy |value| <= tol.
    """
    if schedule is None:
        schedule = model_mod.infer_schedule(model, sk.t)
    ae = sk.alive_edge_ids()
    if len(ae) == 0:
        return MidpointReport(0, 0, 0, [], tol)
    mids = sk.positions[sk.edges[ae]].mean(axis=1)
    vals = np.concatenate(
        [domain.facet_values(mids), _scheduled_values(model, mids, schedule)], axis=1
    )
    rows = sk.edge_signs[ae]
    eval_signs = np.where(vals > 0.0, 1, -1).astype(np.int8)
    zero_ok = np.abs(vals) <= tol
    ok = np.where(rows == 0, zero_ok, eval_signs == rows)
    edge_ok = ok.all(axis=1)
    failed = [int(e) for e in ae[~edge_ok]]
    return MidpointReport(len(ae), int(edge_ok.sum()), len(failed), failed, tol)


def oracle_single_layer_vertices(model, domain, cond_limit=1e12):
    """Brute-force vertex enumeration for a single-hidden-layer schedule.

    First-layer neurons are plain affine hyperplanes; every size-D subset of
    (hyperplanes + facets) is solved exactly and kept if it lies in the
    closed domain with no extra incidences. Returns (positions, sign rows)
    with facet entries first. Intended for desk scale only.
    """
    dim = domain.dim
    m = domain.m
    w1 = model.layers[0].weights
    b1 = model.layers[0].bias
    k = w1.shape[0]
    # rows: facets as w.x = b, neurons as w.x = -b
    normals = np.concatenate([domain.normals, w1], axis=0)
    rhs = np.concatenate([domain.offsets, -b1])
    tol = 1e-9 * max(1.0, domain.extent)
    positions = []
    signs = []
    n_degenerate = 0
    for combo in itertools.combinations(range(m + k), dim):
        mat = normals[list(combo)]
        try:
            if np.linalg.cond(mat) > cond_limit:
                n_degenerate += 1
                continue
            x = np.linalg.solve(mat, rhs[list(combo)])
        except np.linalg.LinAlgError:
            continue
        values = normals @ x - rhs
        chosen = np.zeros(m + k, dtype=bool)
        chosen[list(combo)] = True
        if np.any(values[: m][~chosen[:m]] < -tol):
            continue
        if np.any(np.abs(values[~chosen]) < tol):
            n_degenerate += 1
            continue
        row = np.where(values > 0.0, 1, -1).astype(np.int8)
        row[chosen] = 0
        positions.append(x)
        signs.append(row)
    if positions:
        pos = np.array(positions)
        rows = np.array(signs, dtype=np.int8)
    else:
        pos = np.zeros((0, dim))
        rows = np.zeros((0, m + k), dtype=np.int8)
    return pos, rows


def match_point_sets(a, b, tol):
    """Greedy-free exact matching: every point of `a` has a point of `b`
    within `tol` per coordinate and vice versa, with equal counts."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if len(a) != len(b):
        return False
    if len(a) == 0:
        return True
    d = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)
    close = d <= tol
    return bool(np.all(close.any(axis=1)) and np.all(close.any(axis=0)))


def sample_domain(domain, n, seed):
    """n deterministic uniform samples from the domain interior."""
    dim = domain.dim
    if domain.kind == "hypercube":
        lo, hi = domain.meta["lo"], domain.meta["hi"]
        u = _rng.uniform_open(_rng.stream_key(seed, 101), n * dim).reshape(n, dim)
        return lo + (hi - lo) * u
    if domain.kind == "simplex":
        # Dirichlet(1,...,1) over the solid simplex via exponential spacings
        scale = domain.meta["scale"]
        u = _rng.uniform_open(_rng.stream_key(seed, 103), n * (dim + 1)).reshape(n, dim + 1)
        e = -np.log(u)
        y = e[:, :dim] / e.sum(axis=1, keepdims=True) * (2 * dim * scale)
        return y - scale
    raise ValueError(f"cannot sample domain kind {domain.kind!r}")


def sampled_region_oracle(model, domain, n, seed, schedule=None):
    """Region signatures hit by n uniform samples; a one-sided oracle.

    Every returned signature must appear among the extracted regions, but
    thin regions may be missed, so coverage below 1 is expected.
    """
    if schedule is None:
        schedule = model_mod.NeuronSchedule.for_model(model, include_output=False)
    pts = sample_domain(domain, n, seed)
    facet_signs = np.where(domain.facet_values(pts) > 0.0, 1, -1).astype(np.int8)
    neuron_signs = np.where(
        _scheduled_values(model, pts, schedule) > 0.0, 1, -1
    ).astype(np.int8)
    rows = np.concatenate([facet_signs, neuron_signs], axis=1)
    uniq, _, _ = signvec.group_rows(rows)
    return uniq


@dataclass
class ScalingReport:
    slope: float
    intercept: float
    rms_residual: float
    points: list

    def to_json(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "rms_residual": self.rms_residual,
            "points": self.points,
        }


def scaling_report(runs):
    """Least-squares slope of log(total time) against log(final vertices).

    `runs` is a list of per-run IterationStats sequences (or precomputed
    (n_vertices, seconds) pairs).
    """
    points = []
    for run in runs:
        if isinstance(run, tuple):
            nv, secs = run
        else:
            run = list(run)
            nv = run[-1].vertices_after
            secs = sum(s.seconds for s in run)
        points.append((int(nv), float(secs)))
    if len(points) < 2:
        raise ValueError("need at least two runs to fit a slope")
    x = np.log10([p[0] for p in points])
    y = np.log10([p[1] for p in points])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ScalingReport(
        float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))), points
    )


def split_bound_violations(stats, dim, factor=4):
    """Iterations i > factor*D where the splitting-edge bound |E^|<|E|*D/i fails."""
    out = []
    for i, st in enumerate(stats, start=1):
        if i > factor * dim and st.n_splitting >= st.edges_before * dim / i:
            out.append(i)
    return out
