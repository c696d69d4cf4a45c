"""Command-line surface.

Exit codes: 0 success, 2 input error, 3 empty result (or truncated counts),
4 internal invariant violation.

Heavy imports happen inside main() so --threads can cap the BLAS pool via
environment variables before numpy loads.
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

SCHEMA_VERSIONS = {"model_json": 1, "exports": 1}

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY = 3
EXIT_INVARIANT = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="relucomplex",
        description="Extract the exact polyhedral complex of a ReLU network by edge subdivision.",
    )
    parser.add_argument("--version", action="store_true", help="print version and schema versions")
    sub = parser.add_subparsers(dest="command")

    def add_common(p, include_output_default=False):
        g = p.add_argument_group("model")
        g.add_argument("--model", help="path to a model JSON file")
        g.add_argument("--random", metavar="IN,DEPTH,WIDTH,OUT",
                       help="generate a random model with these sizes")
        g.add_argument("--seed", type=int, default=0, help="seed for --random")
        g = p.add_argument_group("domain")
        g.add_argument("--domain", choices=["cube", "simplex"], default="cube")
        g.add_argument("--lo", type=float, default=-1.0, help="cube lower bound")
        g.add_argument("--hi", type=float, default=1.0, help="cube upper bound")
        g.add_argument("--scale", type=float, default=1.0, help="simplex scale")
        g = p.add_argument_group("schedule")
        if include_output_default:
            g.add_argument("--include-output", action="store_true", default=True,
                           help=argparse.SUPPRESS)
        else:
            g.add_argument("--include-output", action="store_true",
                           help="append output-layer neurons as folded hyperplanes")
        g.add_argument("--output-index", type=int, default=0,
                       help="output neuron whose level set is used")
        g.add_argument("--level-set-prune", action="store_true",
                       help="prune non-boundary cells after each layer")
        g.add_argument("--value-mode", choices=["recompute", "interpolate"],
                       default="recompute",
                       help="how new vertices get their hidden activations")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--stats", action="store_true", help="write per-iteration stats.jsonl")
        p.add_argument("--threads", type=int, help="cap BLAS worker threads")
        p.add_argument("--config", help="JSON file providing defaults for any flag")

    p = sub.add_parser("extract", help="extract the complex; write CSV exports and summary")
    add_common(p)

    p = sub.add_parser("count", help="count cells per dimension")
    add_common(p)
    p.add_argument("--up-to", type=int, default=None, help="highest dimension to count (default D)")
    p.add_argument("--max-cells", type=int, default=None, help="memory budget in cells")

    p = sub.add_parser("boundary", help="extract the output level set (SVG for D=2, OBJ for D=3)")
    add_common(p, include_output_default=True)
    p.add_argument("--inside-positive", action="store_true",
                   help="treat positive output as the inside")

    p = sub.add_parser("prune-model", help="drop stably-negative neurons; write pruned model")
    add_common(p, include_output_default=True)

    p = sub.add_parser("validate", help="residual and midpoint validation")
    add_common(p)
    p.add_argument("--midpoint-tol", type=float, default=1e-8)
    p.add_argument("--samples", type=int, default=100000,
                   help="sample count for the region containment check")

    p = sub.add_parser("bench", help="seeded benchmark sweep over dims and widths")
    p.add_argument("--dims", default="1:3", help="input dimensions, e.g. 1:3 or 2,3")
    p.add_argument("--widths", default="10,20", help="comma-separated widths")
    p.add_argument("--depth", type=int, default=4, help="hidden layer count")
    p.add_argument("--seeds", type=int, default=2, help="seeds per configuration")
    p.add_argument("--domain", choices=["cube", "simplex"], default="cube")
    p.add_argument("--lo", type=float, default=-1.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--out", default="out")
    p.add_argument("--threads", type=int)
    p.add_argument("--config", help="JSON file providing defaults for any flag")
    return parser


def _apply_config(parser, argv):
    """--config JSON mirrors every flag: file values become defaults."""
    if argv and "--config" in argv:
        idx = argv.index("--config")
        path = argv[idx + 1]
        with open(path) as fh:
            cfg = json.load(fh)
        flat = []
        for key, value in cfg.items():
            flag = "--" + key.replace("_", "-")
            if isinstance(value, bool):
                if value:
                    flat.append(flag)
            else:
                flat.extend([flag, str(value)])
        # config first so explicit flags win
        argv = argv[:1] + flat + argv[1:]
    return argv


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--threads" in argv:
        n = argv[argv.index("--threads") + 1]
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = n
    parser = _build_parser()
    argv = _apply_config(parser, argv)
    args = parser.parse_args(argv)
    if args.version:
        from . import __version__

        print(f"relucomplex {__version__}")
        for name, ver in SCHEMA_VERSIONS.items():
            print(f"schema {name} v{ver}")
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_INPUT

    from .geometry import EmptyBoundaryError
    from .model import ModelFormatError
    from .poset import CountBudgetError
    from .skeleton import SkeletonError
    from .subdivide import PairingError

    try:
        handler = {
            "extract": cmd_extract,
            "count": cmd_count,
            "boundary": cmd_boundary,
            "prune-model": cmd_prune_model,
            "validate": cmd_validate,
            "bench": cmd_bench,
        }[args.command]
        return handler(args)
    except (ModelFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyBoundaryError as exc:
        print(f"empty level set: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except CountBudgetError as exc:
        print(f"count budget exceeded: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (PairingError, SkeletonError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


# -- shared run plumbing --------------------------------------------------------


def _load_or_generate(args):
    from . import model as model_mod

    if bool(args.model) == bool(args.random):
        raise ValueError("need exactly one of --model and --random")
    if args.model:
        return model_mod.load_model(args.model)
    parts = [int(v) for v in args.random.split(",")]
    if len(parts) != 4:
        raise ValueError("--random takes IN,DEPTH,WIDTH,OUT")
    return model_mod.random_model(*parts, seed=args.seed)


def _make_domain(args, dim):
    from . import skeleton as skeleton_mod

    if args.domain == "cube":
        return skeleton_mod.init_hypercube(dim, args.lo, args.hi)
    return skeleton_mod.init_simplex(dim, args.scale)


def _run_extraction(args):
    from . import model as model_mod, subdivide

    net = _load_or_generate(args)
    domain, sk = _make_domain(args, net.in_dim)
    include_output = getattr(args, "include_output", False)
    schedule = model_mod.NeuronSchedule.for_model(net, include_output=include_output)
    t0 = time.perf_counter()
    sk, stats = subdivide.extract_complex(
        net,
        domain,
        sk,
        schedule,
        level_set_prune=getattr(args, "level_set_prune", False),
        value_mode=getattr(args, "value_mode", "recompute"),
    )
    seconds = time.perf_counter() - t0
    return net, domain, schedule, sk, stats, seconds


def _write_summary(outdir, net, domain, sk, stats, seconds):
    from . import validate as validate_mod

    report = validate_mod.residuals(sk, net, domain)
    summary = {
        "n_vertices": sk.n_vertices_alive,
        "n_edges": sk.n_edges_alive,
        "t": sk.t,
        "m": sk.m,
        "D": sk.dim,
        "timings": {
            "total_seconds": seconds,
            "per_iteration": [s.seconds for s in stats],
        },
        "residual": report.to_json(),
        "degenerate_count": sk.degenerate_count,
    }
    with open(outdir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return summary


def _write_stats(outdir, stats):
    with open(outdir / "stats.jsonl", "w") as fh:
        for st in stats:
            fh.write(json.dumps(st.to_json()))
            fh.write("\n")


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands -------------------------------------------------------------------


def cmd_extract(args):
    from . import geometry

    net, domain, schedule, sk, stats, seconds = _run_extraction(args)
    out = _outdir(args)
    geometry.export_csv(sk, out)
    _write_summary(out, net, domain, sk, stats, seconds)
    if args.stats:
        _write_stats(out, stats)
    print(f"extracted {sk.n_vertices_alive} vertices, {sk.n_edges_alive} edges "
          f"in {seconds:.3f}s -> {out}")
    return EXIT_OK


def cmd_count(args):
    from . import poset
    from .poset import CountBudgetError

    net, domain, schedule, sk, stats, seconds = _run_extraction(args)
    up_to = args.up_to if args.up_to is not None else sk.dim
    out = _outdir(args)
    truncated = False
    try:
        counts = poset.count_cells(sk, sk.m, up_to, max_cells=args.max_cells)
    except CountBudgetError as exc:
        counts = exc.partial_counts
        truncated = True
    doc = {"dims": counts, "euler": poset.euler_characteristic(counts) if not truncated else None}
    if up_to == sk.dim and not truncated:
        doc["regions"] = counts[-1]
    if truncated:
        doc["truncated"] = True
    with open(out / "counts.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"counts {counts}" + (" (truncated)" if truncated else ""))
    return EXIT_EMPTY if truncated else EXIT_OK


def cmd_boundary(args):
    from . import geometry

    net, domain, schedule, sk, stats, seconds = _run_extraction(args)
    out_entry = schedule.output_entry(sk.m, args.output_index)
    mesh = geometry.boundary_subcomplex(sk, out_entry)
    if mesh.n_vertices == 0:
        raise geometry.EmptyBoundaryError("no cells on the requested level set")
    out = _outdir(args)
    inside = 1 if args.inside_positive else -1
    metrics = {"n_vertices": mesh.n_vertices, "n_edges": mesh.n_edges}
    if sk.dim == 2:
        shape = geometry.area_perimeter_2d(sk, out_entry, sk.m, inside_sign=inside)
        metrics.update(
            {"area": shape.area, "perimeter": shape.perimeter,
             "compactness": shape.compactness}
        )
        geometry.export_svg(
            sk, out / "boundary.svg", out_entry,
            box=(domain_box(domain)) if domain.kind == "hypercube" else None,
        )
        artifact = "boundary.svg"
    elif sk.dim == 3:
        geometry.assemble_faces(mesh, sk, sk.m, net, schedule)
        metrics["n_faces"] = len(mesh.faces)
        geometry.export_obj(mesh, out / "boundary.obj")
        artifact = "boundary.obj"
    else:
        raise ValueError("boundary export supports D = 2 and D = 3")
    with open(out / "metrics.json", "w") as fh:
        json.dump(metrics, fh, indent=2)
        fh.write("\n")
    print(f"boundary: {mesh.n_vertices} vertices, {mesh.n_edges} edges -> {out / artifact}")
    return EXIT_OK


def domain_box(domain):
    lo = domain.meta["lo"]
    hi = domain.meta["hi"]
    dim = domain.dim
    return ([lo] * dim, [hi] * dim)


def cmd_prune_model(args):
    from . import geometry, model as model_mod

    net, domain, schedule, sk, stats, seconds = _run_extraction(args)
    out_entry = schedule.output_entry(sk.m, args.output_index)
    mesh = geometry.boundary_subcomplex(sk, out_entry)
    if mesh.n_vertices == 0:
        raise geometry.EmptyBoundaryError("no boundary vertices to classify against")
    labels = model_mod.classify_neurons_on_boundary(net, mesh.positions)
    pruned = model_mod.prune_stably_negative(net, labels)
    out = _outdir(args)
    model_mod.save_model(pruned, out / "pruned_model.json")
    report = {
        "labels": {
            f"{nref.layer}:{nref.index}": label for nref, label in sorted(labels.items())
        },
        "widths_before": list(net.widths),
        "widths_after": list(pruned.widths),
        "parameters_before": net.parameter_count(),
        "parameters_after": pruned.parameter_count(),
    }
    with open(out / "prune_report.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    print(f"pruned {net.parameter_count()} -> {pruned.parameter_count()} parameters")
    return EXIT_OK


def cmd_validate(args):
    from . import poset, validate as validate_mod

    net, domain, schedule, sk, stats, seconds = _run_extraction(args)
    res = validate_mod.residuals(sk, net, domain, schedule)
    mid = validate_mod.midpoint_check(sk, net, domain, args.midpoint_tol, schedule)
    counts = poset.count_cells(sk, sk.m, sk.dim)
    sampled = validate_mod.sampled_region_oracle(
        net, domain, args.samples, args.seed, schedule
    )
    regions = poset.region_signatures(sk, sk.m)
    region_keys = {k.tobytes() for k in ((regions + 1).astype("uint8"))}
    sampled_keys = {k.tobytes() for k in ((sampled + 1).astype("uint8"))}
    doc = {
        "residuals": res.to_json(),
        "midpoints": mid.to_json(),
        "counts": counts,
        "euler": poset.euler_characteristic(counts),
        "regions": len(regions),
        "sampled_regions": len(sampled),
        "sampled_subset_of_regions": sampled_keys <= region_keys,
        "coverage": len(sampled_keys) / len(region_keys) if region_keys else None,
    }
    out = _outdir(args)
    with open(out / "validation.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    ok = mid.n_fail == 0 and doc["sampled_subset_of_regions"] and doc["euler"] == 1
    print(f"validation {'PASS' if ok else 'FAIL'}: max residual {res.max_abs:.3e}, "
          f"midpoints {mid.n_pass}/{mid.n_edges}, euler {doc['euler']}")
    return EXIT_OK if ok else EXIT_INVARIANT


def _parse_dims(text):
    if ":" in text:
        a, b = text.split(":")
        return list(range(int(a), int(b) + 1))
    return [int(v) for v in text.split(",")]


def cmd_bench(args):
    from . import model as model_mod, skeleton as skeleton_mod, subdivide, validate as validate_mod

    dims = _parse_dims(args.dims)
    widths = [int(w) for w in args.widths.split(",")]
    out = _outdir(args)
    rows = []
    runs = []
    for dim in dims:
        for width in widths:
            for seed in range(args.seeds):
                net = model_mod.random_model(dim, args.depth, width, 1, seed)
                if args.domain == "cube":
                    domain, sk = skeleton_mod.init_hypercube(dim, args.lo, args.hi)
                else:
                    domain, sk = skeleton_mod.init_simplex(dim, args.scale)
                schedule = model_mod.NeuronSchedule.for_model(net)
                t0 = time.perf_counter()
                sk, stats = subdivide.extract_complex(net, domain, sk, schedule)
                seconds = time.perf_counter() - t0
                mem = max(s.mem_bytes for s in stats) if stats else sk.nbytes()
                rows.append(
                    (dim, width, seed, sk.n_vertices_alive, sk.n_edges_alive, seconds, mem)
                )
                runs.append((sk.n_vertices_alive, seconds))
    with open(out / "bench.csv", "w") as fh:
        fh.write("dim,width,seed,n_vertices,n_edges,seconds,mem_bytes\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    report = validate_mod.scaling_report(runs)
    with open(out / "bench_summary.json", "w") as fh:
        json.dump(report.to_json(), fh, indent=2)
        fh.write("\n")
    print(f"{len(rows)} runs -> {out / 'bench.csv'}; "
          f"log-log slope {report.slope:.3f} (rms {report.rms_residual:.3f})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
