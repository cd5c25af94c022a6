"""Command-line front end.

    fgmsc run   --manifest d.json | --synth blobs:30x2x2 | --synth toy7  [solver flags]
    fgmsc synth toy7 | blobs:NxCxT  --out DIR
    fgmsc eval  TRUTH PRED

Exit codes: 0 ok, 2 bad flags, 3 data / IO errors, 4 solver divergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (TOY7_SETTINGS, DataError, generate_blobs, generate_toy7,
                      load_dataset, load_labels, load_manifest, write_dataset)
from .graph_init import export_edge_list
from .metrics import NMI_NORMALIZATION, evaluate
from .solver import (TERMS, VARIANTS, SolverDivergence, SolverParams,
                     params_dict, run)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_DIVERGED = 0, 2, 3, 4
TRACE_HEADER = ("iter", "total") + TERMS
_BLOBS = re.compile(r"^blobs:(\d+)x(\d+)x(\d+)$")

log = logging.getLogger("fgmsc")


class UsageError(Exception):
    pass


def _variant(name: str) -> str:
    key = name.replace("-", "_")
    if key not in VARIANTS:
        raise argparse.ArgumentTypeError(
            f"unknown variant {name!r}; choose from "
            + ", ".join(v.replace("_", "-") for v in VARIANTS))
    return key


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fgmsc",
                                     description="Fine-grained multi-view subspace clustering")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="cluster a dataset")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--manifest", type=Path)
    src.add_argument("--synth", metavar="SPEC",
                     help="toy7 or blobs:NxCxT (N samples per cluster)")
    # None means "use the solver default" (or the toy7 settings)
    p.add_argument("--alpha", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--k-init", type=int)
    p.add_argument("--iters", type=int, help="outer iterations")
    p.add_argument("--inner-iters", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int)
    p.add_argument("--variant", type=_variant, default="full",
                   help="full, fgl-z, fgl-f, fgl-zf or graph-level")
    p.add_argument("--no-safeguard", action="store_true",
                   help="use the plain G and Z updates even where they raise the objective")
    p.add_argument("--sep", type=float, default=10.0, help="blobs separation")
    p.add_argument("--noise", type=float, default=1.0, help="blobs noise")
    p.add_argument("--out", type=Path, help="results JSON")
    p.add_argument("--trace", type=Path, help="objective trace CSV")
    p.add_argument("--export-graph", type=Path, help="edge list of the final G")
    p.add_argument("--export-embedding", type=Path, help="final F as CSV")
    p.add_argument("--labels-out", type=Path, help="predicted labels, one per line")

    s = sub.add_parser("synth", help="write a synthetic dataset")
    s.add_argument("spec", help="toy7 or blobs:NxCxT")
    s.add_argument("--sep", type=float, default=10.0)
    s.add_argument("--noise", type=float, default=1.0)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--out", type=Path, required=True)

    e = sub.add_parser("eval", help="score predicted labels against truth")
    e.add_argument("truth", type=Path)
    e.add_argument("pred", type=Path)
    return parser


def synth_dataset(spec: str, sep: float = 10.0, noise: float = 1.0,
                  seed: int = 42):
    if spec == "toy7":
        return generate_toy7()
    match = _BLOBS.match(spec)
    if not match:
        raise UsageError(f"unknown synthetic spec {spec!r} "
                         "(expected toy7 or blobs:NxCxT)")
    n, c, t = (int(g) for g in match.groups())
    if min(n, c, t) < 1:
        raise UsageError("blobs sizes must be positive")
    return generate_blobs(n, c, t, separation=sep, noise=noise, seed=seed)


def solver_params(args) -> SolverParams:
    given = {"alpha": args.alpha, "lam": args.lam, "eta": args.eta,
             "m": args.m, "k_init": args.k_init, "outer_iters": args.iters,
             "inner_iters": args.inner_iters, "tol": args.tol,
             "restarts": args.restarts}
    values = dict(TOY7_SETTINGS) if args.synth == "toy7" else {}
    values.update({k: v for k, v in given.items() if v is not None})
    try:
        return SolverParams(seed=args.seed, variant=args.variant,
                            safeguard=not args.no_safeguard, **values)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _write_json(path: Path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def write_trace(path: Path, state):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for k, (total, terms) in enumerate(zip(state.objective_trace,
                                               state.term_trace), start=1):
            w.writerow([k, repr(total)] + [repr(terms[t]) for t in TERMS])


def results_record(result, dataset, argv) -> dict:
    """Everything needed to reproduce the run. Wall-clock timing is left
    out on purpose so that repeated runs give byte-identical files."""
    st = result.state
    return {
        "version": __version__,
        "argv": list(argv),
        "dataset": {"name": dataset.name, "n_samples": dataset.n_samples,
                    "n_views": dataset.n_views,
                    "n_clusters": dataset.n_clusters},
        "params": params_dict(result.params),
        "seed": result.params.seed,
        "metrics": result.metrics,
        "nmi_normalization": NMI_NORMALIZATION,
        "iterations": result.iterations,
        "converged": result.converged,
        "initial_objective": st.initial_objective,
        "final_objective": st.objective_trace[-1] if st.objective_trace else None,
        "monotonicity_violations": st.violations,
        "a_projections": st.projections,
        "g_fallbacks": st.g_fallbacks,
        "z_damped": st.z_damped,
        "labels": [int(x) for x in result.labels],
    }


def cmd_run(args, argv) -> int:
    if args.manifest is not None:
        dataset = load_dataset(load_manifest(args.manifest))
    else:
        dataset = synth_dataset(args.synth, args.sep, args.noise, args.seed)
    params = solver_params(args)
    result = run(dataset, params)
    log.info("finished after %d iterations, metrics %s",
             result.iterations, result.metrics)

    if args.out is not None:
        _write_json(args.out, results_record(result, dataset, argv))
        timing_path = args.out.with_name(args.out.name + ".timing.json")
        _write_json(timing_path, result.timing)
    else:
        print(json.dumps({"metrics": result.metrics,
                          "iterations": result.iterations}, sort_keys=True))
    if args.trace is not None:
        write_trace(args.trace, result.state)
    if args.export_graph is not None:
        args.export_graph.parent.mkdir(parents=True, exist_ok=True)
        export_edge_list(args.export_graph, result.state.G)
    if args.export_embedding is not None:
        args.export_embedding.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(args.export_embedding, result.state.F.F, delimiter=",",
                   fmt="%.17g")
    if args.labels_out is not None:
        args.labels_out.parent.mkdir(parents=True, exist_ok=True)
        args.labels_out.write_text(
            "".join(f"{int(x)}\n" for x in result.labels), encoding="utf-8")
    return EXIT_OK


def cmd_synth(args) -> int:
    dataset = synth_dataset(args.spec, args.sep, args.noise, args.seed)
    path = write_dataset(dataset, args.out)
    log.info("wrote %s", path)
    return EXIT_OK


def cmd_eval(args) -> int:
    truth = load_labels(args.truth)
    pred = load_labels(args.pred)
    if truth.size != pred.size:
        raise DataError(f"label files differ in length: "
                        f"{truth.size} vs {pred.size}")
    print(json.dumps(evaluate(pred, truth), sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return cmd_run(args, argv)
        if args.command == "synth":
            return cmd_synth(args)
        return cmd_eval(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fgmsc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"fgmsc: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SolverDivergence as exc:
        print(f"fgmsc: solver diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
