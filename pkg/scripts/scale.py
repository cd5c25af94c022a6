"""Wall-clock time of 10 outer iterations as the sample count grows."""
import argparse
import os
import time

from fgmsc.dataset import generate_blobs
from fgmsc.solver import SolverParams, run, thread_count


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 400, 800, 1600])
    ap.add_argument("--views", type=int, default=3)
    ap.add_argument("--clusters", type=int, default=4)
    args = ap.parse_args()

    print(f"cpus={os.cpu_count()} workers={thread_count()}")
    for n in args.sizes:
        ds = generate_blobs(n // args.clusters, args.clusters, args.views, seed=0)
        start = time.perf_counter()
        res = run(ds, SolverParams(outer_iters=10, tol=0))
        print(f"n={ds.n_samples:5d}  {time.perf_counter() - start:7.2f}s  "
              f"acc={res.metrics['acc']:.3f}")


if __name__ == "__main__":
    main()
