"""HH dimension table for the curated diagrams before and after subdivision.

    python3 scripts/hh_table.py [--max-degree N] [--mod P] [--method reduced|bar|auto]
"""

import argparse
import time

from cctlab.checks import shriek_hh
from cctlab.diagram import shriek_algebra, subdivide_diagram
from cctlab.exalg import QQ, Field
from cctlab.instances import curated_diagrams, parallel_pair_diagram


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-degree", type=int, default=3)
    ap.add_argument("--mod", type=int)
    ap.add_argument("--method", default="reduced")
    args = ap.parse_args()
    F = Field(args.mod) if args.mod else QQ
    N = args.max_degree

    print("| diagram | dim A! | dim (A')! | H(A!) | H((A')!) | equal | seconds |")
    print("|---|---|---|---|---|---|---|")
    for name, A in curated_diagrams(F).items():
        t = time.perf_counter()
        Ap, _ = subdivide_diagram(A)
        h, hp = shriek_hh(A, None, N, args.method), shriek_hh(Ap, None, N, args.method)
        dims = shriek_algebra(A).algebra.dim, shriek_algebra(Ap).algebra.dim
        print(f"| {name} | {dims[0]} | {dims[1]} | {tuple(h)} | {tuple(hp)} | {h == hp} | "
              f"{time.perf_counter() - t:.1f} |")

    # the parallel pair only gets a ! after one subdivision
    t = time.perf_counter()
    A1, _ = subdivide_diagram(parallel_pair_diagram(F))
    A2, _ = subdivide_diagram(A1)
    h1, h2 = shriek_hh(A1, None, N, args.method), shriek_hh(A2, None, N, args.method)
    dims = shriek_algebra(A1).algebra.dim, shriek_algebra(A2).algebra.dim
    print(f"| const-k-parallel-pair (C', C'') | {dims[0]} | {dims[1]} | {tuple(h1)} | {tuple(h2)} | "
          f"{h1 == h2} | {time.perf_counter() - t:.1f} |")


if __name__ == "__main__":
    main()
