"""Run every suite for several seeds and fields; print one summary line per run.

    python3 scripts/run_checks.py --seeds 1 2 3 --mods 0 101
(0 stands for QQ.)
"""

import argparse
import time

from cctlab.checks import CHECKS, CheckConfig, run_check
from cctlab.exalg import QQ, Field


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, nargs="+", default=[1])
    ap.add_argument("--mods", type=int, nargs="+", default=[0])
    ap.add_argument("--checks", nargs="+", default=list(CHECKS))
    args = ap.parse_args()
    bad = 0
    for p in args.mods:
        F = Field(p) if p else QQ
        for seed in args.seeds:
            for name in args.checks:
                t = time.perf_counter()
                rep = run_check(name, CheckConfig(seed=seed, field=F))
                bad += not rep.outcome
                print(f"{F!r:<8} seed {seed:<3} {rep.summary_line()}  {time.perf_counter() - t:.1f} s", flush=True)
                for msg in rep.failures:
                    print(f"    {msg}")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
