"""Rerun the optimizer on each example's diagram and compare with the printed point."""
import argparse
import time

from boundkey.fixtures import FIXTURE_NAMES, load_fixture
from boundkey.keyrate import noisy_bound
from boundkey.optimize import OptConfig, maximize_keyrate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(FIXTURE_NAMES))
    ap.add_argument("--starts", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    cfg = OptConfig(starts=args.starts, seed=args.seed, workers=args.workers)
    print(f"{'name':>5}  {'printed':>12}  {'optimized':>12}  {'residual':>9}  {'secs':>6}")
    for name in args.names:
        fx = load_fixture(name)
        t = time.perf_counter()
        res = maximize_keyrate(fx.diagram, cfg)
        dt = time.perf_counter() - t
        printed = noisy_bound(fx.distribution(), fx.channel)
        print(f"{name:>5}  {printed:12.8f}  {res.best_rate:12.8f}  {res.constraint_residual:9.1e}  {dt:6.1f}")


if __name__ == "__main__":
    main()
