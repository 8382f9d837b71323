"""Count diagram classes on small grids and check them against brute force."""
import argparse
import sys
import time
from pathlib import Path

from boundkey.diagrams import enumerate_diagrams

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from oracles import brute_force_diagram_classes  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max", type=int, default=3, help="largest side for the brute-force check")
    ap.add_argument("--show", type=int, default=4, help="largest side to enumerate")
    args = ap.parse_args()
    for d_A in range(1, args.show + 1):
        for d_B in range(d_A, args.show + 1):
            t = time.perf_counter()
            n = len(enumerate_diagrams(d_A, d_B))
            line = f"{d_A}x{d_B}: {n:4d} classes ({time.perf_counter() - t:.2f}s)"
            if d_B <= args.max:
                line += f"  brute force {len(brute_force_diagram_classes(d_A, d_B, d_A * d_B // 2))}"
            print(line)


if __name__ == "__main__":
    main()
