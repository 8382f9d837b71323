"""Regenerate the summary table of the five examples (JSON, text, CSV)."""
import argparse

from boundkey.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--optimize", action="store_true")
    ap.add_argument("--starts", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    argv = ["reproduce", "--out", a.out, "--starts", str(a.starts), "--seed", str(a.seed)]
    raise SystemExit(main(argv + (["--optimize"] if a.optimize else [])))
