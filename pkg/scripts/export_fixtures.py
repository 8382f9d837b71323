"""Write the bundled examples as standalone files under fixtures/.

For each name: <name>.json (distribution), <name>_q.json (channel),
<name>_pab.json (P_AB only) and <name>_diagram.json.
"""
import argparse
from pathlib import Path

from boundkey.fixtures import FIXTURE_NAMES, fixture_channel_json, fixture_distribution_json, load_fixture
from boundkey.io import write_json


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in FIXTURE_NAMES:
        fx = load_fixture(name)
        d_A, d_B = fx.dims
        write_json(out / f"{name}.json", fixture_distribution_json(fx))
        write_json(out / f"{name}_q.json", fixture_channel_json(fx))
        write_json(out / f"{name}_pab.json", {"dA": d_A, "dB": d_B, "P_AB": [list(r) for r in fx.pab_text]})
        write_json(out / f"{name}_diagram.json", fx.diagram.to_json())
        print(f"wrote {name}")


if __name__ == "__main__":
    main()
