"""JSON file formats.

Distribution: {"dA": int, "dB": int, "dE": int, "entries": [[a, b, e, p], ...]}
Diagram:      {"dA": int, "dB": int, "cliques": [[[a, b], ...], ...]}
Channel:      {"dX": int, "dA": int, "q": [[q(x|a) for a] for x]}
P_AB:         {"dA": int, "dB": int, "P_AB": [[p(a,b) for b] for a]}
Density:      {"dA": int, "dB": int, "matrix": [row-major floats]}

Probabilities may be JSON numbers or decimal strings.  Floats are written with
``repr``, which round-trips exactly.
"""
from __future__ import annotations

import json
import re
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from boundkey.dist import Diagram, JointDistribution3, MarginalDistribution, NoisyChannel, marginal
from boundkey.errors import BoundKeyError, LoadError

SCHEMA_HELP = __doc__


def _num(x) -> float:
    if isinstance(x, str):
        try:
            return float(Decimal(x))
        except InvalidOperation:
            raise LoadError(f"not a decimal number: {x!r}") from None
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise LoadError(f"not a number: {x!r}")
    return float(x)


def _matrix(rows) -> np.ndarray:
    try:
        return np.array([[_num(x) for x in row] for row in rows], dtype=float)
    except TypeError:
        raise LoadError("expected a list of rows") from None


def _require(obj: dict, *keys):
    if not isinstance(obj, dict):
        raise LoadError("expected a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise LoadError(f"missing keys: {', '.join(missing)}")


def read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: invalid JSON ({exc})") from None


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


_LEAF_LIST = re.compile(r"\[[^\[\]{}]*\]")


def dumps(obj) -> str:
    """Indented JSON with innermost lists kept on one line."""
    text = json.dumps(obj, indent=2, ensure_ascii=False)
    return _LEAF_LIST.sub(lambda m: json.dumps(json.loads(m.group(0)), ensure_ascii=False), text) + "\n"


def distribution_from_json(obj) -> JointDistribution3:
    _require(obj, "dA", "dB", "dE", "entries")
    entries = []
    for row in obj["entries"]:
        if len(row) != 4:
            raise LoadError(f"entry {row!r} is not [a, b, e, p]")
        a, b, e, p = row
        entries.append((int(a), int(b), int(e), _num(p)))
    return JointDistribution3.from_entries(int(obj["dA"]), int(obj["dB"]), int(obj["dE"]), entries)


def distribution_to_json(P: JointDistribution3, tol: float = 0.0) -> dict:
    return {
        "dA": P.d_A,
        "dB": P.d_B,
        "dE": P.d_E,
        "entries": [[a, b, e, p] for a, b, e, p in P.entries(tol)],
    }


def diagram_from_json(obj) -> Diagram:
    _require(obj, "dA", "dB", "cliques")
    try:
        cliques = [[(int(c[0]), int(c[1])) for c in clique] for clique in obj["cliques"]]
    except (TypeError, IndexError, ValueError):
        raise LoadError("cliques must be lists of [a, b] cells") from None
    try:
        return Diagram(int(obj["dA"]), int(obj["dB"]), tuple(cliques))
    except BoundKeyError as exc:
        raise LoadError(str(exc)) from None


def channel_from_json(obj) -> NoisyChannel:
    _require(obj, "q")
    q = _matrix(obj["q"])
    if "dX" in obj and q.shape[0] != int(obj["dX"]):
        raise LoadError(f"dX = {obj['dX']} but q has {q.shape[0]} rows")
    if "dA" in obj and q.shape[1] != int(obj["dA"]):
        raise LoadError(f"dA = {obj['dA']} but q has {q.shape[1]} columns")
    return NoisyChannel(q)


def channel_to_json(ch: NoisyChannel) -> dict:
    return {"dX": ch.d_X, "dA": ch.d_A, "q": ch.q.tolist()}


def pab_from_json(obj) -> MarginalDistribution:
    """A P_AB file, or a distribution file reduced to its AB marginal."""
    if isinstance(obj, dict) and "entries" in obj:
        return marginal(distribution_from_json(obj), "AB")
    _require(obj, "P_AB")
    pab = _matrix(obj["P_AB"])
    if "dA" in obj and "dB" in obj and pab.shape != (int(obj["dA"]), int(obj["dB"])):
        raise LoadError(f"P_AB shape {pab.shape} does not match dA, dB")
    return MarginalDistribution("AB", pab)


def pab_to_json(P_AB: MarginalDistribution) -> dict:
    return {"dA": P_AB.shape[0], "dB": P_AB.shape[1], "P_AB": P_AB.p.tolist()}


def load_distribution(path) -> JointDistribution3:
    return distribution_from_json(read_json(path))


def load_diagram(path) -> Diagram:
    return diagram_from_json(read_json(path))


def load_channel(path) -> NoisyChannel:
    return channel_from_json(read_json(path))


def load_pab(path) -> MarginalDistribution:
    return pab_from_json(read_json(path))
