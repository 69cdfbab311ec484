"""JSON problem files and CSV outputs."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from .balancing import TransportProblem
from .errors import ProblemFormatError
from .model import ElpProblem, normalize

log = logging.getLogger(__name__)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ProblemFormatError(f"{path}: invalid JSON ({e})") from e


def _require(doc, *keys):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise ProblemFormatError(f"missing keys: {', '.join(missing)}")


def problem_from_dict(doc: dict) -> ElpProblem:
    """Parse the ``{n, m, xi, b, A: [{r, c, v}], scale?}`` document and normalize.

    All-zero constraint rows are dropped when their right-hand side is zero
    and rejected otherwise.
    """
    _require(doc, "n", "m", "xi", "b", "A")
    n, m = int(doc["n"]), int(doc["m"])
    xi = np.asarray(doc["xi"], dtype=float)
    b = np.asarray(doc["b"], dtype=float)
    if xi.shape != (n,) or b.shape != (m,):
        raise ProblemFormatError(f"xi/b lengths {xi.size}/{b.size} do not match n={n}, m={m}")
    try:
        trip = [(int(t["r"]), int(t["c"]), float(t["v"])) for t in doc["A"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ProblemFormatError(f"bad A triplet: {e}") from e
    rows, cols, vals = (np.array(v) for v in zip(*trip)) if trip else ([], [], [])
    rows = np.asarray(rows, dtype=np.int64)
    used = np.zeros(m, dtype=bool)
    nz = np.asarray(vals, dtype=float) != 0
    used[rows[nz]] = True  # duplicates summing to zero are caught by ElpProblem
    empty = ~used
    if np.any(empty & (b != 0)):
        raise ProblemFormatError(f"all-zero rows with nonzero b: {np.flatnonzero(empty & (b != 0)).tolist()}")
    if np.any(empty):
        log.warning("dropping %d all-zero constraint rows", int(empty.sum()))
        keep = np.flatnonzero(used)
        remap = -np.ones(m, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        sel = remap[rows] >= 0
        rows, cols, vals = remap[rows][sel], np.asarray(cols)[sel], np.asarray(vals)[sel]
        b, m = b[keep], keep.size
    p = ElpProblem.from_triplets(n, m, rows, cols, vals, b, xi,
                                 scale=float(doc.get("scale", 1.0)))
    return normalize(p)


def load_problem(path) -> ElpProblem:
    return problem_from_dict(_read_json(path))


def problem_to_dict(p: ElpProblem) -> dict:
    A = p.A.tocoo()
    return {
        "n": p.n, "m": p.m, "xi": p.xi.tolist(), "b": p.b.tolist(),
        "A": [{"r": int(r), "c": int(c), "v": float(v)} for r, c, v in zip(A.row, A.col, A.data)],
        "scale": p.scale,
    }


def transport_from_dict(doc: dict) -> TransportProblem:
    _require(doc, "n_prime", "alpha", "c", "L", "W")
    n = int(doc["n_prime"])
    c = np.asarray(doc["c"], dtype=float)
    if c.size != n * n:
        raise ProblemFormatError(f"c has {c.size} entries, expected {n * n}")
    return TransportProblem(c.reshape(n, n), doc["L"], doc["W"], float(doc["alpha"]))


def load_transport(path) -> TransportProblem:
    return transport_from_dict(_read_json(path))


def transport_to_dict(tp: TransportProblem) -> dict:
    return {"n_prime": tp.n_prime, "alpha": tp.alpha, "c": tp.c.ravel().tolist(),
            "L": tp.L.tolist(), "W": tp.W.tolist()}


def load_lambda(path) -> np.ndarray:
    doc = _read_json(path)
    if isinstance(doc, dict):
        doc = doc.get("lambda", doc.get("lam"))
    if doc is None:
        raise ProblemFormatError("lambda file must be an array or contain a 'lambda' key")
    return np.asarray(doc, dtype=float)


def fmt(v) -> str:
    """Decimal with 17 significant digits (round-trips float64)."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_matrix_csv(x, n_prime: int, path) -> None:
    """Row-major n' x n' matrix, one row per line."""
    x = np.asarray(x, dtype=float).reshape(n_prime, n_prime)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in x:
            w.writerow([fmt(v) for v in row])


def read_matrix_csv(path) -> np.ndarray:
    with open(path, encoding="utf-8", newline="") as fh:
        return np.array([[float(v) for v in row] for row in csv.reader(fh)])
