"""JSON and text serialization.

Rationals are written as ``"num/den"`` strings and floats as JSON numbers
(Python's shortest round-trip repr), so every round trip is bit-exact.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .core import FLOAT, MODES, RATIONAL, Distribution, Partition, format_scalar, make_distribution
from .graph import CPartitionAudit, CutReport, WeightMatrix


def _encode(value):
    if isinstance(value, Fraction):
        return format_scalar(value)
    return float(value)


def distribution_to_json(D: Distribution) -> dict:
    return {"mode": D.mode, "probs": [_encode(a) for a in D.probs]}


def distribution_from_json(data: dict) -> Distribution:
    """Parse the distribution file format.

    Already-normalized, sorted input is kept verbatim (no re-division), which
    is what makes float files round-trip bit for bit.
    """
    if not isinstance(data, dict) or "probs" not in data:
        raise ValueError("distribution JSON needs a 'probs' list")
    mode = data.get("mode", RATIONAL)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    raw = data["probs"]
    if not isinstance(raw, list) or not raw:
        raise ValueError("'probs' must be a nonempty list")
    if mode == RATIONAL:
        values = [Fraction(str(v)) if isinstance(v, (str, int)) else Fraction(repr(v)) for v in raw]
    else:
        values = [float(Fraction(v)) if isinstance(v, str) else float(v) for v in raw]
    try:
        return Distribution(tuple(values), mode)
    except (ValueError, TypeError):
        return make_distribution(values, mode)


def load_distribution(path) -> Distribution:
    with open(path) as fh:
        return distribution_from_json(json.load(fh))


def save_distribution(D: Distribution, path) -> None:
    Path(path).write_text(json.dumps(distribution_to_json(D), indent=1) + "\n")


def partition_to_json(A: Partition) -> dict:
    return {"n": A.n, "members": A.sorted_members()}


def weight_matrix_to_json(W: WeightMatrix) -> dict:
    return {
        "n": W.n,
        "p": _encode(W.p),
        "mode": W.mode,
        "w": [[_encode(v) for v in row] for row in W.w],
    }


def weight_matrix_from_json(data: dict) -> WeightMatrix:
    mode = data.get("mode", RATIONAL)
    conv = (lambda v: Fraction(v)) if mode == RATIONAL else float
    rows = tuple(tuple(conv(v) for v in row) for row in data["w"])
    if len(rows) != data["n"] or any(len(r) != data["n"] for r in rows):
        raise ValueError("weight matrix shape does not match 'n'")
    return WeightMatrix(data["n"], conv(data["p"]), rows, mode)


def edge_list(W: WeightMatrix) -> str:
    """Positive off-diagonal edges as ``i j w`` lines (1-based)."""
    return "".join(f"{i} {j} {format_scalar(w)}\n" for i, j, w in W.edges())


def parse_edge_list(text: str, n: int, mode: str = RATIONAL) -> dict:
    conv = Fraction if mode == RATIONAL else float
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        i, j, w = line.split()
        i, j = int(i), int(j)
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError(f"edge ({i}, {j}) out of range")
        out[(i, j)] = conv(w)
    return out


def cut_report_to_json(rep: CutReport) -> dict:
    return {
        "partition": partition_to_json(rep.partition),
        "cut_weight": _encode(rep.cut_weight),
        "guessing_time": _encode(rep.guessing_time),
    }


def c_partition_audit_to_json(audit: CPartitionAudit) -> dict:
    return {
        "zigzag_cut": _encode(audit.zigzag_cut),
        "general_config": audit.general_config,
        "entries": [
            {
                "members": e.partition.sorted_members(),
                "cut_weight": _encode(e.cut_weight),
                "zigzag_equivalent": e.zigzag_equivalent,
            }
            for e in audit.entries
        ],
        "violations": [list(map(str, v)) for v in audit.violations],
    }


def scalar_json(value):
    """Encode a scalar for reports: ``"num/den"`` or float."""
    return _encode(value)


__all__ = [
    "FLOAT",
    "RATIONAL",
    "distribution_to_json",
    "distribution_from_json",
    "load_distribution",
    "save_distribution",
    "weight_matrix_to_json",
    "weight_matrix_from_json",
    "edge_list",
    "parse_edge_list",
    "cut_report_to_json",
    "c_partition_audit_to_json",
    "partition_to_json",
    "scalar_json",
]
