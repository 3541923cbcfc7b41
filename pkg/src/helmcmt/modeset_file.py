"""JSON mode-set files: coupling data that can be written, read back and ingested.

A file holds the disk radius, the background material and one entry per
angular block::

    {"format_version": 1, "R": 2.0, "rho0": 1.0, "kappa0": 1.0,
     "provenance": "analytic",
     "blocks": [{"order": 0, "l_values": [0],
                 "omega_neumann": [...], "omega_dirichlet": [...],
                 "gamma": [[{"re": x, "im": y}, ...], ...],
                 "H": [[...], ...], "L": [[...], ...]}]}

``gamma`` has one row per Neumann mode and one column per entry of
``l_values``; ``H`` and ``L`` are Neumann-by-Dirichlet. Floats are written
with ``repr`` precision, so a write/read cycle is exact.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np

from .coupling import CouplingBlock, CouplingData
from .errors import ModeSetFormatError

__all__ = [
    "FORMAT_VERSION",
    "coupling_from_dict",
    "coupling_to_dict",
    "read_modeset",
    "write_modeset",
]

FORMAT_VERSION = 1


def _complex_out(z):
    return {"re": float(z.real), "im": float(z.imag)}


def _complex_in(obj, where):
    if isinstance(obj, dict) and set(obj) == {"re", "im"}:
        return complex(float(obj["re"]), float(obj["im"]))
    if isinstance(obj, (int, float)):
        return complex(obj)
    raise ModeSetFormatError("expected a {'re', 'im'} object", where)


def coupling_to_dict(coupling: CouplingData):
    blocks = []
    for b in coupling.blocks:
        blocks.append({
            "order": b.order,
            "l_values": [int(l) for l in b.l_values],
            "omega_neumann": [float(w) for w in b.omega_n],
            "omega_dirichlet": [float(w) for w in b.omega_d],
            "gamma": [[_complex_out(z) for z in row] for row in b.gamma],
            "H": [[float(x) for x in row] for row in b.H],
            "L": [[float(x) for x in row] for row in b.L],
        })
    return {
        "format_version": FORMAT_VERSION,
        "R": float(coupling.R),
        "rho0": float(coupling.rho0),
        "kappa0": float(coupling.kappa0),
        "provenance": coupling.provenance,
        "blocks": blocks,
    }


def _positive(d, key):
    if key not in d:
        raise ModeSetFormatError("missing", key)
    try:
        v = float(d[key])
    except (TypeError, ValueError):
        raise ModeSetFormatError("not a number", key) from None
    if not v > 0:
        raise ModeSetFormatError("must be positive", key)
    return v


def _vector(block, key, where):
    v = block.get(key)
    if not isinstance(v, list):
        raise ModeSetFormatError("missing or not a list", f"{where}.{key}")
    try:
        arr = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise ModeSetFormatError("entries must be numbers", f"{where}.{key}") from None
    if arr.ndim != 1 or not np.all(np.isfinite(arr)):
        raise ModeSetFormatError("must be a flat list of finite numbers", f"{where}.{key}")
    return arr


def _matrix(block, key, where, rows, cols, convert=None):
    m = block.get(key)
    if not isinstance(m, list):
        raise ModeSetFormatError("missing or not a list", f"{where}.{key}")
    if len(m) != rows:
        raise ModeSetFormatError(f"dimension mismatch: {len(m)} rows, expected {rows}",
                                 f"{where}.{key}")
    out = np.zeros((rows, cols), dtype=complex if convert else float)
    for i, row in enumerate(m):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else "no"
            raise ModeSetFormatError(f"dimension mismatch: row {i} has {got} entries, "
                                     f"expected {cols}", f"{where}.{key}")
        for j, x in enumerate(row):
            try:
                out[i, j] = convert(x, f"{where}.{key}[{i}][{j}]") if convert else float(x)
            except (TypeError, ValueError) as exc:
                if isinstance(exc, ModeSetFormatError):
                    raise
                raise ModeSetFormatError("not a number", f"{where}.{key}[{i}][{j}]") from None
    return out


def _soft_checks(block: CouplingBlock, where):
    """Plausibility checks that only warn: ingested data cannot be re-derived."""
    if block.H.size and np.abs(block.H).max() > 1 + 1e-8:
        warnings.warn(f"{where}: |H| exceeds 1, modes may not be normalised", stacklevel=4)
    if block.order is not None:
        bad = [l for l in block.l_values if abs(int(l)) != block.order]
        if bad and np.abs(block.gamma[:, [list(block.l_values).index(l) for l in bad]]).max() > 0:
            warnings.warn(f"{where}: gamma couples order {block.order} to l = {bad}",
                          stacklevel=4)


def coupling_from_dict(data, provenance=None) -> CouplingData:
    if not isinstance(data, dict):
        raise ModeSetFormatError("top level must be an object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ModeSetFormatError(f"unsupported version {version!r}, expected {FORMAT_VERSION}",
                                 "format_version")
    R = _positive(data, "R")
    rho0 = _positive(data, "rho0")
    kappa0 = _positive(data, "kappa0")
    raw_blocks = data.get("blocks")
    if not isinstance(raw_blocks, list) or not raw_blocks:
        raise ModeSetFormatError("missing or empty", "blocks")
    blocks = []
    seen_l = set()
    for b, raw in enumerate(raw_blocks):
        where = f"blocks[{b}]"
        if not isinstance(raw, dict):
            raise ModeSetFormatError("must be an object", where)
        order = raw.get("order")
        if order is not None and (not isinstance(order, int) or order < 0):
            raise ModeSetFormatError("must be a non-negative integer or null", f"{where}.order")
        l_values = raw.get("l_values")
        if not isinstance(l_values, list) or not all(isinstance(l, int) for l in l_values):
            raise ModeSetFormatError("must be a list of integers", f"{where}.l_values")
        if seen_l & set(l_values) and order is not None:
            raise ModeSetFormatError("angular order listed in two blocks", f"{where}.l_values")
        seen_l |= set(l_values)
        wn = _vector(raw, "omega_neumann", where)
        wd = _vector(raw, "omega_dirichlet", where)
        for key, w in (("omega_neumann", wn), ("omega_dirichlet", wd)):
            if np.any(w < 0) or np.any(np.diff(w) < 0):
                raise ModeSetFormatError("eigenfrequencies must be non-negative and ascending",
                                         f"{where}.{key}")
        gamma = _matrix(raw, "gamma", where, wn.size, len(l_values), _complex_in)
        H = _matrix(raw, "H", where, wn.size, wd.size)
        L = _matrix(raw, "L", where, wn.size, wd.size)
        block = CouplingBlock(order, wn, wd, np.array(l_values, dtype=int), gamma, H, L)
        _soft_checks(block, where)
        blocks.append(block)
    prov = provenance or str(data.get("provenance", "ingested"))
    return CouplingData(tuple(blocks), R, rho0, kappa0, prov)


def write_modeset(coupling: CouplingData, path):
    text = json.dumps(coupling_to_dict(coupling), indent=1)
    Path(path).write_text(text + "\n")


def read_modeset(path, provenance="ingested") -> CouplingData:
    """Read a mode-set file; the provenance of the result defaults to ``"ingested"``."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModeSetFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                                 f"{exc.msg}") from None
    return coupling_from_dict(data, provenance)
