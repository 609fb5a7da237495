"""Write a :class:`FieldSolution` to disk, one file per component.

``raw``: ``<comp>.f64`` holds the row-major float64 tensor (little-endian)
and ``<comp>.json`` holds shape, grid nodes and run metadata.
``tt``: ``<comp>.tt`` in the TT dump format of :mod:`stmaxwell.tt.io`,
with the same JSON sidecar; TT mode only.
"""
from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from ..tt import TTTensor, save_tt
from .spaces import B_COMPONENTS, E_COMPONENTS

__all__ = ["export_solution", "load_raw"]


def _sidecar(sol, comp: str, fmt: str, filename: str) -> dict:
    grids = sol.spaces.grids[comp]
    return {
        "component": comp,
        "format": fmt,
        "file": filename,
        "dtype": "<f8",
        "order": "C",
        "axes": ["t", "x", "y", "z"],
        "shape": [g.n for g in grids],
        "grid_kinds": [g.kind.value for g in grids],
        "nodes": [g.nodes.tolist() for g in grids],
        "meta": _jsonable(sol.meta),
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    return x


def export_solution(sol, directory: str | os.PathLike, fmt: str = "raw") -> list:
    """Write all six components to `directory`; return the written paths."""
    if fmt not in ("raw", "tt"):
        raise ValueError(f"unknown export format {fmt!r}")
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for comp in (*E_COMPONENTS, *B_COMPONENTS):
        v = sol.component(comp)
        if fmt == "tt":
            if not isinstance(v, TTTensor):
                raise ValueError("TT export needs a TT-mode solution")
            name = f"{comp}.tt"
            save_tt(out / name, v)
        else:
            name = f"{comp}.f64"
            arr = v.full() if isinstance(v, TTTensor) else np.asarray(v)
            (out / name).write_bytes(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        side = out / f"{comp}.json"
        side.write_text(json.dumps(_sidecar(sol, comp, fmt, name), indent=1, sort_keys=True))
        written += [out / name, side]
    return written


def load_raw(sidecar: str | os.PathLike) -> np.ndarray:
    """Read a raw component back using its JSON sidecar."""
    side = Path(sidecar)
    info = json.loads(side.read_text())
    data = np.fromfile(side.parent / info["file"], dtype=info["dtype"])
    return data.reshape(info["shape"])
