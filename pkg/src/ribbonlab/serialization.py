"""JSON encoding of face models, complex scalars and reports."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path as FsPath
from typing import Any

import numpy as np

from .core import FaceModel, OrientedGraph
from .errors import ModelError

MODEL_KEYS = {"vertices", "edges", "faces", "metadata"}
EDGE_KEYS = {"id", "src", "dst"}
FACE_KEYS = {"r", "p", "q", "s", "w"}


class ModelParseError(ModelError):
    """Raised for malformed model files; carries a position when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(message + where)


def encode_complex(z: complex) -> dict[str, float]:
    z = complex(z)
    return {"re": float(z.real), "im": float(z.imag)}


def decode_complex(obj: Any) -> complex:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if not isinstance(obj, dict) or set(obj) != {"re", "im"}:
        raise ModelParseError(f"expected a complex number {{'re','im'}}, got {obj!r}")
    return complex(float(obj["re"]), float(obj["im"]))


def encode_matrix(mat: np.ndarray) -> list[list[dict[str, float]]]:
    return [[encode_complex(z) for z in row] for row in np.asarray(mat)]


def decode_matrix(rows: list) -> np.ndarray:
    return np.array([[decode_complex(z) for z in row] for row in rows], dtype=complex)


def model_to_dict(model: FaceModel, metadata: dict | None = None) -> dict:
    g = model.graph
    out: dict[str, Any] = {
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "src": e.src, "dst": e.dst} for e in g.edges],
        "faces": [
            {"r": r, "p": p, "q": q, "s": s, "w": encode_complex(w)}
            for (r, p, q, s), w in model.weights.items()
        ],
    }
    if metadata is not None:
        out["metadata"] = metadata
    return out


def model_from_dict(data: Any) -> tuple[FaceModel, dict | None]:
    if not isinstance(data, dict):
        raise ModelParseError("top level must be an object")
    unknown = set(data) - MODEL_KEYS
    if unknown:
        raise ModelParseError(f"unknown keys {sorted(unknown)}")
    for key in ("vertices", "edges", "faces"):
        if key not in data:
            raise ModelParseError(f"missing key {key!r}")
    edges = []
    for e in data["edges"]:
        if not isinstance(e, dict) or set(e) != EDGE_KEYS:
            raise ModelParseError(f"edge entries need exactly {sorted(EDGE_KEYS)}: {e!r}")
        edges.append((e["id"], e["src"], e["dst"]))
    graph = OrientedGraph(data["vertices"], edges)
    weights = {}
    for f in data["faces"]:
        if not isinstance(f, dict) or set(f) != FACE_KEYS:
            raise ModelParseError(f"face entries need exactly {sorted(FACE_KEYS)}: {f!r}")
        key = (f["r"], f["p"], f["q"], f["s"])
        if key in weights:
            raise ModelParseError(f"duplicate face {key}")
        weights[key] = decode_complex(f["w"])
    return FaceModel(graph, weights), data.get("metadata")


def _reject_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ModelParseError(f"duplicate key {k!r}")
        out[k] = v
    return out


def loads_model(text: str) -> tuple[FaceModel, dict | None]:
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise ModelParseError(exc.msg, exc.lineno, exc.colno) from None
    return model_from_dict(data)


def load_model(path: str | FsPath) -> tuple[FaceModel, dict | None]:
    return loads_model(FsPath(path).read_text(encoding="utf-8"))


def dumps_model(model: FaceModel, metadata: dict | None = None) -> str:
    return json.dumps(model_to_dict(model, metadata), indent=1)


def save_model(path: str | FsPath, model: FaceModel, metadata: dict | None = None) -> None:
    FsPath(path).write_text(dumps_model(model, metadata) + "\n", encoding="utf-8")


def content_hash(path: str | FsPath) -> str:
    return hashlib.sha256(FsPath(path).read_bytes()).hexdigest()
