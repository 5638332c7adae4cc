"""File formats: edge lists, label/feature tables, spectra, result tables.

Formats
-------
edges   : UTF-8 text, one "u<TAB>v" pair per line, '#' starts a comment
labels  : CSV "node_id,class_id", one row per node
features: CSV with N rows x F columns, or raw little-endian binary with a
          16-byte header of two int64 counts (rows, cols) followed by
          rows*cols float64 values, row-major
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .graph import Graph, LabelAssignment, build_graph, validate_features


class ParseError(ValueError):
    """Malformed input file; carries the path and 1-based line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


def _data_lines(path):
    """Yield (line_no, payload) with comments and blank lines stripped."""
    with open(path, "r", encoding="utf-8") as fh:
        for i, raw in enumerate(fh, start=1):
            payload = raw.split("#", 1)[0].strip()
            if payload:
                yield i, payload


def read_edge_list(path) -> list[tuple[int, int]]:
    edges = []
    for line_no, payload in _data_lines(path):
        parts = payload.split("\t")
        if len(parts) != 2:
            raise ParseError(path, line_no, f"expected 'u<TAB>v', got {payload!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(path, line_no, f"non-integer node id in {payload!r}") from None
    return edges


def write_edge_list(path, g: Graph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in g.edge_array():
            fh.write(f"{u}\t{v}\n")


def read_labels(path) -> LabelAssignment:
    """Read "node_id,class_id" rows; every node 0..N-1 must appear exactly once."""
    pairs = []
    for line_no, payload in _data_lines(path):
        parts = payload.split(",")
        if len(parts) != 2:
            raise ParseError(path, line_no, f"expected 'node_id,class_id', got {payload!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            if line_no == 1:  # tolerate a header row
                continue
            raise ParseError(path, line_no, f"non-integer field in {payload!r}") from None
    if not pairs:
        raise ParseError(path, 1, "no label rows found")
    n = len(pairs)
    classes = np.full(n, -1, dtype=np.int64)
    for node, cls in pairs:
        if not 0 <= node < n:
            raise ValueError(f"{path}: node id {node} outside 0..{n - 1}")
        if classes[node] != -1:
            raise ValueError(f"{path}: duplicate label row for node {node}")
        classes[node] = cls
    return LabelAssignment.from_classes(classes)


def write_labels(path, labels: LabelAssignment) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for node, cls in enumerate(labels.classes):
            fh.write(f"{node},{cls}\n")


def read_features_csv(path) -> np.ndarray:
    rows = []
    width = None
    for line_no, payload in _data_lines(path):
        parts = payload.split(",")
        if width is None:
            width = len(parts)
        elif len(parts) != width:
            raise ParseError(path, line_no, f"expected {width} columns, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise ParseError(path, line_no, "non-numeric feature value") from None
    if not rows:
        raise ParseError(path, 1, "no feature rows found")
    return validate_features(np.array(rows, dtype=np.float64))


def write_features_csv(path, x: np.ndarray) -> None:
    np.savetxt(path, np.asarray(x, dtype=np.float64), fmt="%.17g", delimiter=",")


_BIN_HEADER = struct.Struct("<qq")


def read_features_bin(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _BIN_HEADER.size:
        raise ValueError(f"{path}: truncated header ({len(raw)} bytes)")
    rows, cols = _BIN_HEADER.unpack_from(raw)
    expected = _BIN_HEADER.size + 8 * rows * cols
    if rows < 0 or cols < 0 or len(raw) != expected:
        raise ValueError(
            f"{path}: header says {rows}x{cols} but file has {len(raw)} bytes, expected {expected}"
        )
    values = np.frombuffer(raw, dtype="<f8", offset=_BIN_HEADER.size)
    return validate_features(values.reshape(rows, cols))


def write_features_bin(path, x: np.ndarray) -> None:
    arr = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    with open(path, "wb") as fh:
        fh.write(_BIN_HEADER.pack(arr.shape[0], arr.shape[1]))
        fh.write(arr.astype("<f8", copy=False).tobytes())


def save_dataset(out_dir, g: Graph, features: np.ndarray | None,
                 labels: LabelAssignment, manifest: dict | None = None) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(out / "edges.tsv", g)
    write_labels(out / "labels.csv", labels)
    if features is not None:
        write_features_bin(out / "features.bin", features)
    if manifest is not None:
        write_json(out / "manifest.json", manifest)


def load_dataset_dir(data_dir):
    """Load (Graph, features | None, LabelAssignment) from a dataset directory."""
    d = Path(data_dir)
    labels = read_labels(d / "labels.csv")
    edges = read_edge_list(d / "edges.tsv")
    g = build_graph(edges, labels.num_nodes)
    features = None
    if (d / "features.bin").exists():
        features = read_features_bin(d / "features.bin")
    elif (d / "features.csv").exists():
        features = read_features_csv(d / "features.csv")
    if features is not None and features.shape[0] != g.num_nodes:
        raise ValueError(
            f"{d}: features have {features.shape[0]} rows, labels define {g.num_nodes} nodes"
        )
    return g, features, labels


def write_spectrum_csv(path, eigenvalues, alpha=None, beta=None) -> None:
    """Plot-ready CSV of (index, eigenvalue, alpha, beta); missing columns are blank."""
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    n = len(eigenvalues)
    cols = {"alpha": alpha, "beta": beta}
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("index,eigenvalue,alpha,beta\n")
        for i in range(n):
            row = [str(i), format(eigenvalues[i], ".17g")]
            for name in ("alpha", "beta"):
                val = cols[name]
                row.append("" if val is None else format(float(val[i]), ".17g"))
            fh.write(",".join(row) + "\n")


def write_json(path, payload) -> None:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
