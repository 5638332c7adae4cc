import numpy as np
import pytest

from evennet import io
from evennet.graph import LabelAssignment, build_graph
from evennet.harness import dataset_summary, load_dataset
from evennet.synth import CsbmParams, generate_csbm


def test_edge_list_round_trip(tmp_path, rng):
    g = build_graph([(0, 1), (1, 2), (2, 3), (0, 3)], 4)
    path = tmp_path / "edges.tsv"
    io.write_edge_list(path, g)
    edges = io.read_edge_list(path)
    assert build_graph(edges, 4).num_edges == g.num_edges


def test_edge_list_comments_and_blank_lines(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("# a comment\n\n0\t1\n1\t2  # trailing comment\n")
    assert io.read_edge_list(path) == [(0, 1), (1, 2)]


def test_edge_list_parse_error_names_line(tmp_path):
    path = tmp_path / "edges.tsv"
    path.write_text("0\t1\nnot-an-edge\n")
    with pytest.raises(io.ParseError) as err:
        io.read_edge_list(path)
    assert err.value.line_no == 2


def test_labels_round_trip(tmp_path):
    labels = LabelAssignment.from_classes([1, 0, 2, 1], 3)
    path = tmp_path / "labels.csv"
    io.write_labels(path, labels)
    restored = io.read_labels(path)
    assert restored.classes.tolist() == [1, 0, 2, 1]
    assert restored.class_sizes.tolist() == [1, 2, 1]


def test_labels_reject_duplicates(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_text("0,1\n0,2\n")
    with pytest.raises(ValueError, match="node id|duplicate"):
        io.read_labels(path)


def test_labels_malformed_row_names_line(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_text("0,1\n1,1,9\n")
    with pytest.raises(io.ParseError, match=":2:"):
        io.read_labels(path)


def test_features_csv_round_trip(tmp_path, rng):
    x = rng.standard_normal((5, 3))
    path = tmp_path / "features.csv"
    io.write_features_csv(path, x)
    assert np.array_equal(io.read_features_csv(path), x)


def test_features_csv_ragged_row(tmp_path):
    path = tmp_path / "features.csv"
    path.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(io.ParseError, match=":2:"):
        io.read_features_csv(path)


def test_features_binary_round_trip(tmp_path, rng):
    x = rng.standard_normal((7, 4))
    path = tmp_path / "features.bin"
    io.write_features_bin(path, x)
    assert np.array_equal(io.read_features_bin(path), x)
    raw = path.read_bytes()
    assert len(raw) == 16 + 8 * 7 * 4  # 16-byte header then row-major float64


def test_features_binary_header_mismatch(tmp_path):
    path = tmp_path / "features.bin"
    path.write_bytes(b"\x02" + b"\x00" * 14)  # truncated
    with pytest.raises(ValueError):
        io.read_features_bin(path)


def test_dataset_round_trip(tmp_path):
    p = CsbmParams(n=80, f=10, d=4.0, phi=0.5)
    g, x, labels = generate_csbm(p, 0)
    io.save_dataset(tmp_path / "ds", g, x, labels, manifest={"seed": 0})
    g2, x2, labels2 = load_dataset(tmp_path / "ds")
    assert np.array_equal(g2.indices, g.indices)
    assert np.array_equal(x2, x)
    assert np.array_equal(labels2.classes, labels.classes)
    summary = dataset_summary(g2, x2, labels2)
    assert summary["nodes"] == 80
    assert summary["classes"] == 2
    assert 0.0 <= summary["edge_homophily"] <= 1.0


def test_spectrum_csv(tmp_path):
    path = tmp_path / "spectrum.csv"
    io.write_spectrum_csv(path, [0.0, 1.0], alpha=[0.5, -0.5], beta=None)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "index,eigenvalue,alpha,beta"
    assert lines[1].startswith("0,0,0.5,")


def test_write_json_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    io.write_json(a, {"z": 1, "a": [1.5, None]})
    io.write_json(b, {"a": [1.5, None], "z": 1})
    assert a.read_bytes() == b.read_bytes()


def test_dataset_feature_row_mismatch(tmp_path):
    p = CsbmParams(n=40, f=6, d=4.0, phi=0.5)
    g, x, labels = generate_csbm(p, 0)
    io.save_dataset(tmp_path / "ds", g, x, labels)
    io.write_features_bin(tmp_path / "ds" / "features.bin", x[:-1])
    with pytest.raises(ValueError, match="rows"):
        load_dataset(tmp_path / "ds")
