import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import NOISE, distributions
from guesswork.core import FLOAT, Partition, make_distribution
from guesswork.graph import c_partition_audit, cut_report, weight_matrix
from guesswork.io import (
    c_partition_audit_to_json,
    cut_report_to_json,
    distribution_from_json,
    distribution_to_json,
    edge_list,
    load_distribution,
    parse_edge_list,
    partition_to_json,
    save_distribution,
    weight_matrix_from_json,
    weight_matrix_to_json,
)


@given(distributions())
def test_rational_round_trip(D):
    text = json.dumps(distribution_to_json(D))
    assert distribution_from_json(json.loads(text)) == D


@given(st.lists(st.floats(0.001, 1000), min_size=1, max_size=12))
def test_float_round_trip_bit_exact(raw):
    D = make_distribution(raw, FLOAT)
    back = distribution_from_json(json.loads(json.dumps(distribution_to_json(D))))
    assert back.probs == D.probs


def test_file_round_trip(tmp_path, four_symbols):
    path = tmp_path / "d.json"
    save_distribution(four_symbols, path)
    assert json.loads(path.read_text())["probs"] == ["2/5", "3/10", "1/5", "1/10"]
    assert load_distribution(path) == four_symbols


def test_unnormalized_input_is_normalized():
    D = distribution_from_json({"mode": "rational", "probs": [1, 3]})
    assert D.probs == (F(3, 4), F(1, 4))
    D = distribution_from_json({"mode": "float", "probs": ["1/2", 0.5]})
    assert D.probs == (0.5, 0.5)


@pytest.mark.parametrize("data", [{}, {"probs": []}, {"probs": [1], "mode": "x"}, {"probs": "1"}])
def test_bad_json(data):
    with pytest.raises(ValueError):
        distribution_from_json(data)


@given(distributions(), NOISE)
def test_weight_matrix_round_trip(D, p):
    W = weight_matrix(D, p)
    assert weight_matrix_from_json(json.loads(json.dumps(weight_matrix_to_json(W)))) == W


def test_weight_matrix_shape_check():
    with pytest.raises(ValueError):
        weight_matrix_from_json({"n": 2, "p": "0", "w": [["1"]]})


def test_edge_list(four_symbols):
    W = weight_matrix(four_symbols, F(1, 10))
    text = edge_list(W)
    assert text.splitlines()[0] == "1 2 23/100"
    edges = parse_edge_list(text, 4)
    assert edges == {(i, j): w for i, j, w in W.edges()}
    with pytest.raises(ValueError):
        parse_edge_list("1 9 1/2\n", 4)


def test_reports(sparse_four):
    rep = cut_report_to_json(cut_report(sparse_four, F(1, 5), Partition(4, {2, 3})))
    assert rep == {
        "partition": {"n": 4, "members": [1, 4]},
        "cut_weight": "1/5",
        "guessing_time": "33/20",
    }
    audit = c_partition_audit_to_json(c_partition_audit(sparse_four, F(1, 5)))
    assert audit["zigzag_cut"] == "11/50"
    assert audit["violations"] == []
    assert partition_to_json(Partition(3, {2})) == {"n": 3, "members": [2]}
