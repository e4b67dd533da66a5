import json

import numpy as np
import pytest
from hypothesis import given, settings

from carnot.algebras import free_nilpotent, heisenberg_type
from carnot.enveloping import build_dirac, build_example1, build_gamma_model, CliffordAction, pauli
from carnot.exact import GaussQ
from carnot.io import (
    ParseError,
    algebra_from_dict,
    algebra_to_dict,
    encode_report,
    filtration_from_dict,
    filtration_to_dict,
    load_algebra,
    load_operator,
    matrix_from_json,
    named_algebra,
    normalize,
    operator_from_dict,
    operator_to_dict,
    parse_gamma,
)
from carnot.osculating import engel_frames, heisenberg_frames, osculating_algebra
from strategies import NAMED, named_algebras


@settings(max_examples=20)
@given(named_algebras)
def test_algebra_round_trip(alg):
    d = algebra_to_dict(alg)
    back = algebra_from_dict(json.loads(json.dumps(d)))
    assert back == alg


def test_round_trip_keeps_metric_and_rational_constants():
    alg = heisenberg_type([1, "3/2"])
    assert algebra_from_dict(algebra_to_dict(alg)) == alg
    assert "inner_product" not in algebra_to_dict(NAMED["h3"])


def test_named_algebras():
    assert named_algebra("free23").same_structure(free_nilpotent(2, 3))
    assert named_algebra("abelian3").dim == 3
    assert algebra_from_dict({"named": "engel"}).dim == 4
    with pytest.raises(ParseError, match="named"):
        named_algebra("so3")


@pytest.mark.parametrize(
    "op",
    [
        build_gamma_model(NAMED["h3"], "1/3"),
        build_example1(NAMED["engel"], 6),
        build_dirac(NAMED["h3"], CliffordAction([pauli(1), pauli(2)])),
    ],
)
def test_operator_round_trip(op):
    d = json.loads(json.dumps(operator_to_dict(op)))
    back = operator_from_dict(d)
    assert back == op


def test_filtration_round_trip():
    for spec in (heisenberg_frames(), engel_frames()):
        back = filtration_from_dict(json.loads(json.dumps(filtration_to_dict(spec))))
        assert back.weights == spec.weights and back.frames == spec.frames
        assert osculating_algebra(back, (1, 2, 3, 4)[: spec.dim]).algebra == osculating_algebra(spec, (1, 2, 3, 4)[: spec.dim]).algebra


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


def test_parse_error_names_file_and_field(tmp_path):
    p = _write(tmp_path, "a.json", {"dims": [2, 1], "basis": ["X", "Y", "Z"],
                                     "brackets": [{"i": "X", "j": "Y", "value": [{"k": "Z", "coeff": "1/x"}]}]})
    with pytest.raises(ParseError) as err:
        load_algebra(p)
    assert err.value.path == str(p)
    assert err.value.field == "brackets[0].value[0].coeff"
    assert str(p) in str(err.value)


@pytest.mark.parametrize(
    "data, field",
    [
        ({"dims": [2], "colour": 1}, "colour"),
        ({"basis": ["X"]}, "dims"),
        ({"dims": "2"}, "dims"),
        ({"dims": [2, 1], "brackets": [{"i": 0, "j": 1}]}, "brackets[0]"),
        ({"dims": [2, 1], "brackets": [{"i": 0, "j": 1, "value": [{"k": 2}]}]}, "brackets[0].value[0]"),
    ],
)
def test_malformed_algebras(data, field):
    with pytest.raises(ParseError) as err:
        algebra_from_dict(data, "x.json")
    assert err.value.field == field


def test_bad_json_and_missing_file(tmp_path):
    with pytest.raises(ParseError, match="invalid JSON"):
        load_algebra(_write(tmp_path, "b.json", "{nope"))
    with pytest.raises(ParseError, match="no such file"):
        load_algebra(tmp_path / "missing.json")


def test_operator_file_with_relative_algebra(tmp_path):
    _write(tmp_path, "h.json", algebra_to_dict(NAMED["h3"]))
    p = _write(tmp_path, "g.json", {"algebra": "h.json", "kind": "gamma-model", "gamma": "1/2"})
    assert load_operator(p) == build_gamma_model(NAMED["h3"], "1/2")
    bad = _write(tmp_path, "o.json", {"algebra": "h3", "terms": [], "V0": 1, "V1": 1, "extra": 0})
    with pytest.raises(ParseError, match="extra"):
        load_operator(bad)


def test_parse_gamma_forms():
    assert parse_gamma("5/2")[0, 0] == GaussQ("5/2")
    assert parse_gamma("[1, 2]")[0, 0] == GaussQ(1, 2)
    assert parse_gamma([[1, 0], [0, 3]]).shape == (2, 2)


def test_matrix_parsing():
    m = matrix_from_json([[1, [0, 1]], ["1/2", 0]])
    np.testing.assert_allclose(m, [[1, 1j], [0.5, 0]])
    with pytest.raises(ParseError):
        matrix_from_json([["a"]])


def test_report_encoding_is_canonical():
    a = encode_report("x", {"b": 1.0 / 3, "a": [np.float64(2.0), np.int64(3)], "c": complex(1, -1)})
    b = encode_report("x", {"c": complex(1, -1), "a": [2.0, 3], "b": 0.333333333333333333})
    assert a == b
    body = json.loads(a)
    assert body["schema_version"] == 1 and body["result"]["b"] == 0.333333333333
    assert normalize(float("inf")) == "inf"
