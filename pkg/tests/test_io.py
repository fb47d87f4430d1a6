import io as _io
import json

import numpy as np
import pytest

from dopid import io
from dopid.errors import NegativeProbability, NotNormalized, ParseError, ShapeMismatch, UnknownLabel
from dopid.axioms import GateSpec, make_gate
from conftest import random_dist


def test_roundtrip_exact(rng):
    d = random_dist(rng, (3, 2, 4))
    back = io.dist_from_json(json.loads(io.dumps(io.dist_to_json(d))))
    np.testing.assert_array_equal(back.p, d.p)
    assert back.ax == d.ax and back.az == d.az


def test_roundtrip_tuple_labels():
    d = make_gate(GateSpec("copy"))
    text = io.dumps(io.dist_to_json(d))
    assert '["0", "1"]' in text
    back = io.load_distribution(_io.StringIO(text))
    assert back.az == d.az


def test_entries_format():
    doc = {
        "alphabets": {"x": ["a", "b"], "y": ["0"], "z": ["0", "1"]},
        "entries": [{"x": "a", "y": "0", "z": "0", "p": 0.5}, {"x": "b", "y": "0", "z": "1", "p": 0.5}],
    }
    d = io.dist_from_json(doc)
    assert d.p[0, 0, 0] == 0.5 and d.p[1, 0, 1] == 0.5


def test_entries_unknown_label():
    doc = {"alphabets": {"x": ["0"], "y": ["0"], "z": ["0"]}, "entries": [{"x": "9", "y": "0", "z": "0", "p": 1}]}
    with pytest.raises(UnknownLabel):
        io.dist_from_json(doc)


def test_wrapped_document(xor):
    doc = {"syn": 1.0, "distribution": io.dist_to_json(xor)}
    np.testing.assert_array_equal(io.dist_from_json(doc).p, xor.p)


@pytest.mark.parametrize(
    "doc, err",
    [
        ([1, 2], ParseError),
        ({"probs": [[[1.0]]]}, ParseError),
        ({"alphabets": {"x": ["0"], "y": ["0"], "z": ["0"]}}, ParseError),
        ({"alphabets": {"x": ["0"], "y": ["0"], "z": ["0"]}, "probs": [[[0.9]]]}, NotNormalized),
        ({"alphabets": {"x": ["0", "1"], "y": ["0"], "z": ["0"]}, "probs": [[[1.5]], [[-0.5]]]}, NegativeProbability),
        ({"alphabets": {"x": ["0", "1"], "y": ["0"], "z": ["0"]}, "probs": [[[1.0]]]}, ShapeMismatch),
        ({"alphabets": {"x": ["0"], "y": ["0"], "z": ["0"]}, "probs": [1.0]}, ShapeMismatch),
    ],
)
def test_bad_documents(doc, err):
    with pytest.raises(err):
        io.dist_from_json(doc)


def test_invalid_json():
    with pytest.raises(ParseError):
        io.load_distribution(_io.StringIO("{not json"))


def test_load_from_path(tmp_path, xor):
    f = tmp_path / "xor.json"
    f.write_text(io.dumps(io.dist_to_json(xor)))
    np.testing.assert_array_equal(io.load_distribution(f).p, xor.p)


def test_csv():
    t = io.read_samples_csv(_io.StringIO("x,y,z\n0,1,1\n1 , 1, 0\n"))
    assert t.rows == (("0", "1", "1"), ("1", "1", "0"))


def test_csv_empty_and_bad_header():
    assert len(io.read_samples_csv(_io.StringIO(""))) == 0
    with pytest.raises(ParseError):
        io.read_samples_csv(_io.StringIO("a,b,c\n0,0,0\n"))
    with pytest.raises(ParseError):
        io.read_samples_csv(_io.StringIO("x,y,z\n0,0\n"))


def test_dumps_17_digits():
    text = io.dumps({"v": 0.1, "w": [1 / 3, 2.0], "ok": True, "n": 3})
    assert '"v": 0.10000000000000001' in text
    assert "[0.33333333333333331, 2]" in text
    assert json.loads(text)["w"][0] == 1 / 3


def test_dumps_rejects_nan():
    with pytest.raises(ValueError):
        io.dumps({"v": float("nan")})
