import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chbergman.io import (SpecParseError, atomic_write, complex_from_pair, complex_from_str,
                          complex_to_pair, complex_to_str, load_spec, parse_table, render_table,
                          save_spec, spec_from_json, spec_to_json)
from chbergman.presets import SHIPPED, shipped_spec, schottky_spec

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_complex_string_round_trip(re, im):
    z = complex(re, im)
    assert complex_from_str(complex_to_str(z)) == z
    assert complex_from_pair(complex_to_pair(z)) == z


def test_complex_literal_forms():
    assert complex_to_str(0.5 - 1.25j) == "0.5-1.25j"
    assert complex_from_str("0.5+2i") == 0.5 + 2j
    assert complex_from_pair(3) == 3
    with pytest.raises(ValueError):
        complex_from_pair([1, 2, 3])
    with pytest.raises(ValueError):
        complex_from_pair([True, 0])


def test_spec_round_trip(tmp_path):
    spec = schottky_spec()
    path = tmp_path / "s.json"
    save_spec(spec, path)
    back = load_spec(path)
    assert back.name == spec.name
    assert back.injectivity_radius_override == spec.injectivity_radius_override
    for a, b in zip(spec.generators, back.generators):
        assert np.array_equal(a.matrix, b.matrix)
    assert spec_to_json(back) == spec_to_json(spec)


def test_shipped_specs_load():
    for name in SHIPPED:
        assert shipped_spec(name).name == name


def test_parse_errors_carry_position():
    with pytest.raises(SpecParseError) as exc:
        spec_from_json('{\n  "generators": [\n    oops\n  ]\n}')
    assert exc.value.line == 3
    assert exc.value.column > 0
    with pytest.raises(SpecParseError):
        spec_from_json("[]")
    with pytest.raises(SpecParseError):
        spec_from_json('{"generators": []}')
    with pytest.raises(SpecParseError):
        spec_from_json('{"generators": [[[1, 0], [0, 1]]]}')
    with pytest.raises(SpecParseError):
        spec_from_json('{"generators": [[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],'
                       '[[0,0],[0,0],"x"]]]}')


def test_non_member_generator_rejected():
    doc = {"generators": [[[[2, 0], [0, 0], [0, 0]], [[0, 0], [1, 0], [0, 0]],
                           [[0, 0], [0, 0], [0.5, 0]]]]}
    with pytest.raises(ValueError, match="SU"):
        spec_from_json(json.dumps(doc))


def test_tables_round_trip():
    cols = ["a", "b", "c", "d"]
    rows = [[1, 0.1, 1 + 2j, True], [2, float("nan"), -0.5j, False]]
    csv_text = render_table(cols, rows, "csv", {"spec": "x"})
    assert csv_text.startswith("# columns: a,b,c,d\n# spec: x\n")
    header, parsed = parse_table(csv_text, "csv")
    assert header == cols
    assert complex_from_str(parsed[0]["c"]) == 1 + 2j
    assert parsed[1]["d"] == "false"
    js = render_table(cols, rows, "json", {"spec": "x"})
    header, parsed = parse_table(js, "json")
    assert header == cols
    assert parsed[0]["c"] == [1.0, 2.0]
    assert parsed[1]["b"] == "nan"
    with pytest.raises(ValueError):
        render_table(cols, rows, "xml")


def test_atomic_write_replaces_and_cleans_up(tmp_path):
    p = tmp_path / "sub" / "out.txt"
    atomic_write(p, "one")
    atomic_write(p, "two")
    assert p.read_text() == "two"
    assert [q.name for q in p.parent.iterdir()] == ["out.txt"]
