import json

import pytest
from hypothesis import given, settings, strategies as st

from posdef_lab import __version__
from posdef_lab.records import dumps, provenance, read_csv, read_jsonl, write_csv, write_jsonl

HEADER = provenance({"subcommand": "eval", "r": "3/2", "grid": [0.1, 10.0, 5]}, 20140704)


def test_provenance_fields():
    assert HEADER == {"tool": "posdef-lab", "version": __version__,
                      "run_config": {"subcommand": "eval", "r": "3/2", "grid": [0.1, 10.0, 5]},
                      "seed": 20140704}


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1.5, None]}) == '{"a":[1.5,null],"b":1}'


class TestJsonl:
    def test_round_trip_is_byte_identical(self, tmp_path):
        rows = [{"index": i, "min_eig": 0.1 * i - 0.25, "error": None} for i in range(5)]
        a = write_jsonl(tmp_path / "a.jsonl", HEADER, rows)
        header, back = read_jsonl(a)
        assert header == HEADER and back == rows
        b = write_jsonl(tmp_path / "b.jsonl", header, back)
        assert a.read_bytes() == b.read_bytes()

    def test_first_line_is_provenance(self, tmp_path):
        path = write_jsonl(tmp_path / "x.jsonl", HEADER, [])
        first = json.loads(path.read_text().splitlines()[0])
        assert first == {"provenance": HEADER}

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"index": 0}\n')
        with pytest.raises(ValueError, match="provenance"):
            read_jsonl(path)

    def test_empty(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(ValueError):
            read_jsonl(path)


class TestCsv:
    def test_round_trip_is_byte_identical(self, tmp_path):
        rows = [[4.5, 1, 0.01, -1.2345678901234567e-05, "VIOLATED"], [5.0, 2, 1.0, 0.125, "CERTIFIED"],
                [9.0, 3, None, float("nan"), "ERROR"]]
        a = write_csv(tmp_path / "a.csv", HEADER, ("r", "n", "alpha", "min_eig", "verdict"), rows)
        header, cols, back = read_csv(a)
        assert header == HEADER and cols == ["r", "n", "alpha", "min_eig", "verdict"]
        assert back[0] == rows[0] and back[1] == rows[1]
        b = write_csv(tmp_path / "b.csv", header, cols, back)
        assert a.read_bytes() == b.read_bytes()

    def test_header_line(self, tmp_path):
        path = write_csv(tmp_path / "x.csv", HEADER, ("t",), [[1.0]])
        assert path.read_text().startswith("# {")

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,f\n1,2\n")
        with pytest.raises(ValueError, match="provenance"):
            read_csv(path)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(allow_nan=False, allow_infinity=False), st.integers(-10**6, 10**6),
                          st.text(alphabet="ABCDEFG_", min_size=1, max_size=8)), max_size=10))
def test_csv_round_trip_property(tmp_path_factory, rows):
    d = tmp_path_factory.mktemp("csv")
    rows = [list(r) for r in rows]
    a = write_csv(d / "a.csv", HEADER, ("x", "k", "label"), rows)
    header, cols, back = read_csv(a)
    assert back == rows
    assert write_csv(d / "b.csv", header, cols, back).read_bytes() == a.read_bytes()
