import csv
import io
import json
import math
from fractions import Fraction

from rwrs.output import Table, format_value, table_to_csv, table_to_json, write_tables


def test_format_value():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(Fraction(1, 2)) == "0.5"
    assert format_value(True) == "true"
    assert format_value(3) == "3"
    assert format_value(math.inf) == "inf"
    assert format_value(math.nan) == "nan"
    assert format_value(None) == ""


def test_csv_sorted_and_quoted():
    t = Table("t", ("p", "name"), key=("p",))
    t.add(0.7, 'a,"b"')
    t.add(0.5, "plain")
    text = table_to_csv(t)
    assert text.startswith("p,name\r\n0.5,plain\r\n")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[2] == ["0.69999999999999996", 'a,"b"']


def test_json():
    t = Table("t", ("x", "y"), key=("x",))
    t.add(2, math.inf)
    t.add(1, Fraction(1, 4))
    doc = json.loads(table_to_json(t))
    assert doc["rows"] == [[1, 0.25], [2, "inf"]]


def test_write_bytes_identical(tmp_path):
    t = Table("t", ("a",), key=("a",))
    for v in (3, 1, 2):
        t.add(v)
    p1 = write_tables([t], tmp_path / "one")[0]
    p2 = write_tables([t], tmp_path / "two")[0]
    assert p1.read_bytes() == p2.read_bytes()
