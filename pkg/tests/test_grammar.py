import pytest
from hypothesis import given, strategies as st

from rwrs.grammar import RecordSyntaxError, parse_record, render


def test_examples():
    assert parse_record("[WWBB]^2").symbols == "WWBBWWBB"
    assert parse_record("B^3W").symbols == "BBBW"
    assert parse_record("  [W [B]^2 ]^2 ").symbols == "WBBWBB"
    assert parse_record("").symbols == ""


def test_empty_group():
    with pytest.raises(RecordSyntaxError, match="empty group"):
        parse_record("[]^2")


@pytest.mark.parametrize("text", ["B^", "B^0", "[BW", "BW]", "BX", "^2"])
def test_errors_have_offsets(text):
    with pytest.raises(RecordSyntaxError) as exc:
        parse_record(text)
    assert exc.value.offset >= 0


def test_render_compresses():
    assert render("WWBB" * 3) == "[WWBB]^3"
    assert render("BWB") == "BWB"
    assert render("B" * 9 + "W") == "B^9W"


@given(st.text(alphabet="BW", max_size=60))
def test_roundtrip(s):
    assert parse_record(render(s)).symbols == s
