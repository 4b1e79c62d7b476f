import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratercheck.dataset import HEADER, MeasurementRecord, MeasurementDataset, extract_pair, parse_csv, read_csv
from ratercheck.errors import (
    DuplicateCell,
    IncompleteDesign,
    MalformedLine,
    NonPositiveValue,
    TooManyRaters,
    UnknownMethod,
)


def test_parse_two_records():
    ds = parse_csv(b"p1,A,r1,100\np1,A,r2,120")
    assert len(ds.records) == 2
    assert ds.value("p1", "A", "r2") == 120.0
    assert ds.raters("A") == ("r1", "r2")


def test_header_and_bom():
    ds = parse_csv("\ufeffproject,method,rater,value\np1,A,r1,1.5\n".encode())
    assert len(ds.records) == 1


def test_stream_input():
    ds = parse_csv(io.BytesIO(b"p1,A,r1,3\n"))
    assert ds.projects == ("p1",)


def test_nonpositive():
    with pytest.raises(NonPositiveValue) as exc:
        parse_csv(b"p1,A,r1,0")
    assert exc.value.line == 1
    with pytest.raises(NonPositiveValue):
        parse_csv(b"p1,A,r1,100\np2,A,r1,-3")


def test_duplicate():
    with pytest.raises(DuplicateCell) as exc:
        parse_csv(b"p1,A,r1,100\np1,A,r1,110")
    assert (exc.value.project, exc.value.method, exc.value.rater, exc.value.line) == ("p1", "A", "r1", 2)


@pytest.mark.parametrize(
    "text,line",
    [
        (b"p1,A,r1", 1),
        (b"p1,A,r1,100\np2,A,r1,abc", 2),
        (b"p1,A,r1,nan", 1),
        (b"p1,A,,3", 1),
        (b"Project,Method,Rater,Value\np1,A,r1,1", 1),
        (b"\xff\xfe", 1),
    ],
)
def test_malformed(text, line):
    with pytest.raises(MalformedLine) as exc:
        parse_csv(text)
    assert exc.value.line == line


def _three_projects():
    rows = ["p1,A,r1,100", "p1,A,r2,110", "p2,A,r1,200", "p2,A,r2,190", "p3,A,r1,50", "p3,A,r2,55"]
    return parse_csv("\n".join(rows))


def test_extract_pair_complete():
    projects, first, second = extract_pair(_three_projects(), "A")
    assert projects == ("p1", "p2", "p3")
    assert first == [100.0, 200.0, 50.0] and second == [110.0, 190.0, 55.0]


def test_extract_pair_incomplete():
    ds = parse_csv("p1,A,r1,1\np1,A,r2,2\np2,A,r1,3\np3,A,r1,4\np3,A,r2,5")
    with pytest.raises(IncompleteDesign) as exc:
        extract_pair(ds, "A")
    assert exc.value.projects == ["p2"]


def test_extract_pair_too_many_raters():
    ds = parse_csv("p1,A,r1,1\np1,A,r2,2\np1,A,r3,3")
    with pytest.raises(TooManyRaters) as exc:
        extract_pair(ds, "A")
    assert exc.value.count == 3


def test_unknown_method():
    with pytest.raises(UnknownMethod):
        extract_pair(_three_projects(), "Z")


def test_rater_order_is_first_appearance():
    ds = parse_csv("p1,A,zeta,1\np1,A,alpha,2")
    assert ds.raters("A") == ("zeta", "alpha")


def test_json_export():
    data = json.loads(_three_projects().to_json())
    assert set(data[0]) == {"project", "method", "rater", "value"}


def test_read_csv(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text(_three_projects().to_csv())
    assert read_csv(path).record_multiset() == _three_projects().record_multiset()


ident = st.text(alphabet="abcxyz0123456789_-", min_size=1, max_size=6)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.tuples(ident, ident, ident), st.floats(1e-6, 1e9), min_size=1, max_size=30))
def test_csv_round_trip(cells):
    ds = MeasurementDataset.from_records(MeasurementRecord(p, m, r, v) for (p, m, r), v in cells.items())
    text = ds.to_csv()
    assert text.splitlines()[0] == ",".join(HEADER)
    assert parse_csv(text.encode()).record_multiset() == ds.record_multiset()


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(1, 1e4), st.floats(1, 1e4)), min_size=1, max_size=20))
def test_extract_pair_lengths(values):
    recs = []
    for i, (a, b) in enumerate(values):
        recs += [MeasurementRecord(f"p{i}", "A", "r1", a), MeasurementRecord(f"p{i}", "A", "r2", b)]
    projects, first, second = extract_pair(MeasurementDataset.from_records(recs), "A")
    assert len(first) == len(second) == len(projects) == len(values)
