import io

import pytest

from evoscat.eventlog import (
    EventLogError,
    RawEvent,
    event_to_line,
    merge_metrics,
    parse_event_line,
    read_events,
    read_metrics_side_file,
    write_events,
)

from conftest import raw


def test_line_round_trip():
    ev = RawEvent("dir/ä.py", 123, "ab" * 20, "Ümlaut", "A", {"size": 2.5})
    assert parse_event_line(event_to_line(ev)) == ev


def test_stream_round_trip():
    events = [raw("a", 1, 1, "A"), raw("b", 2, 2, "M", metrics={"m": 1.0}), raw("a", 3, 3, "D")]
    buf = io.StringIO()
    write_events(events, buf)
    buf.seek(0)
    assert read_events(buf) == events


@pytest.mark.parametrize(
    "line",
    [
        "not json",
        "[1,2]",
        '{"ts": 1, "commit": "c", "kind": "A"}',  # missing path
        '{"path": "p", "ts": "soon", "commit": "c", "kind": "A"}',
        '{"path": "p", "ts": 1, "commit": "c", "kind": "X"}',
        '{"path": "p", "ts": 1, "commit": "c", "kind": "A", "metrics": {"m": "big"}}',
        '{"path": "p", "ts": 1, "commit": "c", "kind": "A", "metrics": {"m": NaN}}',
    ],
)
def test_malformed_lines_rejected_with_line_number(line):
    with pytest.raises(EventLogError, match="line 7"):
        parse_event_line(line, 7)


def test_blank_lines_skipped():
    buf = io.StringIO('\n{"path":"p","ts":1,"commit":"c","kind":"A"}\n\n')
    assert len(read_events(buf)) == 1


def test_metrics_side_file_merge():
    side = io.StringIO(
        '{"commit":"c1","path":"a","metrics":{"size":5}}\n'
        '{"commit":"c1","path":"a","metrics":{"errors":2}}\n'
        '{"commit":"zz","path":"a","metrics":{"size":9}}\n'
    )
    table = read_metrics_side_file(side)
    events = [
        RawEvent("a", 1, "c1", "x", "A", None),
        RawEvent("a", 2, "c2", "x", "M", {"size": 7.0}),
    ]
    merged = merge_metrics(events, table)
    assert merged[0].metrics == {"size": 5.0, "errors": 2.0}
    assert merged[1].metrics == {"size": 7.0}  # untouched: no side entry for c2
