import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evoscat.columns import DatasetColumns
from evoscat.transforms import TimeMode, time_transform, transform_column

from conftest import make_dataset


def bounds_and_stats(histories, path="a"):
    ds = make_dataset(histories)
    idx = [a.path for a in ds.artifacts].index(path)
    return ds, ds.stats[idx], ds.time_bounds


def test_relstart_first_event_is_zero():
    _, stats, bounds = bounds_and_stats({"a": [5, 40], "b": [0, 100]})
    assert time_transform(5, stats, bounds, TimeMode.REL_START) == 0.0


def test_relend_last_event_is_one():
    _, stats, bounds = bounds_and_stats({"a": [5, 40], "b": [0, 100]})
    assert time_transform(40, stats, bounds, TimeMode.REL_END) == 1.0


def test_relmedian_hand_computed():
    # artifact [10, 20, 30, 40]: lower median 20, dataset-wide H = 20
    ds, stats, bounds = bounds_and_stats({"a": [10, 20, 30, 40]})
    # brute-force max deviation over every event
    h = max(
        abs(ev.timestamp - s.median_ts)
        for a, s in zip(ds.artifacts, ds.stats)
        for ev in a.events
    )
    assert h == 20 == bounds.max_median_dev_s
    assert time_transform(40, stats, bounds, TimeMode.REL_MEDIAN) == pytest.approx(1.0)
    assert time_transform(20, stats, bounds, TimeMode.REL_MEDIAN) == 0.5


def test_normalized_endpoints_and_degenerate():
    _, stats, bounds = bounds_and_stats({"a": [10, 20, 30], "b": [7]})
    assert time_transform(10, stats, bounds, TimeMode.NORMALIZED) == 0.0
    assert time_transform(30, stats, bounds, TimeMode.NORMALIZED) == 1.0
    _, single, bounds = bounds_and_stats({"a": [10, 20, 30], "b": [7]}, path="b")
    assert time_transform(7, single, bounds, TimeMode.NORMALIZED) == 0.5


def test_single_instant_dataset_maps_to_half():
    _, stats, bounds = bounds_and_stats({"a": [1000], "b": [1000]})
    for mode in TimeMode:
        assert time_transform(1000, stats, bounds, mode) == 0.5


def test_out_of_artifact_range_rejected():
    _, stats, bounds = bounds_and_stats({"a": [10, 20], "b": [0, 100]})
    with pytest.raises(ValueError):
        time_transform(9, stats, bounds, TimeMode.ABSOLUTE)


def test_mode_parsing_aliases():
    assert TimeMode.parse("normage") is TimeMode.NORMALIZED
    assert TimeMode.parse("normtime") is TimeMode.NORMALIZED
    assert TimeMode.parse("Absolute") is TimeMode.ABSOLUTE
    with pytest.raises(ValueError):
        TimeMode.parse("sideways")


@settings(max_examples=60, deadline=None)
@given(
    st.dictionaries(
        st.text(alphabet="abcdef", min_size=1, max_size=4),
        st.lists(st.integers(min_value=0, max_value=10**9), min_size=1, max_size=12),
        min_size=1,
        max_size=8,
    )
)
def test_unit_interval_and_monotonicity_property(histories):
    ds = make_dataset({p: sorted(set(ts_list)) for p, ts_list in histories.items()})
    for art, stats in zip(ds.artifacts, ds.stats):
        for mode in TimeMode:
            ys = [time_transform(ev.timestamp, stats, ds.time_bounds, mode) for ev in art.events]
            assert all(0.0 <= y <= 1.0 for y in ys)
            assert all(b >= a for a, b in zip(ys, ys[1:]))


def test_vectorized_matches_scalar():
    ds = make_dataset({"a": [10, 20, 30, 40], "b": [15], "c": [0, 5, 100]})
    cols = DatasetColumns.from_dataset(ds)
    for mode in TimeMode:
        vec = transform_column(
            cols.ev_ts, cols.ev_artifact, cols.first_ts, cols.last_ts,
            cols.median_ts, cols.age_s, cols.bounds, mode,
        )
        scalar = np.array([
            time_transform(int(ts), ds.stats[int(a)], ds.time_bounds, mode)
            for ts, a in zip(cols.ev_ts, cols.ev_artifact)
        ])
        assert np.allclose(vec, scalar, atol=0, rtol=0)
