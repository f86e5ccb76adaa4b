import random

import numpy as np
import pytest

from evoscat.bundle import (
    BundleChecksumError,
    BundleError,
    BundleTruncatedError,
    BundleVersionError,
    assemble_bundle,
    build_bundle,
    bundles_equal,
    load_bundle,
    serialize_bundle,
)
from evoscat.sorting import default_criteria, parse_criterion

from conftest import make_dataset


def sample_dataset():
    return make_dataset({
        "src/a.py": [(100, {"size": 1.0}), (260, {"size": 4.0})],
        "src/b.py": [(150, None), (300, {"size": 2.0}), (460, {"size": 2.0})],
        "doc/readme.md": [(90, None)],
    })


def random_dataset(rng: random.Random):
    histories = {}
    for i in range(rng.randint(1, 12)):
        k = rng.randint(1, 7)
        base = rng.randint(0, 10**6)
        timestamps = sorted(rng.sample(range(base, base + 10**5), k))
        entries = []
        for ts in timestamps:
            metrics = {"size": float(rng.randint(0, 50))} if rng.random() < 0.5 else None
            author = rng.choice(["amy", "bob", "cid"])
            entries.append((ts, metrics, author))
        histories[f"f{i}.{rng.choice(['py', 'c', ''])}".rstrip(".")] = entries
    return make_dataset(histories)


def test_round_trip_identity():
    ds = sample_dataset()
    data = build_bundle(ds, default_criteria(ds.metric_names()))
    loaded = load_bundle(data)
    rebuilt = assemble_bundle(ds, default_criteria(ds.metric_names()))
    assert bundles_equal(loaded, rebuilt)
    assert loaded.dataset_id == ds.id
    assert loaded.n_events == ds.n_events
    assert loaded.n_artifacts == ds.n_artifacts


def test_round_trip_many_random_datasets():
    rng = random.Random(31337)
    for _ in range(25):
        ds = random_dataset(rng)
        crits = default_criteria(ds.metric_names())
        bundle = assemble_bundle(ds, crits)
        loaded = load_bundle(serialize_bundle(bundle))
        assert bundles_equal(loaded, bundle)


def test_empty_criteria_gives_only_path_permutation():
    ds = sample_dataset()
    loaded = load_bundle(build_bundle(ds, []))
    assert list(loaded.permutations) == ["path"]
    assert loaded.permutations["path"].tolist() == list(range(ds.n_artifacts))


def test_event_columns_match_dataset_exactly():
    ds = sample_dataset()
    loaded = load_bundle(build_bundle(ds, []))
    cols = loaded.columns
    flat = sorted(
        (ev.timestamp, ev.commit_id, a.path)
        for a in ds.artifacts
        for ev in a.events
    )
    got = [
        (int(cols.ev_ts[i]), cols.commit_table[cols.ev_commit[i]], cols.paths[cols.ev_artifact[i]])
        for i in range(cols.total_events)
    ]
    assert got == flat


def test_permutations_are_bijections():
    ds = sample_dataset()
    loaded = load_bundle(build_bundle(ds, default_criteria(ds.metric_names())))
    n = ds.n_artifacts
    for name, perm in loaded.permutations.items():
        assert sorted(perm.tolist()) == list(range(n)), name


def test_flipped_version_is_version_error():
    data = bytearray(build_bundle(sample_dataset(), []))
    idx = data.index(b'"format_version":', 0, 200 + len(data) // 2)
    value_at = idx + len(b'"format_version":')
    assert data[value_at : value_at + 1] == b"1"
    data[value_at] = ord("7")
    with pytest.raises(BundleVersionError):
        load_bundle(bytes(data))


def test_bad_magic_is_version_error():
    data = bytearray(build_bundle(sample_dataset(), []))
    data[0] ^= 0xFF
    with pytest.raises(BundleVersionError):
        load_bundle(bytes(data))


def test_truncation_reported_without_partial_bundle():
    data = build_bundle(sample_dataset(), [])
    for cut in (0, 4, 11, len(data) // 2, len(data) - 1):
        with pytest.raises((BundleTruncatedError, BundleError)):
            load_bundle(data[:cut])
    with pytest.raises(BundleTruncatedError):
        load_bundle(data[: len(data) - 1])


def test_payload_corruption_is_checksum_error():
    data = bytearray(build_bundle(sample_dataset(), []))
    data[-10] ^= 0x01
    with pytest.raises(BundleChecksumError):
        load_bundle(bytes(data))


def test_fuzz_corruption_never_silently_wrong():
    ds = sample_dataset()
    crits = default_criteria(ds.metric_names())
    reference = assemble_bundle(ds, crits)
    data = serialize_bundle(reference)
    rng = random.Random(777)
    silent = 0
    for _ in range(300):
        corrupted = bytearray(data)
        pos = rng.randrange(len(corrupted))
        bit = 1 << rng.randrange(8)
        corrupted[pos] ^= bit
        try:
            loaded = load_bundle(bytes(corrupted))
        except BundleError:
            continue
        if not bundles_equal(loaded, reference):
            silent += 1
    assert silent == 0


def test_compression_actually_shrinks():
    rng = random.Random(9)
    ds = random_dataset(rng)
    bundle = assemble_bundle(ds, default_criteria(ds.metric_names()))
    data = serialize_bundle(bundle)
    loaded = load_bundle(data)
    assert loaded.checksum == bundle.checksum
    assert len(loaded.checksum) == 64
