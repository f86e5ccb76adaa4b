"""The render-ready bundle: columnar dataset + precomputed permutations and
histograms, serialized as

    8-byte magic "EVOSCAT1" | uint32 LE header length | UTF-8 JSON header |
    zlib-compressed column payload

The header checksum covers the canonical header plus the compressed payload,
so any byte corruption is either detected or provably harmless. Timestamps
are delta-encoded and authors/extensions/commits dictionary-encoded before
compression, which is what keeps million-event bundles small.
"""

from __future__ import annotations

import hashlib
import json
import math
import zlib
from dataclasses import dataclass

import numpy as np

from .coloring import RGB, ColorMode, classify_events, format_hex, histogram_from_codes, parse_hex
from .columns import DatasetColumns
from .model import Dataset, MetricDescriptor, MetricKind, TimeBounds
from .similarity import DEFAULT_BINS, similarity_fallback, similarity_order
from .sorting import SortCriterion, sort_artifacts

MAGIC = b"EVOSCAT1"
FORMAT_VERSION = 1


class BundleError(ValueError):
    pass


class BundleVersionError(BundleError):
    pass


class BundleChecksumError(BundleError):
    pass


class BundleTruncatedError(BundleError):
    pass


@dataclass
class LayoutBundle:
    columns: DatasetColumns
    criteria: list[tuple[str, str]]  # (name, key spec) in build order
    permutations: dict[str, np.ndarray]  # criterion name -> p[rank] = ordinal
    color_modes: list[str]
    histograms: dict[str, list[tuple[str, int, RGB]]]  # color mode spec -> legend
    defaults: dict[str, str]  # time / artifact / color
    similarity_bins: int
    similarity_fell_back: bool
    checksum: str  # strong validator of the serialized form

    @property
    def dataset_id(self) -> str:
        return self.columns.dataset_id

    @property
    def n_artifacts(self) -> int:
        return self.columns.n_artifacts

    @property
    def n_events(self) -> int:
        return self.columns.total_events

    @property
    def n_commits(self) -> int:
        return len(self.columns.commit_table)

    def permutation(self, criterion: str) -> np.ndarray:
        try:
            return self.permutations[criterion]
        except KeyError:
            raise KeyError(
                f"criterion {criterion!r} not in bundle (have: {sorted(self.permutations)})"
            ) from None


def _default_color_modes(columns: DatasetColumns) -> list[str]:
    modes = ["year", "ext", "author"]
    for d in columns.descriptors:
        modes.append(f"metric:{d.name}")
        modes.append(f"delta:{d.name}")
    return modes


def assemble_bundle(
    dataset: Dataset,
    criteria: list[SortCriterion] = (),
    color_modes: list[str] | None = None,
    bins: int = DEFAULT_BINS,
) -> LayoutBundle:
    """Precompute every requested permutation and histogram for a dataset."""
    columns = DatasetColumns.from_dataset(dataset)
    n = columns.n_artifacts

    permutations: dict[str, np.ndarray] = {"path": np.arange(n, dtype=np.int32)}
    crit_list: list[tuple[str, str]] = [("path", "path")]
    fell_back = False
    for crit in criteria:
        if crit.name in permutations:
            continue
        if crit.is_similarity:
            fell_back = similarity_fallback(n)
            perm = similarity_order(dataset, bins=bins)
        else:
            perm = sort_artifacts(dataset, crit)
        permutations[crit.name] = perm
        crit_list.append((crit.name, crit.spec()))

    mode_specs = list(color_modes) if color_modes is not None else _default_color_modes(columns)
    histograms: dict[str, list[tuple[str, int, RGB]]] = {}
    for spec in mode_specs:
        mode = ColorMode.parse(spec)
        codes, table = classify_events(columns, mode)
        histograms[spec] = histogram_from_codes(codes, table)

    defaults = {
        "time": "absolute",
        "artifact": crit_list[min(1, len(crit_list) - 1)][0],
        "color": mode_specs[0] if mode_specs else "year",
    }
    return LayoutBundle(
        columns=columns,
        criteria=crit_list,
        permutations=permutations,
        color_modes=mode_specs,
        histograms=histograms,
        defaults=defaults,
        similarity_bins=bins,
        similarity_fell_back=fell_back,
        checksum="",
    )


# --- encoding -------------------------------------------------------------

def _delta_encode(arr: np.ndarray) -> bytes:
    out = np.empty(len(arr), dtype="<i8")
    if len(arr):
        out[0] = arr[0]
        out[1:] = np.asarray(arr[1:], dtype=np.int64) - np.asarray(arr[:-1], dtype=np.int64)
    return out.tobytes()

def _delta_decode(raw: bytes) -> np.ndarray:
    deltas = np.frombuffer(raw, dtype="<i8")
    return np.cumsum(deltas, dtype=np.int64)


_ARRAY_KINDS = {"i64": "<i8", "i32": "<i4", "u8": "u1", "f64": "<f8"}


def _stops_to_json(stops: tuple[tuple[float, RGB], ...]) -> list:
    return [[None if math.isinf(t) else t, format_hex(c)] for t, c in stops]


def _stops_from_json(raw: list) -> tuple[tuple[float, RGB], ...]:
    return tuple((math.inf if t is None else float(t), parse_hex(c)) for t, c in raw)


def _canonical(header: dict) -> bytes:
    return json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")


def serialize_bundle(bundle: LayoutBundle, compress_level: int = 6) -> bytes:
    cols = bundle.columns
    sections: list[tuple[str, str, bytes]] = []

    def add(name: str, kind: str, data: bytes) -> None:
        sections.append((name, kind, data))

    def add_array(name: str, kind: str, arr: np.ndarray) -> None:
        add(name, kind, np.asarray(arr, dtype=_ARRAY_KINDS[kind]).tobytes())

    def add_json(name: str, obj) -> None:
        add(name, "json", json.dumps(obj, ensure_ascii=False).encode("utf-8"))

    add_json("artifact.paths", cols.paths)
    add_array("artifact.ext_code", "i32", cols.ext_codes)
    add_json("artifact.ext_table", cols.ext_table)
    add_array("artifact.first_ts", "i64", cols.first_ts)
    add_array("artifact.last_ts", "i64", cols.last_ts)
    add_array("artifact.median_ts", "i64", cols.median_ts)
    add_array("artifact.age_s", "i64", cols.age_s)
    add_array("artifact.n_events", "i32", cols.n_events)
    for m in sorted(cols.metric_first):
        add_array(f"artifact.metric_first.{m}", "f64", cols.metric_first[m])
        add_array(f"artifact.metric_last.{m}", "f64", cols.metric_last[m])
        add_array(f"artifact.metric_delta.{m}", "f64", cols.metric_delta[m])
    add_array("event.artifact", "i32", cols.ev_artifact)
    add("event.ts", "i64.delta", _delta_encode(cols.ev_ts))
    add_array("event.kind", "u8", cols.ev_kind)
    add_array("event.author", "i32", cols.ev_author)
    add_json("event.author_table", cols.author_table)
    add_array("event.commit", "i32", cols.ev_commit)
    if all(len(c) == 40 and all(ch in "0123456789abcdef" for ch in c) for c in cols.commit_table):
        add("event.commit_table", "hex20", b"".join(bytes.fromhex(c) for c in cols.commit_table))
    else:  # non-git commit ids from third-party crawlers
        add_json("event.commit_table", cols.commit_table)
    for m in sorted(cols.ev_metrics):
        add_array(f"event.metric.{m}", "f64", cols.ev_metrics[m])
    for name, _spec in bundle.criteria:
        add_array(f"perm.{name}", "i32", bundle.permutations[name])
    add_json(
        "histograms",
        {
            spec: [[label, count, format_hex(rgb)] for label, count, rgb in rows]
            for spec, rows in bundle.histograms.items()
        },
    )

    raw = b"".join(data for _, _, data in sections)
    compressed = zlib.compress(raw, compress_level)

    offset = 0
    section_meta = []
    for name, kind, data in sections:
        section_meta.append({"name": name, "kind": kind, "offset": offset, "nbytes": len(data)})
        offset += len(data)

    header = {
        "format_version": FORMAT_VERSION,
        "dataset_id": cols.dataset_id,
        "n_artifacts": cols.n_artifacts,
        "n_events": cols.total_events,
        "n_commits": len(cols.commit_table),
        "t_min": int(cols.bounds.t_min),
        "t_max": int(cols.bounds.t_max),
        "max_age_s": int(cols.bounds.max_age_s),
        "max_median_dev_s": int(cols.bounds.max_median_dev_s),
        "metrics": [
            {
                "name": d.name,
                "unit": d.unit,
                "kind": d.kind.value,
                "stops": _stops_to_json(d.default_color_stops),
            }
            for d in cols.descriptors
        ],
        "criteria": [{"name": name, "spec": spec} for name, spec in bundle.criteria],
        "color_modes": bundle.color_modes,
        "defaults": bundle.defaults,
        "similarity_bins": bundle.similarity_bins,
        "similarity_fallback": bundle.similarity_fell_back,
        "sections": section_meta,
        "payload": {"codec": "zlib", "nbytes_compressed": len(compressed), "nbytes_raw": len(raw)},
    }
    digest = hashlib.sha256(_canonical(header) + compressed).hexdigest()
    header["checksum"] = f"sha256:{digest}"
    bundle.checksum = digest
    header_bytes = _canonical(header)
    return MAGIC + len(header_bytes).to_bytes(4, "little") + header_bytes + compressed


def build_bundle(
    dataset: Dataset,
    criteria: list[SortCriterion] = (),
    color_modes: list[str] | None = None,
    bins: int = DEFAULT_BINS,
) -> bytes:
    return serialize_bundle(assemble_bundle(dataset, criteria, color_modes, bins))


# --- decoding -------------------------------------------------------------

def load_bundle(data: bytes) -> LayoutBundle:
    if len(data) < len(MAGIC) + 4:
        raise BundleTruncatedError(f"stream of {len(data)} bytes is shorter than the framing")
    if data[: len(MAGIC)] != MAGIC:
        raise BundleVersionError(f"bad magic {data[:len(MAGIC)]!r}")
    hlen = int.from_bytes(data[len(MAGIC) : len(MAGIC) + 4], "little")
    body_start = len(MAGIC) + 4
    if body_start + hlen > len(data):
        raise BundleTruncatedError("header extends past end of stream")
    try:
        header = json.loads(data[body_start : body_start + hlen].decode("utf-8"))
        if not isinstance(header, dict):
            raise ValueError("header is not an object")
    except (ValueError, UnicodeDecodeError) as exc:
        raise BundleError(f"header is not valid JSON: {exc}") from exc
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise BundleVersionError(f"unsupported format version {version!r}")

    compressed = data[body_start + hlen :]
    try:
        payload_meta = header["payload"]
        expected_len = int(payload_meta["nbytes_compressed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise BundleError(f"malformed payload descriptor: {exc}") from exc
    if len(compressed) < expected_len:
        raise BundleTruncatedError(
            f"payload truncated: {len(compressed)} of {expected_len} bytes"
        )
    if len(compressed) > expected_len:
        raise BundleError("trailing bytes after payload")

    stored = header.pop("checksum", None)
    digest = hashlib.sha256(_canonical(header) + compressed).hexdigest()
    if stored != f"sha256:{digest}":
        raise BundleChecksumError("checksum mismatch")

    try:
        raw = zlib.decompress(compressed)
    except zlib.error as exc:
        raise BundleError(f"payload does not decompress: {exc}") from exc
    if len(raw) != int(payload_meta["nbytes_raw"]):
        raise BundleError("decompressed payload has unexpected size")

    try:
        return _decode(header, raw, digest)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, BundleError):
            raise
        raise BundleError(f"malformed bundle structure: {exc}") from exc


def _decode(header: dict, raw: bytes, digest: str) -> LayoutBundle:
    by_name: dict[str, tuple[str, bytes]] = {}
    for meta in header["sections"]:
        lo, hi = int(meta["offset"]), int(meta["offset"]) + int(meta["nbytes"])
        if lo < 0 or hi > len(raw):
            raise BundleError(f"section {meta['name']!r} out of payload bounds")
        by_name[meta["name"]] = (meta["kind"], raw[lo:hi])

    def array(name: str, kind: str) -> np.ndarray:
        actual_kind, data = by_name[name]
        if actual_kind != kind:
            raise BundleError(f"section {name!r} has kind {actual_kind!r}, expected {kind!r}")
        if kind == "i64.delta":
            return _delta_decode(data)
        return np.frombuffer(data, dtype=_ARRAY_KINDS[kind]).copy()

    def jsec(name: str):
        actual_kind, data = by_name[name]
        if actual_kind != "json":
            raise BundleError(f"section {name!r} has kind {actual_kind!r}, expected json")
        return json.loads(data.decode("utf-8"))

    descriptors = tuple(
        MetricDescriptor(
            name=m["name"],
            unit=m.get("unit", ""),
            kind=MetricKind(m.get("kind", "gauge")),
            default_color_stops=_stops_from_json(m.get("stops", [])),
        )
        for m in header["metrics"]
    )
    metric_names = [d.name for d in descriptors]

    commit_kind, commit_raw = by_name["event.commit_table"]
    if commit_kind == "hex20":
        if len(commit_raw) % 20:
            raise BundleError("commit table length is not a multiple of 20")
        commit_table = [commit_raw[i : i + 20].hex() for i in range(0, len(commit_raw), 20)]
    else:
        commit_table = list(jsec("event.commit_table"))

    columns = DatasetColumns(
        dataset_id=str(header["dataset_id"]),
        bounds=TimeBounds(
            t_min=int(header["t_min"]),
            t_max=int(header["t_max"]),
            max_age_s=int(header["max_age_s"]),
            max_median_dev_s=int(header["max_median_dev_s"]),
        ),
        descriptors=descriptors,
        paths=list(jsec("artifact.paths")),
        ext_codes=array("artifact.ext_code", "i32"),
        ext_table=list(jsec("artifact.ext_table")),
        first_ts=array("artifact.first_ts", "i64"),
        last_ts=array("artifact.last_ts", "i64"),
        median_ts=array("artifact.median_ts", "i64"),
        age_s=array("artifact.age_s", "i64"),
        n_events=array("artifact.n_events", "i32"),
        metric_first={m: array(f"artifact.metric_first.{m}", "f64") for m in metric_names},
        metric_last={m: array(f"artifact.metric_last.{m}", "f64") for m in metric_names},
        metric_delta={m: array(f"artifact.metric_delta.{m}", "f64") for m in metric_names},
        ev_artifact=array("event.artifact", "i32"),
        ev_ts=array("event.ts", "i64.delta"),
        ev_kind=array("event.kind", "u8"),
        ev_author=array("event.author", "i32"),
        author_table=list(jsec("event.author_table")),
        ev_commit=array("event.commit", "i32"),
        commit_table=commit_table,
        ev_metrics={m: array(f"event.metric.{m}", "f64") for m in metric_names},
    )

    n_events = int(header["n_events"])
    n_artifacts = int(header["n_artifacts"])
    if len(columns.ev_ts) != n_events or len(columns.paths) != n_artifacts:
        raise BundleError("column lengths disagree with header counts")
    for name in ("ev_artifact", "ev_kind", "ev_author", "ev_commit"):
        if len(getattr(columns, name)) != n_events:
            raise BundleError(f"event column {name} has wrong length")
    if columns.ev_artifact.size and not (
        0 <= columns.ev_artifact.min() and columns.ev_artifact.max() < n_artifacts
    ):
        raise BundleError("event artifact ordinals out of range")

    criteria = [(c["name"], c["spec"]) for c in header["criteria"]]
    permutations = {}
    for name, _spec in criteria:
        perm = array(f"perm.{name}", "i32")
        if len(perm) != n_artifacts or (
            n_artifacts and sorted(perm.tolist()) != list(range(n_artifacts))
        ):
            raise BundleError(f"permutation {name!r} is not a bijection")
        permutations[name] = perm

    histograms = {
        spec: [(label, int(count), parse_hex(color)) for label, count, color in rows]
        for spec, rows in jsec("histograms").items()
    }

    return LayoutBundle(
        columns=columns,
        criteria=criteria,
        permutations=permutations,
        color_modes=list(header["color_modes"]),
        histograms=histograms,
        defaults=dict(header["defaults"]),
        similarity_bins=int(header["similarity_bins"]),
        similarity_fell_back=bool(header["similarity_fallback"]),
        checksum=digest,
    )


def bundles_equal(a: LayoutBundle, b: LayoutBundle) -> bool:
    """Semantic (post-decode) equality of two bundles."""
    ca, cb = a.columns, b.columns
    if (
        ca.dataset_id != cb.dataset_id
        or ca.bounds != cb.bounds
        or ca.descriptors != cb.descriptors
        or ca.paths != cb.paths
        or ca.ext_table != cb.ext_table
        or ca.author_table != cb.author_table
        or ca.commit_table != cb.commit_table
    ):
        return False
    int_cols = ("ext_codes", "first_ts", "last_ts", "median_ts", "age_s", "n_events",
                "ev_artifact", "ev_ts", "ev_kind", "ev_author", "ev_commit")
    if not all(np.array_equal(getattr(ca, n), getattr(cb, n)) for n in int_cols):
        return False
    float_maps = ("metric_first", "metric_last", "metric_delta", "ev_metrics")
    for attr in float_maps:
        ma, mb = getattr(ca, attr), getattr(cb, attr)
        if ma.keys() != mb.keys():
            return False
        if not all(np.array_equal(ma[k], mb[k], equal_nan=True) for k in ma):
            return False
    if a.criteria != b.criteria or a.permutations.keys() != b.permutations.keys():
        return False
    if not all(np.array_equal(a.permutations[k], b.permutations[k]) for k in a.permutations):
        return False
    return (
        a.color_modes == b.color_modes
        and a.histograms == b.histograms
        and a.defaults == b.defaults
        and a.similarity_bins == b.similarity_bins
        and a.similarity_fell_back == b.similarity_fell_back
    )
