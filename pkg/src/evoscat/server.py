"""Read-only HTTP service over preprocessed `.evb` bundles.

    GET /datasets                      catalog
    GET /datasets/{id}/bundle          raw bundle bytes
    GET /datasets/{id}/render?…        PNG (same code path as the CLI)
    GET /datasets/{id}/nearest?x&y&r&… JSON event details or null

All mutation happens offline through the CLI; bundles are immutable once
loaded, so responses are strongly cacheable (ETag = bundle checksum).
"""

from __future__ import annotations

import logging
import os
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .bundle import BundleError, LayoutBundle, load_bundle
from .render import ViewConfig, build_view_index, event_details, render
from .spatial import GridIndex
from .transforms import TimeMode
from .urlstate import ViewStateError, parse_view_state

logger = logging.getLogger(__name__)

DATA_DIR_ENV = "EVOSCAT_DATA_DIR"


class BundleStore:
    """Lazy, single-flight loader for the .evb files in one directory."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self._bundles: dict[str, LayoutBundle] = {}
        self._indexes: dict[tuple[str, str, str], GridIndex] = {}
        self._lock = threading.Lock()

    def ids(self) -> list[str]:
        return sorted(p.stem for p in self.data_dir.glob("*.evb"))

    def get(self, dataset_id: str) -> LayoutBundle:
        with self._lock:
            bundle = self._bundles.get(dataset_id)
            if bundle is not None:
                return bundle
        path = self.data_dir / f"{dataset_id}.evb"
        if dataset_id not in self.ids() or not path.is_file():
            raise KeyError(dataset_id)
        bundle = load_bundle(path.read_bytes())
        with self._lock:
            return self._bundles.setdefault(dataset_id, bundle)

    def index(self, dataset_id: str, time_mode: TimeMode, criterion: str) -> GridIndex:
        key = (dataset_id, time_mode.value, criterion)
        with self._lock:
            idx = self._indexes.get(key)
            if idx is not None:
                return idx
        idx = build_view_index(self.get(dataset_id), time_mode, criterion)
        with self._lock:
            return self._indexes.setdefault(key, idx)


def catalog_entry(bundle: LayoutBundle) -> dict:
    return {
        "id": bundle.dataset_id,
        "title": bundle.dataset_id,
        "artifacts": bundle.n_artifacts,
        "commits": bundle.n_commits,
        "events": bundle.n_events,
        "t_min": int(bundle.columns.bounds.t_min),
        "t_max": int(bundle.columns.bounds.t_max),
        "criteria": [name for name, _ in bundle.criteria],
        "color_modes": bundle.color_modes,
        "metrics": [d.name for d in bundle.columns.descriptors],
        "defaults": bundle.defaults,
    }


def create_app(data_dir: str | Path | None = None, ui_dir: str | Path | None = None) -> FastAPI:
    if data_dir is None:
        data_dir = os.environ.get(DATA_DIR_ENV, ".")
    store = BundleStore(data_dir)
    app = FastAPI(title="evoscat", version="0.1.0")
    app.state.store = store

    def bundle_or_404(dataset_id: str) -> LayoutBundle:
        try:
            return store.get(dataset_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown dataset {dataset_id!r}")
        except BundleError as exc:
            raise HTTPException(status_code=500, detail=f"bundle unreadable: {exc}")

    def view_from_request(request: Request, dataset_id: str) -> ViewConfig:
        bundle = bundle_or_404(dataset_id)
        url = f"?dataset={dataset_id}&{request.url.query}"
        try:
            view = parse_view_state(url, defaults=bundle.defaults)
        except ViewStateError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        if view.criterion not in bundle.permutations:
            raise HTTPException(
                status_code=400, detail=f"unknown criterion {view.criterion!r}"
            )
        return view

    @app.get("/datasets")
    def datasets() -> list[dict]:
        entries = []
        for dataset_id in store.ids():
            try:
                entries.append(catalog_entry(store.get(dataset_id)))
            except BundleError as exc:
                logger.warning("skipping unreadable bundle %s: %s", dataset_id, exc)
        return entries

    @app.get("/datasets/{dataset_id}/bundle")
    def bundle_bytes(dataset_id: str, request: Request) -> Response:
        bundle = bundle_or_404(dataset_id)
        etag = f'"{bundle.checksum}"'
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        data = (store.data_dir / f"{dataset_id}.evb").read_bytes()
        return Response(
            content=data,
            media_type="application/octet-stream",
            headers={"ETag": etag, "Cache-Control": "public, max-age=31536000"},
        )

    @app.get("/datasets/{dataset_id}/render")
    def render_view(dataset_id: str, request: Request) -> Response:
        bundle = bundle_or_404(dataset_id)
        view = view_from_request(request, dataset_id)
        try:
            png = render(bundle, view)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return Response(content=png, media_type="image/png")

    @app.get("/datasets/{dataset_id}/nearest")
    def nearest(dataset_id: str, request: Request, x: float, y: float, r: float = 0.05):
        bundle = bundle_or_404(dataset_id)
        view = view_from_request(request, dataset_id)
        index = store.index(dataset_id, view.time_mode, view.criterion)
        ordinal = index.nearest(x, y, r)
        if ordinal is None:
            return JSONResponse(content=None)
        return JSONResponse(content=event_details(bundle, ordinal))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app


def serve(data_dir: str | Path, port: int = 8000, ui_dir: str | Path | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(data_dir, ui_dir), host="127.0.0.1", port=port)
