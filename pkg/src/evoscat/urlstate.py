"""Shareable view-state URLs: `?dataset=ID#time=…&artifact=…&color=…`.

The dataset id travels in the query string; everything else lives in the
fragment so a link fully reproduces a visualization. Because fragments never
reach the server, the render/nearest endpoints accept the same keys as query
parameters. Unknown keys are ignored; unknown values for known keys are
errors naming the key.
"""

from __future__ import annotations

from urllib.parse import parse_qsl, urlencode, urlsplit

from .coloring import ColorMode
from .render import ViewConfig
from .transforms import TimeMode


class ViewStateError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(message)
        self.key = key


DEFAULTS = {"time": "absolute", "artifact": "path", "color": "year"}


def _parse_pairs(text: str) -> dict[str, str]:
    return dict(parse_qsl(text, keep_blank_values=True))


def _parse_bool(key: str, value: str) -> bool:
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ViewStateError(key, f"bad boolean for {key!r}: {value!r}")


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ViewStateError(key, f"bad number for {key!r}: {value!r}") from None


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ViewStateError(key, f"bad integer for {key!r}: {value!r}") from None


def parse_view_state(url: str, defaults: dict[str, str] | None = None) -> ViewConfig:
    """Parse a view URL (or just its "?query#fragment" tail) into a ViewConfig.

    `defaults` supplies per-bundle fallbacks for time/artifact/color.
    """
    parts = urlsplit(url)
    query = _parse_pairs(parts.query)
    fragment = _parse_pairs(parts.fragment)
    params = {**query, **fragment}  # fragment wins; query accepted server-side

    base = dict(DEFAULTS)
    if defaults:
        base.update(defaults)

    dataset = query.get("dataset", params.get("dataset", ""))

    time_value = params.get("time", base["time"])
    try:
        time_mode = TimeMode.parse(time_value)
    except ValueError:
        raise ViewStateError("time", f"unknown time mode {time_value!r}") from None

    color_value = params.get("color", base["color"])
    try:
        color_mode = ColorMode.parse(color_value)
    except ValueError:
        raise ViewStateError("color", f"unknown color mode {color_value!r}") from None

    kwargs: dict = {}
    if "w" in params:
        kwargs["width"] = _parse_int("w", params["w"])
    if "h" in params:
        kwargs["height"] = _parse_int("h", params["h"])
    if "density" in params:
        kwargs["density"] = _parse_bool("density", params["density"])
    if "alpha" in params:
        kwargs["dot_alpha"] = _parse_float("alpha", params["alpha"])
    if "radius" in params:
        kwargs["dot_radius_px"] = _parse_int("radius", params["radius"])
    if "viewport" in params:
        pieces = params["viewport"].split(",")
        if len(pieces) != 4:
            raise ViewStateError("viewport", "viewport needs x0,x1,y0,y1")
        kwargs["viewport"] = tuple(_parse_float("viewport", p) for p in pieces)

    try:
        return ViewConfig(
            dataset_id=dataset,
            time_mode=time_mode,
            criterion=params.get("artifact", base["artifact"]),
            color_mode=color_mode,
            **kwargs,
        )
    except ValueError as exc:
        raise ViewStateError("view", str(exc)) from None


def serialize_view_state(view: ViewConfig, full: bool = False) -> str:
    """Inverse of parse_view_state; `full` also emits keys at default values."""
    reference = ViewConfig(dataset_id=view.dataset_id)
    frag: list[tuple[str, str]] = [
        ("time", view.time_mode.value),
        ("artifact", view.criterion),
        ("color", view.color_mode.spec()),
    ]
    if full or view.width != reference.width:
        frag.append(("w", str(view.width)))
    if full or view.height != reference.height:
        frag.append(("h", str(view.height)))
    if full or view.density != reference.density:
        frag.append(("density", "1" if view.density else "0"))
    if full or view.dot_alpha != reference.dot_alpha:
        frag.append(("alpha", repr(view.dot_alpha)))
    if full or view.dot_radius_px != reference.dot_radius_px:
        frag.append(("radius", str(view.dot_radius_px)))
    if full or view.viewport != reference.viewport:
        frag.append(("viewport", ",".join(repr(v) for v in view.viewport)))
    query = urlencode({"dataset": view.dataset_id})
    return f"?{query}#{urlencode(frag)}"
