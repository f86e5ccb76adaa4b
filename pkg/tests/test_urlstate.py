import random

import pytest

from evoscat.coloring import ColorKind, ColorMode
from evoscat.render import ViewConfig
from evoscat.transforms import TimeMode
from evoscat.urlstate import ViewStateError, parse_view_state, serialize_view_state


def test_documented_link_parses():
    view = parse_view_state("?dataset=wfgh#time=absolute&artifact=last&color=year")
    assert view.dataset_id == "wfgh"
    assert view.time_mode is TimeMode.ABSOLUTE
    assert view.criterion == "last"
    assert view.color_mode == ColorMode(ColorKind.YEAR)


def test_full_url_also_accepted():
    view = parse_view_state(
        "https://example.test/evoscat/?dataset=cpython#time=relstart&artifact=mid&color=ext"
    )
    assert view.dataset_id == "cpython"
    assert view.time_mode is TimeMode.REL_START
    assert view.criterion == "mid"


def test_empty_fragment_takes_defaults():
    view = parse_view_state("?dataset=d#")
    assert view.time_mode is TimeMode.ABSOLUTE
    assert view.criterion == "path"
    assert view.color_mode == ColorMode(ColorKind.YEAR)

    view = parse_view_state("?dataset=d#", defaults={"artifact": "mid", "color": "ext"})
    assert view.criterion == "mid"
    assert view.color_mode.kind is ColorKind.TYPE


def test_normage_alias_and_constant_color():
    view = parse_view_state("?dataset=oas#time=normage&artifact=age&color=%23000")
    assert view.time_mode is TimeMode.NORMALIZED
    assert view.color_mode.kind is ColorKind.CONSTANT
    # unencoded hash inside the fragment survives too (as in published links)
    view = parse_view_state("?dataset=oas#time=normtime&artifact=age&color=#000")
    assert view.color_mode.constant == (0, 0, 0)


def test_unknown_values_name_the_key():
    with pytest.raises(ViewStateError) as err:
        parse_view_state("?dataset=d#time=sideways")
    assert err.value.key == "time"
    with pytest.raises(ViewStateError) as err:
        parse_view_state("?dataset=d#color=rainbow")
    assert err.value.key == "color"
    with pytest.raises(ViewStateError) as err:
        parse_view_state("?dataset=d#alpha=loud")
    assert err.value.key == "alpha"


def test_unknown_keys_ignored():
    view = parse_view_state("?dataset=d&utm_source=mail#time=relend&wat=1")
    assert view.time_mode is TimeMode.REL_END


def random_view(rng: random.Random) -> ViewConfig:
    color = rng.choice([
        ColorMode(ColorKind.YEAR),
        ColorMode(ColorKind.TYPE),
        ColorMode(ColorKind.AUTHOR),
        ColorMode(ColorKind.METRIC, metric="size"),
        ColorMode(ColorKind.VARIATION, metric="size"),
        ColorMode(ColorKind.CONSTANT, constant=(rng.randrange(256), 0, 128)),
    ])
    x0 = rng.uniform(0, 0.5)
    y0 = rng.uniform(0, 0.5)
    return ViewConfig(
        dataset_id=rng.choice(["wfgh", "oas", "cpython"]),
        time_mode=rng.choice(list(TimeMode)),
        criterion=rng.choice(["path", "first", "last", "mid", "events", "age", "similarity"]),
        color_mode=color,
        width=rng.randrange(16, 4000),
        height=rng.randrange(16, 4000),
        viewport=(x0, x0 + rng.uniform(0.01, 0.5), y0, y0 + rng.uniform(0.01, 0.5)),
        density=rng.random() < 0.5,
        dot_alpha=rng.choice([0.05, 0.2, 1.0]),
        dot_radius_px=rng.randrange(1, 4),
    )


def test_serialize_parse_round_trip_100_random_configs():
    rng = random.Random(606)
    for _ in range(100):
        view = random_view(rng)
        again = parse_view_state(serialize_view_state(view))
        assert again == view


def test_serialized_form_uses_fragment_grammar():
    view = ViewConfig(dataset_id="wfgh", criterion="last")
    url = serialize_view_state(view)
    assert url.startswith("?dataset=wfgh#")
    assert "time=absolute" in url and "artifact=last" in url and "color=year" in url
