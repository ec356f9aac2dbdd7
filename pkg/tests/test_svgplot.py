"""SVG renderer: determinism, escaping, and guard rails."""

import numpy as np
import pytest

from pendq import DomainError
from pendq.svgplot import Curve, Point, render_loglog


def _curves():
    x = np.geomspace(1.0, 1e3, 50)
    return [
        Curve("alpha", x, 1.0 / x),
        Curve("beta & <gamma>", x, 2.0 / x**0.5),
    ]


def test_render_deterministic_and_well_formed():
    a = render_loglog(_curves(), "t", "x", "y")
    b = render_loglog(_curves(), "t", "x", "y")
    assert a == b
    assert a.startswith("<svg ")
    assert a.rstrip().endswith("</svg>")
    assert a.count("<polyline ") == 2


def test_labels_escaped():
    svg = render_loglog(_curves(), "a & b", "x<y", "y>z")
    assert "beta &amp; &lt;gamma&gt;" in svg
    assert "a &amp; b" in svg
    assert "x&lt;y" in svg
    assert "<gamma>" not in svg


def test_scatter_and_star():
    svg = render_loglog(
        [],
        "survey",
        "mass",
        "rate",
        points=[Point("p1", 1e-6, 1e-2), Point("p2", 1e-3, 1e-4)],
        star=Point("here", 1e-5, 1e-3),
    )
    assert svg.count("<circle ") == 2
    assert svg.count("<polygon ") == 1
    assert ">here</text>" in svg


def test_nonfinite_points_dropped():
    x = np.array([1.0, 10.0, np.nan, 100.0, 1000.0])
    y = np.array([1.0, 0.1, 1.0, 0.0, 1e-3])  # nan and zero rows dropped
    svg = render_loglog([Curve("c", x, y)], "t", "x", "y")
    poly = svg.split("<polyline ")[1]
    coords = poly.split('points="')[1].split('"')[0]
    assert len(coords.split(" ")) == 3


@pytest.mark.parametrize(
    "call",
    [
        lambda: render_loglog([], "t", "x", "y"),
        lambda: render_loglog(
            [Curve("c", np.array([1.0, 2.0]), np.array([-1.0, 0.0]))], "t", "x", "y"
        ),
        lambda: render_loglog([], "t", "x", "y", points=[Point("p", -1.0, 1.0)]),
        lambda: render_loglog([], "t", "x", "y", star=Point("s", 1.0, 0.0)),
    ],
)
def test_rejects_unplottable_input(call):
    with pytest.raises(DomainError):
        call()


def test_resonance_needle_does_not_stretch_axis():
    x = np.geomspace(1.0, 1e3, 400)
    y = np.full_like(x, 1e-3)
    y[200] = 1e6  # single spike
    svg_spiky = render_loglog([Curve("c", x, y)], "t", "x", "y")
    svg_flat = render_loglog([Curve("c", x, np.full_like(x, 1e-3))], "t", "x", "y")
    # the y decade labels of both plots match: the spike is clipped, not scaled in
    def decade_labels(svg):
        return {seg.split("</text>")[0] for seg in svg.split('text-anchor="end">')[1:]}
    assert decade_labels(svg_spiky) == decade_labels(svg_flat)
