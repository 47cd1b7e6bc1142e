import pytest

from coxmaint.errors import UsageError
from coxmaint.svg import Series, emit_plot


def test_single_series_exactly_one_polyline():
    svg = emit_plot(
        [Series("s", (0.0, 1.0, 2.0), (1.0, 4.0, 2.0))],
        title="t", xlabel="x", ylabel="y",
    )
    assert svg.count("<polyline") == 1
    assert svg.count("<polygon") == 0
    assert svg.startswith("<svg")
    assert svg.rstrip().endswith("</svg>")


def test_band_series_one_polygon_one_polyline():
    svg = emit_plot(
        [Series("s", (0.0, 1.0, 2.0), (1.0, 4.0, 2.0), std=(0.5, 0.5, 0.5))],
        title="t", xlabel="x", ylabel="y",
    )
    assert svg.count("<polyline") == 1
    assert svg.count("<polygon") == 1


def test_empty_series_list_is_usage_error():
    with pytest.raises(UsageError):
        emit_plot([], title="t", xlabel="x", ylabel="y")


def test_empty_series_is_usage_error():
    with pytest.raises(UsageError):
        Series("s", (), ())


def test_mismatched_lengths_usage_error():
    with pytest.raises(UsageError):
        Series("s", (0.0, 1.0), (1.0,))
    with pytest.raises(UsageError):
        Series("s", (0.0, 1.0), (1.0, 2.0), std=(0.1,))


def test_hline_adds_line_not_polyline():
    base = emit_plot(
        [Series("s", (0.0, 1.0), (1.0, 2.0))],
        title="t", xlabel="x", ylabel="y",
    )
    marked = emit_plot(
        [Series("s", (0.0, 1.0), (1.0, 2.0))],
        title="t", xlabel="x", ylabel="y",
        hlines=[("lambda*", 1.5)],
    )
    assert marked.count("<polyline") == base.count("<polyline")
    assert marked.count("<line") == base.count("<line") + 1


def test_bar_series_rects():
    svg = emit_plot(
        [
            Series("a", (0.0, 1.0), (3.0, 4.0), kind="bar"),
            Series("b", (0.0, 1.0), (2.0, 5.0), kind="bar"),
        ],
        title="t", xlabel="x", ylabel="y",
    )
    # one background rect plus one rect per bar
    assert svg.count("<rect") == 1 + 4


def test_deterministic_output():
    series = [Series("s", (0.0, 1.0, 2.0), (1.0, 4.0, 2.0), std=(0.1, 0.2, 0.1))]
    a = emit_plot(series, title="t", xlabel="x", ylabel="y")
    b = emit_plot(series, title="t", xlabel="x", ylabel="y")
    assert a == b
