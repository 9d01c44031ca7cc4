import re
import xml.etree.ElementTree as ET

import pytest

from conftest import EN_ES, fake_grid, line
from cstrigger.grid import GridSpec, run_grid
from cstrigger.plot import PlotStyle, render_multitest_svg
from cstrigger.synth import random_corpus

SVG = "{http://www.w3.org/2000/svg}"


def diamonds(svg):
    return svg.count('class="diamond"')


def plotted_points(svg):
    root = ET.fromstring(svg.split("\n", 1)[1])
    pts = []
    for el in root.iter(f"{SVG}circle"):
        pts.append((float(el.get("cx")), float(el.get("cy"))))
    for el in root.iter(f"{SVG}path"):
        if el.get("class") == "series":
            nums = [float(x) for x in re.findall(r"-?\d+(?:\.\d+)?", el.get("d"))]
            pts += list(zip(nums[::2], nums[1::2]))
    return root, pts


class TestDiamonds:
    def test_all_significant_has_none(self):
        assert diamonds(render_multitest_svg(fake_grid())) == 0

    def test_one_nonsignificant_cell(self):
        g = fake_grid(p={("l2-l1", "neighbor", 4): 0.5})
        assert diamonds(render_multitest_svg(g)) == 1

    def test_threshold_is_inclusive(self):
        g = fake_grid(p={("both", "precede", 1): 0.05, ("both", "precede", 2): 0.0499})
        assert diamonds(render_multitest_svg(g)) == 1

    def test_custom_alpha(self):
        g = fake_grid(p={("both", "precede", 1): 0.005})
        assert diamonds(render_multitest_svg(g, PlotStyle(alpha=0.001))) == 36


class TestDocument:
    def test_byte_identical(self):
        g = run_grid(random_corpus(3, EN_ES), GridSpec("all-shared"))
        assert render_multitest_svg(g) == render_multitest_svg(g)

    def test_six_series_with_styles(self):
        svg = render_multitest_svg(fake_grid())
        series = re.findall(r'<path class="series" data-direction="([^"]+)" data-mode="([^"]+)"[^>]*>', svg)
        assert len(series) == 6
        dashed = re.findall(r'<path class="series"[^>]*data-mode="neighbor"[^>]*stroke-dasharray', svg)
        assert len(dashed) == 3
        assert "#e6b400" in svg and "#d62728" in svg and "#2ca02c" in svg

    @pytest.mark.parametrize("log_y", [False, True])
    def test_points_inside_axes(self, log_y):
        rsp = {**line("both", "precede", [9.0, 4.0, 2.0, 1.0, 0.5, 0.2]), ("l1-l2", "neighbor", 3): None}
        svg = render_multitest_svg(fake_grid(rsp=rsp), PlotStyle(log_y=log_y))
        root, pts = plotted_points(svg)
        vb = [float(v) for v in root.get("viewBox").split()]
        axes = root.find(f"{SVG}g[@class='axes']")
        xs = [float(l.get("x1")) for l in axes] + [float(l.get("x2")) for l in axes]
        ys = [float(l.get("y1")) for l in axes] + [float(l.get("y2")) for l in axes]
        assert len(pts) > 0
        for x, y in pts:
            assert vb[0] <= x <= vb[0] + vb[2] and vb[1] <= y <= vb[1] + vb[3]
            assert min(xs) <= x <= max(xs) and min(ys) <= y <= max(ys)

    def test_undefined_breaks_line(self):
        g = fake_grid(rsp=line("both", "precede", [2.0, 1.9, None, 1.7, 1.6, 1.5]))
        d = re.search(r'data-direction="both" data-mode="precede" d="([^"]+)"', render_multitest_svg(g)).group(1)
        assert d.count("M") == 2
        assert d.count("L") == 3

    def test_no_data(self):
        g = fake_grid(rsp={cell: None for cell in GridSpec("shared-l2").cells()})
        svg = render_multitest_svg(g)
        assert 'class="no-data"' in svg and "no data" in svg
        assert '<g class="axes"' in svg
        ET.fromstring(svg.split("\n", 1)[1])

    def test_log_y_labelled(self):
        assert "(log scale)" in render_multitest_svg(fake_grid(), PlotStyle(log_y=True))

    def test_colors_configurable(self):
        style = PlotStyle(colors={"l1-l2": "#000080", "l2-l1": "#800000", "both": "#444444"})
        svg = render_multitest_svg(fake_grid(), style)
        assert "#000080" in svg and "#e6b400" not in svg

    def test_fixed_decimal_coordinates(self):
        svg = render_multitest_svg(run_grid(random_corpus(5, EN_ES), GridSpec("shared-l1")))
        for num in re.findall(r'c[xy]="([^"]+)"', svg):
            assert re.fullmatch(r"-?\d+(\.\d{1,2})?", num)
