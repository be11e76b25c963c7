import random

import pytest

from genre_grid.errors import DataError
from genre_grid.grid import (
    GridPoint,
    RenderOptions,
    SentenceLabelPair,
    ZoomBounds,
    aggregate_units,
    compute_zoom_bounds,
    convex_hull,
    read_grid_csv,
    render_grid,
    score_item,
    score_items,
    write_grid_csv,
)


def make_pairs(item_id, fact_labels, formal_flags):
    return [
        SentenceLabelPair(
            sentence_id=f"{item_id}:{i:05d}",
            item_id=item_id,
            factuality=f,
            formality="formal" if flag else "informal",
        )
        for i, (f, flag) in enumerate(zip(fact_labels, formal_flags))
    ]


def random_pairs(item_id, n, rng):
    facts = [rng.choice(["fact", "opinion", "neither"]) for _ in range(n)]
    formals = [rng.random() < 0.6 for _ in range(n)]
    return make_pairs(item_id, facts, formals)


class TestScoreItem:
    def test_fraction_arithmetic(self):
        pairs = make_pairs(
            "it1",
            ["fact"] * 7 + ["opinion"] * 2 + ["neither"],
            [True] * 8 + [False] * 2,
        )
        point = score_item(pairs)
        assert point.n_sentences == 10
        assert point.frac_fact == pytest.approx(0.7)
        assert point.frac_formal == pytest.approx(0.8)
        assert point.frac_opinion == pytest.approx(0.2)
        assert point.frac_neither == pytest.approx(0.1)

    def test_cap_uses_first_100(self):
        rng = random.Random(1)
        pairs = make_pairs("it1", ["fact"] * 100 + ["opinion"] * 50, [True] * 150)
        point = score_item(pairs, cap=100)
        assert point.n_sentences == 100
        assert point.frac_fact == 1.0
        uncapped = score_item(pairs, cap=None)
        assert uncapped.n_sentences == 150
        assert uncapped.frac_fact == pytest.approx(100 / 150)

    def test_boundary_all_fact_formal(self):
        pairs = make_pairs("it1", ["fact"] * 5, [True] * 5)
        point = score_item(pairs)
        assert (point.frac_fact, point.frac_formal) == (1.0, 1.0)

    def test_cap_above_length_changes_nothing(self):
        rng = random.Random(2)
        pairs = random_pairs("it1", 40, rng)
        assert score_item(pairs, cap=100) == score_item(pairs, cap=None)

    def test_empty_rejected(self):
        with pytest.raises(DataError, match="at least one"):
            score_item([])

    def test_mixed_items_rejected(self):
        pairs = make_pairs("a", ["fact"], [True]) + make_pairs("b", ["fact"], [True])
        with pytest.raises(DataError, match="several items"):
            score_item(pairs)

    def test_denominator_modes(self):
        pairs = make_pairs("it1", ["fact", "fact", "opinion", "neither"], [True] * 4)
        point = score_item(pairs)
        assert point.coordinates("all")[0] == pytest.approx(0.5)
        assert point.coordinates("fact_opinion")[0] == pytest.approx(2 / 3)
        with pytest.raises(DataError):
            point.coordinates("bogus")


class TestAggregate:
    def test_equal_weight_pooling(self):
        a = make_pairs("a", ["fact"] * 6 + ["opinion"] * 4, [True] * 8 + [False] * 2)
        b = make_pairs("b", ["fact"] * 8 + ["opinion"] * 2, [True] * 6 + [False] * 4)
        points = aggregate_units(a + b, {"a": "out", "b": "out"}, level="outlet")
        (point,) = points
        assert point.frac_fact == pytest.approx(0.7)
        assert point.frac_formal == pytest.approx(0.7)
        assert point.n_sentences == 20

    def test_singleton_group_equals_item_point(self):
        rng = random.Random(3)
        pairs = random_pairs("solo", 30, rng)
        item_point = score_item(pairs, cap=None)
        (group_point,) = aggregate_units(pairs, {"solo": "g"}, level="section")
        assert group_point.frac_fact == item_point.frac_fact
        assert group_point.frac_formal == item_point.frac_formal
        assert group_point.n_sentences == item_point.n_sentences

    def test_unmapped_item_listed(self):
        pairs = make_pairs("known", ["fact"] * 3, [True] * 3) + make_pairs(
            "mystery", ["fact"], [True]
        )
        with pytest.raises(DataError, match="mystery"):
            aggregate_units(pairs, {"known": "g"}, level="outlet")

    def test_pooled_equals_weighted_mean_of_items(self):
        rng = random.Random(4)
        for trial in range(25):
            items = {}
            pairs = []
            for k in range(rng.randint(2, 6)):
                item_pairs = random_pairs(f"it{k}", rng.randint(1, 40), rng)
                items[f"it{k}"] = item_pairs
                pairs.extend(item_pairs)
            grouping = {iid: "g" for iid in items}
            (pooled,) = aggregate_units(pairs, grouping, level="outlet")
            total = sum(len(p) for p in items.values())
            weighted_fact = (
                sum(score_item(p, cap=None).frac_fact * len(p) for p in items.values()) / total
            )
            weighted_formal = (
                sum(score_item(p, cap=None).frac_formal * len(p) for p in items.values()) / total
            )
            assert pooled.frac_fact == pytest.approx(weighted_fact, abs=1e-12)
            assert pooled.frac_formal == pytest.approx(weighted_formal, abs=1e-12)
            assert pooled.frac_fact + pooled.frac_opinion + pooled.frac_neither == pytest.approx(
                1.0, abs=1e-9
            )

    def test_cap_applied_per_item_before_pooling(self):
        a = make_pairs("a", ["fact"] * 10, [True] * 10)
        b = make_pairs("b", ["opinion"] * 30, [False] * 30)
        (point,) = aggregate_units(a + b, {"a": "g", "b": "g"}, level="outlet", cap=10)
        assert point.n_sentences == 20
        assert point.frac_fact == pytest.approx(0.5)

    def test_unpooled_mean_mode(self):
        a = make_pairs("a", ["fact"] * 9 + ["opinion"], [True] * 10)  # 0.9 fact, 10 sents
        b = make_pairs("b", ["opinion"] * 30, [True] * 30)  # 0.0 fact, 30 sents
        (pooled,) = aggregate_units(a + b, {"a": "g", "b": "g"}, level="outlet")
        (mean,) = aggregate_units(a + b, {"a": "g", "b": "g"}, level="outlet", pooled=False)
        assert pooled.frac_fact == pytest.approx(9 / 40)
        assert mean.frac_fact == pytest.approx(0.45)

    def test_score_items_order_and_display(self):
        pairs = make_pairs("b", ["fact"] * 3, [True] * 3) + make_pairs(
            "a", ["opinion"] * 3, [False] * 3
        )
        points = score_items(pairs, display={"a": ("Blog posts", "written")})
        assert [p.unit_id for p in points] == ["b", "a"]
        assert points[1].genre_tag == "Blog posts"
        assert points[1].text_kind == "written"


class TestZoomBounds:
    def test_constant_coordinates(self):
        points = [
            GridPoint("a", "item", 10, 0.9, 0.1, 0.0, 0.9),
            GridPoint("b", "item", 10, 0.9, 0.1, 0.0, 0.9),
            GridPoint("c", "item", 10, 0.9, 0.1, 0.0, 0.9),
        ]
        zoom = compute_zoom_bounds(points)
        assert (zoom.x_min, zoom.x_max) == (85.0, 95.0)
        assert (zoom.y_min, zoom.y_max) == (85.0, 95.0)

    def test_spread_with_clamp(self):
        points = [
            GridPoint("a", "item", 10, 0.8, 0.2, 0.0, 0.8),
            GridPoint("b", "item", 10, 1.0, 0.0, 0.0, 1.0),
        ]
        zoom = compute_zoom_bounds(points)
        # mean 90, population sd 10 -> (75, 105) -> clamp to (75, 100)
        assert zoom.x_min == pytest.approx(75.0)
        assert zoom.x_max == 100.0
        assert zoom.y_min == pytest.approx(75.0)
        assert zoom.y_max == 100.0

    def test_three_identical_at_fifty(self):
        points = [GridPoint(f"p{i}", "item", 5, 0.5, 0.5, 0.0, 0.5) for i in range(3)]
        zoom = compute_zoom_bounds(points)
        assert (zoom.x_min, zoom.x_max, zoom.y_min, zoom.y_max) == (45.0, 55.0, 45.0, 55.0)

    def test_low_clamp(self):
        points = [
            GridPoint("a", "item", 10, 0.0, 1.0, 0.0, 0.02),
            GridPoint("b", "item", 10, 0.04, 0.96, 0.0, 0.0),
        ]
        zoom = compute_zoom_bounds(points)
        assert zoom.x_min == 0.0
        assert zoom.y_min == 0.0

    def test_too_few_points(self):
        with pytest.raises(DataError, match="at least 2"):
            compute_zoom_bounds([GridPoint("a", "item", 1, 1.0, 0.0, 0.0, 1.0)])

    def test_invalid_bounds_rejected(self):
        with pytest.raises(DataError, match="min < max"):
            ZoomBounds(10.0, 10.0, 0.0, 100.0)


class TestConvexHull:
    def test_triangle(self):
        pts = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]
        assert sorted(convex_hull(pts)) == sorted(pts)

    def test_interior_points_dropped(self):
        square = [(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]
        hull = convex_hull(square + [(2.0, 2.0), (1.0, 3.0)])
        assert sorted(hull) == sorted(square)

    def test_collinear(self):
        pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]
        assert len(convex_hull(pts)) == 2


class TestCsvRoundTrip:
    def test_roundtrip_exact(self, tmp_path):
        rng = random.Random(5)
        points = []
        for k in range(12):
            pairs = random_pairs(f"it{k}", rng.randint(1, 50), rng)
            points.append(
                score_item(
                    pairs,
                    genre_tag=rng.choice(["Blog posts", "TV satire", None]),
                    text_kind=rng.choice(["spoken", "written"]),
                )
            )
        path = tmp_path / "grid.csv"
        write_grid_csv(points, path)
        loaded = read_grid_csv(path)
        assert loaded == points
        # re-plotting from the CSV yields identical documents
        assert render_grid(loaded) == render_grid(points)

    def test_missing_column_rejected(self, tmp_path):
        path = tmp_path / "grid.csv"
        path.write_text("unit_id,level\na,item\n")
        with pytest.raises(DataError, match="missing column"):
            read_grid_csv(path)


class TestRender:
    def test_single_point_minimal_document(self):
        point = GridPoint("solo", "item", 10, 0.7, 0.2, 0.1, 0.8, text_kind="spoken")
        svg = render_grid([point])
        assert svg.count('class="marker"') == 1
        assert svg.count('class="axis-label"') == 2
        assert "factual sentences (%)" in svg
        assert "formal sentences (%)" in svg

    def test_hull_polygon_for_three_point_genre(self):
        points = [
            GridPoint(f"p{i}", "item", 5, x, 1 - x, 0.0, y, genre_tag="satire")
            for i, (x, y) in enumerate([(0.1, 0.2), (0.5, 0.8), (0.9, 0.3)])
        ]
        svg = render_grid(points, RenderOptions(hulls=True))
        assert svg.count('class="hull"') == 1
        hull_line = [l for l in svg.splitlines() if 'class="hull"' in l][0]
        assert len(hull_line.split('points="')[1].split('"')[0].split()) == 3

    def test_no_hull_for_two_points(self):
        points = [
            GridPoint(f"p{i}", "item", 5, x, 1 - x, 0.0, 0.5, genre_tag="duo")
            for i, x in enumerate([0.2, 0.8])
        ]
        svg = render_grid(points, RenderOptions(hulls=True))
        assert 'class="hull"' not in svg

    def test_size_by_strictly_monotone(self):
        small = GridPoint("sport", "section", 235, 0.8, 0.2, 0.0, 0.8)
        large = GridPoint("binnenland", "section", 511822, 0.9, 0.1, 0.0, 0.9)
        svg = render_grid(
            [small, large], RenderOptions(size_by="n_sentences", shape_by=None)
        )
        radii = [
            float(part.split('"')[1])
            for line in svg.splitlines()
            if 'class="marker"' in line
            for part in [line.split(" r=")[1]]
        ]
        assert len(radii) == 2
        assert radii[1] > radii[0] > 0.0
        # area proportional to count
        assert (radii[1] / radii[0]) ** 2 == pytest.approx(511822 / 235, rel=0.01)

    def test_shapes_follow_text_kind(self):
        points = [
            GridPoint("w", "item", 5, 0.5, 0.5, 0.0, 0.5, text_kind="written"),
            GridPoint("s", "item", 5, 0.6, 0.4, 0.0, 0.6, text_kind="spoken"),
        ]
        svg = render_grid(points)
        assert svg.count("<polygon class=\"marker\"") == 1
        assert svg.count("<circle class=\"marker\"") == 1

    def test_deterministic_output(self):
        rng = random.Random(6)
        points = [score_item(random_pairs(f"i{k}", 20, rng)) for k in range(8)]
        opts = RenderOptions(hulls=True, size_by="n_sentences")
        assert render_grid(points, opts) == render_grid(points, opts)

    def test_zoom_changes_viewport_mapping(self):
        points = [
            GridPoint("a", "item", 5, 0.9, 0.1, 0.0, 0.9),
            GridPoint("b", "item", 5, 0.95, 0.05, 0.0, 0.95),
        ]
        zoomed = render_grid(points, RenderOptions(zoom=compute_zoom_bounds(points)))
        full = render_grid(points)
        assert zoomed != full

    def test_coordinates_stay_in_unit_square(self):
        rng = random.Random(7)
        for k in range(30):
            point = score_item(random_pairs(f"i{k}", rng.randint(1, 60), rng))
            x, y = point.coordinates()
            assert 0.0 <= x <= 1.0
            assert 0.0 <= y <= 1.0
