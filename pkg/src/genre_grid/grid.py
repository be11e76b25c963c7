"""Positioning units on the factuality x formality grid.

A unit (news item, outlet, or section) sits at (fraction of its sentences
labeled "fact", fraction labeled "formal"). Items are represented by at most
their first `cap` sentences in position order; groups pool the capped
sentences of their member items. The renderer emits a deterministic SVG plus
a companion CSV listing every plotted value.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

from .annotation import FACTUALITY_LABELS, FORMALITY_LABELS
from .errors import DataError

LEVELS = ("item", "outlet", "section")
DENOMINATORS = ("all", "fact_opinion")

DEFAULT_CAP = 100

GRID_CSV_COLUMNS = (
    "unit_id",
    "level",
    "n_sentences",
    "frac_fact",
    "frac_opinion",
    "frac_neither",
    "frac_formal",
    "genre_tag",
    "text_kind",
)


@dataclass(frozen=True)
class SentenceLabelPair:
    """A sentence with both axis labels. Lists of pairs are expected in
    per-item position order; the first-`cap` rule relies on it."""

    sentence_id: str
    item_id: str
    factuality: str
    formality: str

    def __post_init__(self):
        if self.factuality not in FACTUALITY_LABELS:
            raise DataError(f"factuality label {self.factuality!r} not in {FACTUALITY_LABELS}")
        if self.formality not in FORMALITY_LABELS:
            raise DataError(f"formality label {self.formality!r} not in {FORMALITY_LABELS}")


@dataclass(frozen=True)
class GridPoint:
    unit_id: str
    level: str
    n_sentences: int
    frac_fact: float
    frac_opinion: float
    frac_neither: float
    frac_formal: float
    genre_tag: str | None = None
    text_kind: str | None = None

    def coordinates(self, denominator: str = "all") -> tuple[float, float]:
        """(x, y) in the unit square; `fact_opinion` drops "neither" sentences
        from the factuality denominator, derived from the stored fractions."""
        if denominator == "all":
            return self.frac_fact, self.frac_formal
        if denominator == "fact_opinion":
            fo = self.frac_fact + self.frac_opinion
            return (self.frac_fact / fo if fo > 0 else 0.0), self.frac_formal
        raise DataError(f"unknown denominator {denominator!r} (expected one of {DENOMINATORS})")


@dataclass(frozen=True)
class ZoomBounds:
    """Per-axis display bounds in percent."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DataError(f"zoom bounds need min < max per axis, got {self}")


def _fractions(pairs: list[SentenceLabelPair]) -> tuple[int, float, float, float, float]:
    n = len(pairs)
    fact = sum(1 for p in pairs if p.factuality == "fact")
    opinion = sum(1 for p in pairs if p.factuality == "opinion")
    neither = n - fact - opinion
    formal = sum(1 for p in pairs if p.formality == "formal")
    return n, fact / n, opinion / n, neither / n, formal / n


def score_item(
    pairs: list[SentenceLabelPair],
    cap: int | None = DEFAULT_CAP,
    genre_tag: str | None = None,
    text_kind: str | None = None,
) -> GridPoint:
    """Grid point for one item from its labeled sentences in position order.
    Only the first `cap` sentences count (cap=None or 0 disables the cap)."""
    if not pairs:
        raise DataError("score_item needs at least one labeled sentence")
    item_ids = {p.item_id for p in pairs}
    if len(item_ids) > 1:
        raise DataError(f"score_item got sentences from several items: {sorted(item_ids)}")
    used = pairs[:cap] if cap else pairs
    n, f_fact, f_op, f_nei, f_formal = _fractions(used)
    return GridPoint(
        unit_id=pairs[0].item_id,
        level="item",
        n_sentences=n,
        frac_fact=f_fact,
        frac_opinion=f_op,
        frac_neither=f_nei,
        frac_formal=f_formal,
        genre_tag=genre_tag,
        text_kind=text_kind,
    )


def score_items(
    pairs: list[SentenceLabelPair],
    cap: int | None = DEFAULT_CAP,
    display: dict | None = None,
) -> list[GridPoint]:
    """One GridPoint per item, in first-appearance order. Items with zero
    labeled sentences never show up in `pairs`; their exclusion (with reasons)
    is reported by the prediction-merging step upstream."""
    by_item: dict[str, list[SentenceLabelPair]] = {}
    for p in pairs:
        by_item.setdefault(p.item_id, []).append(p)
    display = display or {}
    points = []
    for item_id, item_pairs in by_item.items():
        tag, kind = display.get(item_id, (None, None))
        points.append(score_item(item_pairs, cap=cap, genre_tag=tag, text_kind=kind))
    return points


def aggregate_units(
    pairs: list[SentenceLabelPair],
    grouping: dict,
    level: str,
    cap: int | None = None,
    display: dict | None = None,
    pooled: bool = True,
) -> list[GridPoint]:
    """Aggregate sentences to outlet- or section-level grid points.

    `grouping` maps every item_id to exactly one group id; an unmapped item is
    an error. Coordinates pool the (per-item capped) sentences of the group's
    items; pass pooled=False for the unweighted mean of item points instead.
    Groups are emitted in sorted id order.
    """
    if level not in LEVELS:
        raise DataError(f"unknown level {level!r} (expected one of {LEVELS})")
    by_item: dict[str, list[SentenceLabelPair]] = {}
    for p in pairs:
        by_item.setdefault(p.item_id, []).append(p)
    unmapped = sorted(i for i in by_item if i not in grouping)
    if unmapped:
        raise DataError(f"item(s) not mapped to any {level}: {', '.join(unmapped)}")
    groups: dict[str, list[list[SentenceLabelPair]]] = {}
    for item_id, item_pairs in by_item.items():
        used = item_pairs[:cap] if cap else item_pairs
        groups.setdefault(str(grouping[item_id]), []).append(used)

    display = display or {}
    points = []
    for group_id in sorted(groups):
        member_lists = groups[group_id]
        tag, kind = display.get(group_id, (None, None))
        if pooled:
            flat = [p for lst in member_lists for p in lst]
            n, f_fact, f_op, f_nei, f_formal = _fractions(flat)
        else:
            stats = [_fractions(lst) for lst in member_lists]
            k = len(stats)
            n = sum(s[0] for s in stats)
            f_fact = sum(s[1] for s in stats) / k
            f_op = sum(s[2] for s in stats) / k
            f_nei = sum(s[3] for s in stats) / k
            f_formal = sum(s[4] for s in stats) / k
        points.append(
            GridPoint(
                unit_id=group_id,
                level=level,
                n_sentences=n,
                frac_fact=f_fact,
                frac_opinion=f_op,
                frac_neither=f_nei,
                frac_formal=f_formal,
                genre_tag=tag,
                text_kind=kind,
            )
        )
    return points


def compute_zoom_bounds(points: list[GridPoint], denominator: str = "all") -> ZoomBounds:
    """Zoomed display window: per axis (in percent), mean +- one population
    standard deviation +- 5, clamped to [0, 100]."""
    if len(points) < 2:
        raise DataError(f"zoom bounds need at least 2 points, got {len(points)}")
    xs = [p.coordinates(denominator)[0] * 100.0 for p in points]
    ys = [p.coordinates(denominator)[1] * 100.0 for p in points]

    def bounds(values: list[float]) -> tuple[float, float]:
        mean = sum(values) / len(values)
        sd = (sum((v - mean) ** 2 for v in values) / len(values)) ** 0.5
        return max(0.0, mean - sd - 5.0), min(100.0, mean + sd + 5.0)

    x_min, x_max = bounds(xs)
    y_min, y_max = bounds(ys)
    return ZoomBounds(x_min=x_min, x_max=x_max, y_min=y_min, y_max=y_max)


def convex_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Andrew's monotone chain; returns hull vertices in counter-clockwise
    order (collinear points dropped)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


# ---------------------------------------------------------------------------
# CSV companion


def grid_to_csv(points: list[GridPoint]) -> str:
    """Full-precision CSV of every plotted value; re-reading it reproduces the
    coordinates exactly."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(GRID_CSV_COLUMNS)
    for p in points:
        writer.writerow(
            [
                p.unit_id,
                p.level,
                p.n_sentences,
                repr(p.frac_fact),
                repr(p.frac_opinion),
                repr(p.frac_neither),
                repr(p.frac_formal),
                p.genre_tag or "",
                p.text_kind or "",
            ]
        )
    return buf.getvalue()


def write_grid_csv(points: list[GridPoint], path: str | Path) -> None:
    Path(path).write_text(grid_to_csv(points), encoding="utf-8")


def read_grid_csv(path: str | Path) -> list[GridPoint]:
    path = Path(path)
    points = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in GRID_CSV_COLUMNS if c not in header]
        if missing:
            raise DataError(f"{path}: missing column(s): {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                points.append(
                    GridPoint(
                        unit_id=row["unit_id"],
                        level=row["level"],
                        n_sentences=int(row["n_sentences"]),
                        frac_fact=float(row["frac_fact"]),
                        frac_opinion=float(row["frac_opinion"]),
                        frac_neither=float(row["frac_neither"]),
                        frac_formal=float(row["frac_formal"]),
                        genre_tag=row["genre_tag"] or None,
                        text_kind=row["text_kind"] or None,
                    )
                )
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    return points


# ---------------------------------------------------------------------------
# SVG rendering


PALETTE = (
    "#4c72b0",
    "#dd8452",
    "#55a868",
    "#c44e52",
    "#8172b3",
    "#937860",
    "#da8bc3",
    "#8c8c8c",
    "#ccb974",
    "#64b5cd",
)
NEUTRAL_COLOR = "#555555"


@dataclass
class RenderOptions:
    color_by: str | None = "genre_tag"
    shape_by: str | None = "text_kind"
    size_by: str | None = None  # "n_sentences" or None
    hulls: bool = False
    zoom: ZoomBounds | None = None
    denominator: str = "all"
    width: int = 720
    height: int = 720
    max_radius: float = 24.0
    base_radius: float = 5.0
    title: str | None = None


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def render_grid(points: list[GridPoint], options: RenderOptions | None = None) -> str:
    """Deterministic SVG scatter of the grid points.

    x = factual share, y = formal share (percent axes). Spoken-text units draw
    as circles, written-text as triangles; genre tags pick colors from a fixed
    palette in sorted order; optional convex hulls shade each genre group.
    """
    if not points:
        raise DataError("render_grid needs at least one point")
    opts = options or RenderOptions()
    if opts.denominator not in DENOMINATORS:
        raise DataError(f"unknown denominator {opts.denominator!r}")

    margin_left, margin_right, margin_top, margin_bottom = 64.0, 24.0, 40.0, 56.0
    plot_w = opts.width - margin_left - margin_right
    plot_h = opts.height - margin_top - margin_bottom
    if opts.zoom is not None:
        x_lo, x_hi = opts.zoom.x_min, opts.zoom.x_max
        y_lo, y_hi = opts.zoom.y_min, opts.zoom.y_max
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 100.0, 0.0, 100.0

    def sx(pct: float) -> float:
        return margin_left + (pct - x_lo) / (x_hi - x_lo) * plot_w

    def sy(pct: float) -> float:
        return margin_top + (y_hi - pct) / (y_hi - y_lo) * plot_h

    color_groups = sorted(
        {p.genre_tag for p in points if p.genre_tag} if opts.color_by == "genre_tag" else set()
    )
    color_of = {g: PALETTE[i % len(PALETTE)] for i, g in enumerate(color_groups)}

    def point_color(p: GridPoint) -> str:
        if opts.color_by == "genre_tag" and p.genre_tag in color_of:
            return color_of[p.genre_tag]
        return NEUTRAL_COLOR

    max_n = max(p.n_sentences for p in points)

    def radius(p: GridPoint) -> float:
        if opts.size_by != "n_sentences" or max_n == 0:
            return opts.base_radius
        # dot area proportional to the sentence count
        return opts.max_radius * (p.n_sentences / max_n) ** 0.5

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{opts.width}" height="{opts.height}" '
        f'viewBox="0 0 {opts.width} {opts.height}">'
    )
    out.append('<rect width="100%" height="100%" fill="white"/>')
    if opts.title:
        out.append(
            f'<text x="{_fmt(opts.width / 2)}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{_xml(opts.title)}</text>'
        )

    # axes frame and ticks
    out.append(
        f'<rect x="{_fmt(margin_left)}" y="{_fmt(margin_top)}" width="{_fmt(plot_w)}" '
        f'height="{_fmt(plot_h)}" fill="none" stroke="#222" stroke-width="1"/>'
    )
    n_ticks = 5
    for k in range(n_ticks + 1):
        xv = x_lo + (x_hi - x_lo) * k / n_ticks
        yv = y_lo + (y_hi - y_lo) * k / n_ticks
        x = sx(xv)
        y = sy(yv)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(margin_top + plot_h)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(margin_top + plot_h + 5)}" stroke="#222" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{_fmt(margin_top + plot_h + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(xv)}</text>'
        )
        out.append(
            f'<line x1="{_fmt(margin_left - 5)}" y1="{_fmt(y)}" x2="{_fmt(margin_left)}" '
            f'y2="{_fmt(y)}" stroke="#222" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(margin_left - 8)}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(yv)}</text>'
        )
    out.append(
        f'<text class="axis-label" x="{_fmt(margin_left + plot_w / 2)}" '
        f'y="{_fmt(opts.height - 14)}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">factual sentences (%)</text>'
    )
    out.append(
        f'<text class="axis-label" x="18" y="{_fmt(margin_top + plot_h / 2)}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_fmt(margin_top + plot_h / 2)})">formal sentences (%)</text>'
    )

    coords = {id(p): p.coordinates(opts.denominator) for p in points}

    if opts.hulls and color_groups:
        for g in color_groups:
            members = [
                (sx(coords[id(p)][0] * 100.0), sy(coords[id(p)][1] * 100.0))
                for p in points
                if p.genre_tag == g
            ]
            hull = convex_hull(members)
            if len(hull) >= 3:
                path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in hull)
                out.append(
                    f'<polygon class="hull" points="{path}" fill="{color_of[g]}" '
                    f'fill-opacity="0.15" stroke="none"/>'
                )

    for p in points:
        x_pct, y_pct = coords[id(p)]
        x, y = sx(x_pct * 100.0), sy(y_pct * 100.0)
        r = radius(p)
        color = point_color(p)
        tooltip = f"<title>{_xml(p.unit_id)} (n={p.n_sentences})</title>"
        if opts.shape_by == "text_kind" and p.text_kind == "written":
            # upward triangle with the same area as the circle of radius r
            side = r * (4.0 * math.pi / math.sqrt(3.0)) ** 0.5
            h = side * math.sqrt(3.0) / 2.0
            pts = (
                f"{_fmt(x)},{_fmt(y - 2.0 * h / 3.0)} "
                f"{_fmt(x - side / 2.0)},{_fmt(y + h / 3.0)} "
                f"{_fmt(x + side / 2.0)},{_fmt(y + h / 3.0)}"
            )
            out.append(
                f'<polygon class="marker" points="{pts}" fill="{color}" fill-opacity="0.8" '
                f'stroke="#222" stroke-width="0.5">{tooltip}</polygon>'
            )
        else:
            out.append(
                f'<circle class="marker" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" '
                f'fill="{color}" fill-opacity="0.8" stroke="#222" stroke-width="0.5">'
                f"{tooltip}</circle>"
            )

    if color_groups:
        ly = margin_top + 6.0
        for g in color_groups:
            out.append(
                f'<rect class="legend" x="{_fmt(margin_left + 8)}" y="{_fmt(ly)}" width="10" '
                f'height="10" fill="{color_of[g]}" fill-opacity="0.8"/>'
            )
            out.append(
                f'<text x="{_fmt(margin_left + 22)}" y="{_fmt(ly + 9)}" '
                f'font-family="sans-serif" font-size="11">{_xml(g)}</text>'
            )
            ly += 15.0

    out.append("</svg>")
    return "\n".join(out) + "\n"


def _xml(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )
