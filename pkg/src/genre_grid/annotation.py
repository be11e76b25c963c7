"""Annotation consolidation and inter-coder reliability.

Gold labels come from majority voting over per-sentence annotator votes;
tied votes discard the sentence. Formality votes on the 1-5 scale are merged
to binary before voting (1,2 -> informal; 4,5 -> formal; 3 dropped).
Reliability is Krippendorff's alpha computed from the coincidence matrix
over pairable values, with nominal, ordinal and interval distance metrics.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError, DegenerateDataError

TASKS = ("factuality", "formality")
FACTUALITY_LABELS = ("fact", "opinion", "neither")
FORMALITY_LABELS = ("informal", "formal")
ALPHA_METRICS = ("nominal", "ordinal", "interval")

DISCARDED = "discarded"


@dataclass(frozen=True)
class AnnotationRecord:
    sentence_id: str
    annotator_id: str
    task: str
    raw_label: str | int

    def __post_init__(self):
        if self.task not in TASKS:
            raise DataError(f"unknown task {self.task!r} (expected one of {TASKS})")
        if self.task == "factuality":
            if self.raw_label not in FACTUALITY_LABELS:
                raise DataError(
                    f"factuality label must be one of {FACTUALITY_LABELS}, "
                    f"got {self.raw_label!r}"
                )
        else:
            if not (isinstance(self.raw_label, int) and 1 <= self.raw_label <= 5):
                raise DataError(
                    f"formality label must be an integer 1..5, got {self.raw_label!r}"
                )


@dataclass(frozen=True)
class GoldLabel:
    sentence_id: str
    task: str
    label: str
    vote_margin: int


@dataclass(frozen=True)
class DiscardReport:
    tied: int
    all_neutral: int
    too_few_votes: int
    kept: int

    def to_dict(self) -> dict:
        return {
            "tied": self.tied,
            "all_neutral": self.all_neutral,
            "too_few_votes": self.too_few_votes,
            "kept": self.kept,
        }


@dataclass(frozen=True)
class ReliabilityReport:
    task: str
    alpha: float
    metric: str
    n_units: int
    n_raters: int
    n_pairable_values: int

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "alpha": self.alpha,
            "metric": self.metric,
            "n_units": self.n_units,
            "n_raters": self.n_raters,
            "n_pairable_values": self.n_pairable_values,
        }


def merge_likert(raw: int) -> str:
    """Collapse a 1-5 formality rating to binary; the neutral midpoint is
    discarded."""
    if not (isinstance(raw, int) and 1 <= raw <= 5):
        raise DataError(f"Likert value must be an integer 1..5, got {raw!r}")
    if raw <= 2:
        return "informal"
    if raw >= 4:
        return "formal"
    return DISCARDED


def majority_vote(votes: list) -> tuple[object, int]:
    """Return (winner, margin) where margin = top count - runner-up count.

    Any tie for first place returns (None, 0): the sentence is discarded.
    """
    if not votes:
        raise DataError("majority_vote needs at least one vote")
    counts = Counter(votes).most_common()
    top_label, top_count = counts[0]
    runner_up = counts[1][1] if len(counts) > 1 else 0
    if top_count == runner_up:
        return None, 0
    return top_label, top_count - runner_up


def consolidate(
    records: list[AnnotationRecord], task: str
) -> tuple[list[GoldLabel], DiscardReport]:
    """Majority-vote gold labels for one task, plus a discard report.

    For formality, each vote is Likert-merged before voting and merged-away
    (neutral) votes are removed. A gold label needs at least two usable votes
    and a strict plurality winner.
    """
    if task not in TASKS:
        raise DataError(f"unknown task {task!r}")
    by_sentence: dict[str, list[AnnotationRecord]] = {}
    for r in records:
        if r.task != task:
            raise DataError(
                f"record for sentence {r.sentence_id!r} has task {r.task!r}, "
                f"expected {task!r}"
            )
        by_sentence.setdefault(r.sentence_id, []).append(r)

    gold: list[GoldLabel] = []
    tied = all_neutral = too_few = 0
    for sid in sorted(by_sentence):
        votes = [r.raw_label for r in by_sentence[sid]]
        if task == "formality":
            merged = [merge_likert(v) for v in votes]
            usable = [m for m in merged if m != DISCARDED]
            if not usable:
                all_neutral += 1
                continue
        else:
            usable = list(votes)
        if len(usable) < 2:
            too_few += 1
            continue
        winner, margin = majority_vote(usable)
        if winner is None:
            tied += 1
            continue
        gold.append(GoldLabel(sentence_id=sid, task=task, label=str(winner), vote_margin=margin))
    report = DiscardReport(
        tied=tied, all_neutral=all_neutral, too_few_votes=too_few, kept=len(gold)
    )
    return gold, report


def _distance_fn(metric: str, marginals: dict):
    if metric == "nominal":
        return lambda c, k: 0.0 if c == k else 1.0
    if metric == "interval":
        return lambda c, k: float(c - k) ** 2
    if metric == "ordinal":
        # delta(c,k) = (sum of the value frequencies from c to k, with the
        # endpoints counted half)^2, frequencies taken over pairable values.
        ordered = sorted(marginals)

        def ordinal(c, k):
            lo, hi = min(c, k), max(c, k)
            total = sum(marginals[g] for g in ordered if lo <= g <= hi)
            return (total - (marginals[c] + marginals[k]) / 2.0) ** 2

        return ordinal
    raise DataError(f"unknown alpha metric {metric!r} (expected one of {ALPHA_METRICS})")


def alpha_from_units(units: dict, metric: str) -> tuple[float, int, int]:
    """Krippendorff's alpha from {unit: [values...]} via the coincidence matrix.

    Units with fewer than two values are excluded. Returns (alpha, n_units,
    n_pairable_values). Raises DegenerateDataError when expected disagreement
    is zero (all pairable values identical).
    """
    pairable = {u: vals for u, vals in units.items() if len(vals) >= 2}
    if len(pairable) < 2:
        raise DataError(
            "alpha needs at least two units with two or more ratings each; "
            f"got {len(pairable)}"
        )
    if metric in ("interval", "ordinal"):
        for vals in pairable.values():
            for v in vals:
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise DataError(
                        f"{metric} alpha needs numeric values, got {v!r}"
                    )

    coincidence: dict = {}
    marginals: dict = {}
    n = 0
    for vals in pairable.values():
        m_u = len(vals)
        n += m_u
        weight = 1.0 / (m_u - 1)
        for i, c in enumerate(vals):
            marginals[c] = marginals.get(c, 0) + 1
            for j, k in enumerate(vals):
                if i == j:
                    continue
                coincidence[(c, k)] = coincidence.get((c, k), 0.0) + weight

    delta = _distance_fn(metric, marginals)
    observed = sum(w * delta(c, k) for (c, k), w in coincidence.items()) / n
    expected = sum(
        nc * nk * delta(c, k) for c, nc in marginals.items() for k, nk in marginals.items()
    ) / (n * (n - 1))
    if expected == 0.0:
        raise DegenerateDataError(
            "expected disagreement is zero (every pairable value is identical); "
            "alpha is undefined for constant data"
        )
    if observed == 0.0:
        return 1.0, len(pairable), n
    return 1.0 - observed / expected, len(pairable), n


def krippendorff_alpha(
    records: list[AnnotationRecord],
    task: str,
    metric: str = "nominal",
    raw_scale: bool = False,
) -> ReliabilityReport:
    """Reliability of the annotations for one task.

    Factuality uses the three nominal categories. Formality defaults to
    nominal alpha over the merged binary labels (neutral votes become missing
    values); pass raw_scale=True to score the raw 1-5 ratings instead, which
    also permits the ordinal and interval metrics.
    """
    if task not in TASKS:
        raise DataError(f"unknown task {task!r}")
    if metric not in ALPHA_METRICS:
        raise DataError(f"unknown alpha metric {metric!r} (expected one of {ALPHA_METRICS})")
    units: dict[str, list] = {}
    raters: set[str] = set()
    for r in records:
        if r.task != task:
            continue
        raters.add(r.annotator_id)
        value: object = r.raw_label
        if task == "formality" and not raw_scale:
            value = merge_likert(int(r.raw_label))
            if value == DISCARDED:
                continue
        units.setdefault(r.sentence_id, []).append(value)
    alpha, n_units, n_pairable = alpha_from_units(units, metric)
    return ReliabilityReport(
        task=task,
        alpha=alpha,
        metric=metric,
        n_units=n_units,
        n_raters=len(raters),
        n_pairable_values=n_pairable,
    )


def load_annotations(path: str | Path, task: str | None = None) -> list[AnnotationRecord]:
    """Read annotation records from JSONL or CSV (by suffix). Enforces the
    (sentence_id, annotator_id, task) uniqueness invariant."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"annotations file not found: {path}")
    rows: list[tuple[int, dict]] = []
    if path.suffix.lower() == ".csv":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in ("sentence_id", "annotator_id", "task", "raw_label") if c not in header]
            if missing:
                raise DataError(f"{path}: missing column(s): {', '.join(missing)}")
            rows = [(lineno, row) for lineno, row in enumerate(reader, start=2)]
    else:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rows.append((lineno, json.loads(line)))
                except json.JSONDecodeError as exc:
                    raise DataError(f"{path}:{lineno}: malformed JSON: {exc}") from exc

    records: list[AnnotationRecord] = []
    seen: dict[tuple, int] = {}
    for lineno, raw in rows:
        try:
            rec_task = str(raw["task"])
            label: str | int = raw["raw_label"]
            if rec_task == "formality":
                label = int(label)
            else:
                label = str(label)
            record = AnnotationRecord(
                sentence_id=str(raw["sentence_id"]),
                annotator_id=str(raw["annotator_id"]),
                task=rec_task,
                raw_label=label,
            )
        except KeyError as exc:
            raise DataError(f"{path}:{lineno}: missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
        if task is not None and record.task != task:
            continue
        key = (record.sentence_id, record.annotator_id, record.task)
        if key in seen:
            raise DataError(
                f"{path}:{lineno}: duplicate annotation for {key} "
                f"(first seen at line {seen[key]})"
            )
        seen[key] = lineno
        records.append(record)
    return records


def write_gold(gold: list[GoldLabel], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for g in gold:
            fh.write(
                json.dumps(
                    {
                        "sentence_id": g.sentence_id,
                        "task": g.task,
                        "label": g.label,
                        "vote_margin": g.vote_margin,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )


def read_gold(path: str | Path, task: str | None = None) -> list[GoldLabel]:
    path = Path(path)
    gold = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            try:
                record = GoldLabel(
                    sentence_id=str(raw["sentence_id"]),
                    task=str(raw["task"]),
                    label=str(raw["label"]),
                    vote_margin=int(raw["vote_margin"]),
                )
            except KeyError as exc:
                raise DataError(f"{path}:{lineno}: missing field {exc}") from exc
            if task is None or record.task == task:
                gold.append(record)
    return gold


def label_set_for_task(task: str) -> tuple[str, ...]:
    if task == "factuality":
        return FACTUALITY_LABELS
    if task == "formality":
        return FORMALITY_LABELS
    raise DataError(f"unknown task {task!r}")
