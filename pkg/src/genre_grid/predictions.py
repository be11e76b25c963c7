"""Versioned JSONL contract for per-sentence predictions.

Any label source (the built-in classical models, an external transformer, a
human export) speaks this format, so the grid pipeline never cares where
labels came from. Files start with a schema header line followed by one
record per line; merging resolves multi-source conflicts by an explicit
model-id precedence order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .annotation import TASKS, label_set_for_task
from .corpus import SentenceRecord
from .errors import DataError
from .grid import SentenceLabelPair

SCHEMA = "genre-grid/predictions/v1"
PROB_SUM_TOL = 1e-6


@dataclass(frozen=True)
class PredictionRecord:
    sentence_id: str
    task: str
    label: str
    model_id: str
    scores: dict | None = None
    probabilistic: bool = True

    def __post_init__(self):
        if self.task not in TASKS:
            raise DataError(f"unknown task {self.task!r} (expected one of {TASKS})")
        domain = label_set_for_task(self.task)
        if self.label not in domain:
            raise DataError(
                f"label {self.label!r} outside the {self.task} domain {domain}"
            )
        if not self.model_id:
            raise DataError("model_id must be non-empty")
        if self.scores is not None:
            unknown = sorted(set(self.scores) - set(domain))
            if unknown:
                raise DataError(
                    f"score keys {unknown} outside the {self.task} domain {domain}"
                )
            if self.label not in self.scores:
                raise DataError(f"scores lack an entry for the label {self.label!r}")
            top = max(self.scores.values())
            if self.scores[self.label] != top:
                raise DataError(
                    f"label {self.label!r} is not the argmax of its scores "
                    f"({self.scores})"
                )
            if self.probabilistic:
                total = sum(self.scores.values())
                if abs(total - 1.0) > PROB_SUM_TOL:
                    raise DataError(
                        f"probabilistic scores must sum to 1 +- {PROB_SUM_TOL}, "
                        f"got {total}"
                    )

    def to_dict(self) -> dict:
        doc: dict = {
            "sentence_id": self.sentence_id,
            "task": self.task,
            "label": self.label,
            "model_id": self.model_id,
        }
        if self.scores is not None:
            doc["scores"] = dict(self.scores)
            doc["probabilistic"] = self.probabilistic
        return doc


def write_predictions(records: list[PredictionRecord], path: str | Path) -> None:
    """Schema header line first, then one JSON record per line (sorted keys,
    so load + rewrite is byte-identical)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"schema": SCHEMA}, sort_keys=True) + "\n")
        for r in records:
            fh.write(json.dumps(r.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")


def load_predictions(path: str | Path, task: str | None = None) -> list[PredictionRecord]:
    """Load and validate a prediction file.

    The first line must carry the schema header. When `task` is given, every
    record must belong to that task. Duplicate (sentence_id, task, model_id)
    triples are an error.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"predictions file not found: {path}")
    records: list[PredictionRecord] = []
    seen: dict[tuple, int] = {}
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line) if header_line.strip() else {}
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:1: malformed schema header: {exc}") from exc
        if not isinstance(header, dict) or header.get("schema") != SCHEMA:
            raise DataError(
                f"{path}:1: missing or wrong schema header (expected "
                f'{{"schema": "{SCHEMA}"}})'
            )
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            try:
                record = PredictionRecord(
                    sentence_id=str(raw["sentence_id"]),
                    task=str(raw["task"]),
                    label=str(raw["label"]),
                    model_id=str(raw["model_id"]),
                    scores={str(k): float(v) for k, v in raw["scores"].items()}
                    if raw.get("scores") is not None
                    else None,
                    probabilistic=bool(raw.get("probabilistic", True)),
                )
            except KeyError as exc:
                raise DataError(f"{path}:{lineno}: missing field {exc}") from exc
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if task is not None and record.task != task:
                raise DataError(
                    f"{path}:{lineno}: record task {record.task!r} does not match "
                    f"requested task {task!r}"
                )
            key = (record.sentence_id, record.task, record.model_id)
            if key in seen:
                raise DataError(
                    f"{path}:{lineno}: duplicate prediction for {key} "
                    f"(first seen at line {seen[key]})"
                )
            seen[key] = lineno
            records.append(record)
    return records


@dataclass(frozen=True)
class CoverageReport:
    n_sentences: int
    covered: int
    missing_factuality: tuple[str, ...]
    missing_formality: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "n_sentences": self.n_sentences,
            "covered": self.covered,
            "missing_factuality": list(self.missing_factuality),
            "missing_formality": list(self.missing_formality),
        }


@dataclass
class MergeResult:
    pairs: list  # SentenceLabelPair, in sentence-table order
    coverage: CoverageReport


def merge_sources(
    predictions: list[PredictionRecord],
    precedence: list[str],
    sentences: list[SentenceRecord],
) -> MergeResult:
    """Resolve one label per (sentence, task) by model-id precedence and join
    both tasks into SentenceLabelPairs ordered like the sentence table.

    Sentences lacking a label for either task go to the coverage report and
    are excluded from the grid. Every model_id in `predictions` must appear in
    `precedence`; two sources may not share a model_id for the same sentence
    and task (there would be no order between them).
    """
    rank = {m: i for i, m in enumerate(precedence)}
    if len(rank) != len(precedence):
        raise DataError("precedence list contains duplicate model ids")
    chosen: dict[tuple, PredictionRecord] = {}
    for record in predictions:
        if record.model_id not in rank:
            raise DataError(
                f"model_id {record.model_id!r} is not in the precedence list {precedence}"
            )
        key = (record.sentence_id, record.task)
        current = chosen.get(key)
        if current is None:
            chosen[key] = record
        elif current.model_id == record.model_id:
            raise DataError(
                f"two predictions from {record.model_id!r} for sentence "
                f"{record.sentence_id!r}, task {record.task}"
            )
        elif rank[record.model_id] < rank[current.model_id]:
            chosen[key] = record

    pairs = []
    missing_fact = []
    missing_form = []
    ordered = sorted(sentences, key=lambda s: (s.item_id, s.position))
    for s in ordered:
        fact = chosen.get((s.sentence_id, "factuality"))
        form = chosen.get((s.sentence_id, "formality"))
        if fact is None:
            missing_fact.append(s.sentence_id)
        if form is None:
            missing_form.append(s.sentence_id)
        if fact is not None and form is not None:
            pairs.append(
                SentenceLabelPair(
                    sentence_id=s.sentence_id,
                    item_id=s.item_id,
                    factuality=fact.label,
                    formality=form.label,
                )
            )
    coverage = CoverageReport(
        n_sentences=len(ordered),
        covered=len(pairs),
        missing_factuality=tuple(missing_fact),
        missing_formality=tuple(missing_form),
    )
    return MergeResult(pairs=pairs, coverage=coverage)
