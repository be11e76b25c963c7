"""Corpus ingestion: load raw news items, segment into sentences, filter.

The sentence filters follow the preprocessing used for the underlying
annotated corpus: keep sentences of regular length (5-50 whitespace tokens,
inclusive) and remove sentences containing outlet-identifying terms so that
downstream models cannot learn the source from giveaway words.
"""

from __future__ import annotations

import csv
import datetime
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError

TEXT_KINDS = ("spoken", "written")
REQUIRED_ITEM_FIELDS = ("item_id", "outlet", "text_kind", "body")

DEFAULT_MIN_WORDS = 5
DEFAULT_MAX_WORDS = 50

TERMINATORS = ".!?"
# Straight and typographic opening quotes, including the low-9 quote used in Dutch.
OPENING_QUOTES = "\"'‘“„«‹"

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class NewsItem:
    """One raw news item (article, transcript, subtitle file, ...)."""

    item_id: str
    outlet: str
    text_kind: str
    body: str
    genre_tag: str | None = None
    date: str | None = None
    section: str | None = None

    def __post_init__(self):
        if not self.item_id:
            raise DataError("item_id must be non-empty")
        if self.text_kind not in TEXT_KINDS:
            raise DataError(
                f"text_kind must be one of {TEXT_KINDS}, got {self.text_kind!r}"
            )
        if not self.body:
            raise DataError(f"item {self.item_id!r}: body must be non-empty")
        if self.date is not None:
            try:
                datetime.date.fromisoformat(self.date)
            except ValueError as exc:
                raise DataError(
                    f"item {self.item_id!r}: date {self.date!r} is not ISO-8601"
                ) from exc


@dataclass(frozen=True)
class SentenceRecord:
    """One sentence with provenance. `position` is the 0-based index assigned
    at segmentation time, so it stays stable (with gaps) after filtering."""

    sentence_id: str
    item_id: str
    position: int
    text: str
    word_count: int


@dataclass(frozen=True)
class FilterDecision:
    keep: bool
    reason: str  # too_short | too_long | source_leak | kept


@dataclass
class FilterConfig:
    """Sentence-filter settings, loadable from a JSON or TOML file."""

    abbreviations: list[str] = field(default_factory=list)
    leak_terms: dict[str, list[str]] = field(default_factory=dict)
    min_words: int = DEFAULT_MIN_WORDS
    max_words: int = DEFAULT_MAX_WORDS

    def terms_for_outlet(self, outlet: str) -> list[str]:
        """Leak terms configured for `outlet`, plus any under the '*' key."""
        return list(self.leak_terms.get(outlet, [])) + list(self.leak_terms.get("*", []))


def load_filter_config(path: str | Path) -> FilterConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".toml":
        try:
            import tomllib  # Python >= 3.11
        except ImportError:  # pragma: no cover - depends on interpreter
            try:
                import tomli as tomllib  # type: ignore[no-redef]
            except ImportError as exc:
                raise DataError(
                    f"{path}: TOML config requires Python >= 3.11 or the tomli package; "
                    "use a JSON config instead"
                ) from exc
        raw = tomllib.loads(text)
    else:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: malformed config: {exc}") from exc
    if not isinstance(raw, dict):
        raise DataError(f"{path}: config must be a key-value mapping")
    known = {"abbreviations", "leak_terms", "min_words", "max_words"}
    unknown = set(raw) - known
    if unknown:
        raise DataError(f"{path}: unknown config keys: {sorted(unknown)}")
    cfg = FilterConfig(
        abbreviations=list(raw.get("abbreviations", [])),
        leak_terms={k: list(v) for k, v in raw.get("leak_terms", {}).items()},
        min_words=int(raw.get("min_words", DEFAULT_MIN_WORDS)),
        max_words=int(raw.get("max_words", DEFAULT_MAX_WORDS)),
    )
    if not 1 <= cfg.min_words <= cfg.max_words:
        raise DataError(f"{path}: need 1 <= min_words <= max_words")
    return cfg


def _item_from_mapping(raw: dict, where: str) -> NewsItem:
    missing = [k for k in REQUIRED_ITEM_FIELDS if not raw.get(k)]
    if missing:
        raise DataError(f"{where}: missing or empty field(s): {', '.join(missing)}")
    try:
        return NewsItem(
            item_id=str(raw["item_id"]),
            outlet=str(raw["outlet"]),
            text_kind=str(raw["text_kind"]),
            body=str(raw["body"]),
            genre_tag=str(raw["genre_tag"]) if raw.get("genre_tag") else None,
            date=str(raw["date"]) if raw.get("date") else None,
            section=str(raw["section"]) if raw.get("section") else None,
        )
    except DataError as exc:
        raise DataError(f"{where}: {exc}") from exc


def load_corpus(path: str | Path, format: str | None = None) -> list[NewsItem]:
    """Load news items from a JSONL (canonical) or CSV file.

    The format is inferred from the file suffix unless given explicitly.
    Malformed records raise DataError naming the offending line; duplicate
    item_ids raise DataError naming both occurrences.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise DataError(f"unsupported corpus format {format!r} (expected jsonl or csv)")

    items: list[NewsItem] = []
    seen: dict[str, int] = {}

    def add(raw: dict, lineno: int):
        item = _item_from_mapping(raw, f"{path}:{lineno}")
        if item.item_id in seen:
            raise DataError(
                f"duplicate item_id {item.item_id!r} at {path}:{lineno} "
                f"(first seen at line {seen[item.item_id]})"
            )
        seen[item.item_id] = lineno
        items.append(item)

    if format == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
                if not isinstance(raw, dict):
                    raise DataError(f"{path}:{lineno}: record must be a JSON object")
                add(raw, lineno)
    else:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in REQUIRED_ITEM_FIELDS if c not in header]
            if missing:
                raise DataError(f"{path}: missing column(s): {', '.join(missing)}")
            for lineno, row in enumerate(reader, start=2):
                add({k: v for k, v in row.items() if v not in (None, "")}, lineno)
    return items


def segment_text(text: str, abbreviations: list[str]) -> list[str]:
    """Split `text` into sentences.

    A run of '.', '!' or '?' ends a sentence when it is followed by
    whitespace and then an uppercase letter or an opening quote, unless the
    whitespace-delimited token ending in the terminator is a known
    abbreviation (matched case-insensitively).
    """
    abbrevs = {a.casefold() for a in abbreviations}
    pieces: list[str] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        if text[i] not in TERMINATORS:
            i += 1
            continue
        j = i
        while j + 1 < n and text[j + 1] in TERMINATORS:
            j += 1
        token_start = i
        while token_start > 0 and not text[token_start - 1].isspace():
            token_start -= 1
        token = text[token_start : j + 1]
        m = j + 1
        saw_space = False
        while m < n and text[m].isspace():
            saw_space = True
            m += 1
        boundary = (
            saw_space
            and m < n
            and (text[m].isupper() or text[m] in OPENING_QUOTES)
            and token.casefold() not in abbrevs
        )
        if boundary:
            pieces.append(text[start : j + 1])
            start = m
            i = m
        else:
            i = j + 1
    tail = text[start:]
    if tail.strip():
        pieces.append(tail)
    return [p.strip() for p in pieces if p.strip()]


def segment_item(item: NewsItem, abbreviations: list[str]) -> list[SentenceRecord]:
    """Segment an item's body into unfiltered SentenceRecords (positions 0..n-1)."""
    records = []
    for pos, sent in enumerate(segment_text(item.body, abbreviations)):
        records.append(
            SentenceRecord(
                sentence_id=f"{item.item_id}:{pos:05d}",
                item_id=item.item_id,
                position=pos,
                text=sent,
                word_count=len(sent.split()),
            )
        )
    return records


def _contains_leak(text: str, terms: list[str]) -> bool:
    tokens = [t.casefold() for t in _WORD_RE.findall(text)]
    for term in terms:
        term_tokens = [t.casefold() for t in _WORD_RE.findall(term)]
        if not term_tokens:
            continue
        width = len(term_tokens)
        for k in range(len(tokens) - width + 1):
            if tokens[k : k + width] == term_tokens:
                return True
    return False


def filter_sentence(
    sentence: SentenceRecord,
    leak_terms: list[str],
    min_words: int = DEFAULT_MIN_WORDS,
    max_words: int = DEFAULT_MAX_WORDS,
) -> FilterDecision:
    """Keep/drop decision for one sentence. Bounds are inclusive; leak terms
    match as (possibly multi-word) token sequences, case-insensitively."""
    if sentence.word_count < min_words:
        return FilterDecision(False, "too_short")
    if sentence.word_count > max_words:
        return FilterDecision(False, "too_long")
    if _contains_leak(sentence.text, leak_terms):
        return FilterDecision(False, "source_leak")
    return FilterDecision(True, "kept")


def build_sentence_table(
    items: list[NewsItem], config: FilterConfig | None = None
) -> tuple[list[SentenceRecord], dict[str, int]]:
    """Segment and filter all items; returns kept sentences plus drop counts
    keyed by reason."""
    config = config or FilterConfig()
    kept: list[SentenceRecord] = []
    counts = {"kept": 0, "too_short": 0, "too_long": 0, "source_leak": 0}
    for item in items:
        terms = config.terms_for_outlet(item.outlet)
        for record in segment_item(item, config.abbreviations):
            decision = filter_sentence(record, terms, config.min_words, config.max_words)
            counts[decision.reason] += 1
            if decision.keep:
                kept.append(record)
    return kept, counts


def write_sentences(records: list[SentenceRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "sentence_id": r.sentence_id,
                        "item_id": r.item_id,
                        "position": r.position,
                        "text": r.text,
                        "word_count": r.word_count,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )


def read_sentences(path: str | Path) -> list[SentenceRecord]:
    path = Path(path)
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            try:
                records.append(
                    SentenceRecord(
                        sentence_id=str(raw["sentence_id"]),
                        item_id=str(raw["item_id"]),
                        position=int(raw["position"]),
                        text=str(raw["text"]),
                        word_count=int(raw["word_count"]),
                    )
                )
            except KeyError as exc:
                raise DataError(f"{path}:{lineno}: missing field {exc}") from exc
    return records
