"""Shared synthetic-corpus builders for pipeline-level tests.

Sentences embed exactly one factuality marker and one formality marker, so
their true labels are recoverable from the text itself. That keeps the world
learnable for the classical models while letting annotation generators add
controlled rater noise on top.
"""

import json
import random

import pytest

FACT_MARKERS = ["rapport", "cijfers", "kabinet", "procent", "onderzoek", "begroting"]
OPINION_MARKERS = ["schandalig", "prachtig", "belachelijk", "geweldig", "waardeloos"]
NEITHER_MARKERS = ["misschien", "wellicht", "eventueel"]
FORMAL_MARKERS = ["derhalve", "conform", "betreffende", "aldus", "inzake"]
INFORMAL_MARKERS = ["hartstikke", "gaaf", "lekker", "balen", "tof"]
FILLERS = [
    "de", "het", "een", "over", "voor", "met", "naar", "deze", "vandaag",
    "nieuwe", "grote", "kleine", "plannen", "mensen", "stad", "land",
]

OUTLETS = [
    # (outlet, text_kind, genre_tag, profile: (p_fact, p_opinion, p_formal))
    ("Courant", "written", "Opinion articles", (0.55, 0.35, 0.8)),
    ("OmroepZuid", "spoken", "TV broadcasts", (0.85, 0.1, 0.7)),
    ("BlogNL", "written", "Blog posts", (0.3, 0.6, 0.2)),
    ("PraatShow", "spoken", "Talk shows", (0.5, 0.4, 0.35)),
]
SECTIONS = ["politiek", "sport", "cultuur"]


def true_factuality(text: str) -> str:
    tokens = set(text.lower().replace(".", "").split())
    if tokens & set(FACT_MARKERS):
        return "fact"
    if tokens & set(OPINION_MARKERS):
        return "opinion"
    return "neither"


def true_formality(text: str) -> str:
    tokens = set(text.lower().replace(".", "").split())
    return "formal" if tokens & set(FORMAL_MARKERS) else "informal"


def make_sentence(rng, fact_label, formal_label):
    fact_pool = {
        "fact": FACT_MARKERS,
        "opinion": OPINION_MARKERS,
        "neither": NEITHER_MARKERS,
    }[fact_label]
    form_pool = FORMAL_MARKERS if formal_label == "formal" else INFORMAL_MARKERS
    words = [rng.choice(fact_pool), rng.choice(form_pool)]
    words += [rng.choice(FILLERS) for _ in range(rng.randint(4, 8))]
    rng.shuffle(words)
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def write_corpus(path, n_items=16, sentences_per_item=10, seed=101):
    """Synthetic corpus JSONL; returns the item metadata list."""
    rng = random.Random(seed)
    items = []
    with open(path, "w", encoding="utf-8") as fh:
        for k in range(n_items):
            outlet, text_kind, genre_tag, (p_fact, p_opinion, p_formal) = OUTLETS[
                k % len(OUTLETS)
            ]
            body_sentences = []
            for _ in range(sentences_per_item):
                r = rng.random()
                fact_label = "fact" if r < p_fact else ("opinion" if r < p_fact + p_opinion else "neither")
                formal_label = "formal" if rng.random() < p_formal else "informal"
                body_sentences.append(make_sentence(rng, fact_label, formal_label))
            item = {
                "item_id": f"item{k:03d}",
                "outlet": outlet,
                "genre_tag": genre_tag,
                "text_kind": text_kind,
                "section": SECTIONS[k % len(SECTIONS)],
                "body": " ".join(body_sentences),
            }
            fh.write(json.dumps(item, ensure_ascii=False) + "\n")
            items.append(item)
    return items


def write_annotations(sentences_path, out_path, seed=202, noise=0.15, n_raters=3):
    """Three noisy raters per sentence for both tasks, derived from the
    marker-defined true labels."""
    rng = random.Random(seed)
    with open(sentences_path, encoding="utf-8") as fh:
        sentences = [json.loads(line) for line in fh if line.strip()]
    with open(out_path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fact = true_factuality(s["text"])
            formal = true_formality(s["text"])
            for r in range(n_raters):
                vote = fact
                if rng.random() < noise:
                    vote = rng.choice(["fact", "opinion", "neither"])
                fh.write(
                    json.dumps(
                        {
                            "sentence_id": s["sentence_id"],
                            "annotator_id": f"rater{r}",
                            "task": "factuality",
                            "raw_label": vote,
                        }
                    )
                    + "\n"
                )
            for r in range(n_raters):
                if rng.random() < noise:
                    raw = rng.randint(1, 5)
                elif formal == "formal":
                    raw = rng.choice([4, 4, 5, 3])
                else:
                    raw = rng.choice([1, 2, 2, 3])
                fh.write(
                    json.dumps(
                        {
                            "sentence_id": s["sentence_id"],
                            "annotator_id": f"rater{r}",
                            "task": "formality",
                            "raw_label": raw,
                        }
                    )
                    + "\n"
                )
    return out_path


@pytest.fixture
def synthetic_corpus(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    items = write_corpus(corpus)
    return corpus, items


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: release-gating criterion")


CRITERION_LABELS = {
    "test_alpha_oracle_equivalence": "alpha-oracle equivalence (200 datasets, 1e-9; hand case 0.64)",
    "test_metric_oracle_equivalence": "metric-oracle equivalence (200 instances, 1e-12; fixture 0.7333)",
    "test_classifier_sanity": "classifier sanity (3 models >= 0.95 on 1,000 sentences; LR gradcheck)",
    "test_paper_reproduction_conditional": "paper-corpus reproduction (conditional on released data)",
    "test_grid_identities": "grid identities (pooling, unit square, cap rule)",
    "test_zoom_rule": "zoom rule (mean +- sd +- 5, clamped)",
    "test_end_to_end_determinism": "end-to-end CLI determinism (byte-identical reruns)",
}


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL/SKIP line per acceptance criterion."""
    lines = []
    for status, key in (("PASS", "passed"), ("FAIL", "failed"), ("SKIP", "skipped")):
        for report in terminalreporter.stats.get(key, ()):
            name = getattr(report, "location", ("", "", ""))[2]
            base = name.split("[")[0]
            if base in CRITERION_LABELS:
                lines.append((base, f"acceptance {status}: {CRITERION_LABELS[base]}"))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for _, line in sorted(lines, key=lambda kv: list(CRITERION_LABELS).index(kv[0])):
            terminalreporter.write_line(line)
