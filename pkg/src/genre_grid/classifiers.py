"""Baseline sentence classifiers: multinomial Naive Bayes, softmax logistic
regression, and a linear one-vs-rest hinge-loss SVM, plus stratified data
splitting and exhaustive grid search with cross-validation.

Everything is deterministic given (data order, seed): splits and fold
assignments shuffle with seeded RNGs, logistic regression defaults to
full-batch descent, and the SVM visits examples in a seed-shuffled order with
the classic 1/(reg*t) step schedule.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .annotation import TASKS, label_set_for_task
from .errors import DataError
from .evaluation import evaluate
from .features import (
    VECTORIZER_KINDS,
    SparseVector,
    Vectorizer,
    fit_vectorizer,
)

MODEL_KINDS = ("naive_bayes", "logistic_regression", "linear_svm")
MODEL_FORMAT_VERSION = "genre-grid/model/v1"

# Documented default seed used by the CLI and library entry points.
DEFAULT_SEED = 7


# ---------------------------------------------------------------------------
# Splitting


@dataclass(frozen=True)
class SplitSpec:
    train: tuple[int, ...]
    validation: tuple[int, ...]
    test: tuple[int, ...]
    seed: int
    stratified: bool = True

    def to_dict(self) -> dict:
        return {
            "train": list(self.train),
            "validation": list(self.validation),
            "test": list(self.test),
            "seed": self.seed,
            "stratified": self.stratified,
        }


def _round_half_up(x: float) -> int:
    return int(x + 0.5)


def stratified_split(
    labels: list,
    seed: int = DEFAULT_SEED,
    test_ratio: float = 0.2,
    val_ratio: float = 0.2,
    label_set: tuple | list | None = None,
) -> SplitSpec:
    """Two nested stratified holdouts: test_ratio of each class goes to test,
    then val_ratio of the remainder goes to validation (defaults give a
    64/16/20 split). Deterministic for a given seed."""
    if not labels:
        raise DataError("cannot split an empty label list")
    present = sorted({str(l) for l in labels})
    if label_set is not None:
        empty = [str(c) for c in label_set if str(c) not in present]
        if empty:
            raise DataError(f"class(es) with zero examples: {', '.join(empty)}")
    rng = random.Random(seed)
    train: list[int] = []
    validation: list[int] = []
    test: list[int] = []
    by_class: dict[str, list[int]] = {c: [] for c in present}
    for i, label in enumerate(labels):
        by_class[str(label)].append(i)
    for c in present:
        idxs = by_class[c]
        rng.shuffle(idxs)
        n_test = _round_half_up(len(idxs) * test_ratio)
        rest = idxs[n_test:]
        n_val = _round_half_up(len(rest) * val_ratio)
        test.extend(idxs[:n_test])
        validation.extend(rest[:n_val])
        train.extend(rest[n_val:])
    return SplitSpec(
        train=tuple(sorted(train)),
        validation=tuple(sorted(validation)),
        test=tuple(sorted(test)),
        seed=seed,
    )


def stratified_fold_assignment(labels: list, folds: int, seed: int) -> list[int]:
    """Fold id per index; within each class the shuffled members are dealt
    round-robin so per-fold class proportions stay balanced."""
    if folds < 2:
        raise DataError(f"need at least 2 folds, got {folds}")
    if folds > len(labels):
        raise DataError(f"{folds} folds for only {len(labels)} examples")
    rng = random.Random(seed)
    assignment = [0] * len(labels)
    by_class: dict[str, list[int]] = {}
    for i, label in enumerate(labels):
        by_class.setdefault(str(label), []).append(i)
    for c in sorted(by_class):
        idxs = by_class[c]
        rng.shuffle(idxs)
        for k, i in enumerate(idxs):
            assignment[i] = k % folds
    return assignment


# ---------------------------------------------------------------------------
# Models


@dataclass
class TrainedModel:
    task: str
    model_kind: str
    vectorizer: Vectorizer
    parameters: dict  # name -> np.ndarray
    label_set: tuple[str, ...]
    hyperparameters: dict
    training_seed: int

    def __post_init__(self):
        if self.model_kind not in MODEL_KINDS:
            raise DataError(f"unknown model kind {self.model_kind!r}")
        v = len(self.vectorizer.vocabulary)
        c = len(self.label_set)
        shapes = {name: arr.shape for name, arr in self.parameters.items()}
        if self.model_kind == "naive_bayes":
            ok = shapes == {"class_log_prior": (c,), "feature_log_prob": (c, v)}
        else:
            ok = shapes == {"weights": (c, v), "bias": (c,)}
        if not ok:
            raise DataError(
                f"parameter shapes {shapes} do not match vocabulary size {v} "
                f"and {c} labels for {self.model_kind}"
            )

    @property
    def vectorizer_kind(self) -> str:
        return self.vectorizer.kind

    @property
    def probabilistic(self) -> bool:
        """SVM scores are raw margins, not probabilities."""
        return self.model_kind != "linear_svm"


@dataclass(frozen=True)
class Prediction:
    label: str
    scores: dict  # label -> score


def _as_matrix(X, dimension: int | None = None) -> np.ndarray:
    if isinstance(X, np.ndarray):
        return np.asarray(X, dtype=float)
    vectors = list(X)
    if vectors and isinstance(vectors[0], SparseVector):
        dim = dimension if dimension is not None else vectors[0].dimension
        dense = np.zeros((len(vectors), dim))
        for row, vec in enumerate(vectors):
            for idx, w in vec.entries:
                dense[row, idx] = w
        return dense
    return np.asarray(vectors, dtype=float)


def _encode_labels(y: list, label_set: tuple | list | None) -> tuple[tuple[str, ...], np.ndarray]:
    labels = tuple(label_set) if label_set is not None else tuple(sorted({str(l) for l in y}))
    index = {l: i for i, l in enumerate(labels)}
    try:
        encoded = np.array([index[str(l)] for l in y], dtype=int)
    except KeyError as exc:
        raise DataError(f"label {exc} not in label_set {list(labels)}") from exc
    return labels, encoded


def train_naive_bayes(
    X,
    y: list,
    smoothing: float = 1.0,
    vectorizer: Vectorizer | None = None,
    label_set: tuple | list | None = None,
    task: str = "",
    seed: int = DEFAULT_SEED,
) -> TrainedModel:
    """Multinomial Naive Bayes with additive smoothing.

    Class log-prior is ln(count_c/N); the per-term log-likelihood is
    ln((tc + s) / (sum_t tc + s*V)). Classes absent from y get -inf prior.
    """
    if smoothing <= 0:
        raise DataError(f"smoothing must be > 0, got {smoothing}")
    if vectorizer is None:
        raise DataError("train_naive_bayes needs the fitted vectorizer to embed")
    X = _as_matrix(X, len(vectorizer.vocabulary))
    if np.any(X < 0):
        raise DataError("naive Bayes requires nonnegative feature values")
    labels, encoded = _encode_labels(y, label_set)
    n_classes = len(labels)
    n_features = X.shape[1]
    counts = np.zeros(n_classes)
    term_counts = np.zeros((n_classes, n_features))
    for c in range(n_classes):
        mask = encoded == c
        counts[c] = mask.sum()
        if counts[c]:
            term_counts[c] = X[mask].sum(axis=0)
    with np.errstate(divide="ignore"):
        class_log_prior = np.log(counts / len(y))
    totals = term_counts.sum(axis=1, keepdims=True) + smoothing * n_features
    if n_features:
        feature_log_prob = np.log((term_counts + smoothing) / totals)
    else:
        feature_log_prob = np.zeros((n_classes, 0))
    return TrainedModel(
        task=task,
        model_kind="naive_bayes",
        vectorizer=vectorizer,
        parameters={
            "class_log_prior": class_log_prior,
            "feature_log_prob": feature_log_prob,
        },
        label_set=labels,
        hyperparameters={"smoothing": smoothing},
        training_seed=seed,
    )


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _lr_loss(X, Y, W, b, l2) -> float:
    logits = X @ W + b
    logits = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(logits).sum(axis=1))
    ce = float(np.mean(log_norm - logits[np.arange(len(X)), Y]))
    return ce + 0.5 * l2 * float((W * W).sum())


def _lr_gradient(X, Y, W, b, l2) -> tuple[np.ndarray, np.ndarray]:
    probs = _softmax(X @ W + b)
    probs[np.arange(len(X)), Y] -= 1.0
    grad_w = X.T @ probs / len(X) + l2 * W
    grad_b = probs.mean(axis=0)
    return grad_w, grad_b


def train_logistic_regression(
    X,
    y: list,
    l2: float = 1e-2,
    lr: float = 0.1,
    epochs: int = 50,
    seed: int = DEFAULT_SEED,
    batch_size: int | None = None,
    vectorizer: Vectorizer | None = None,
    label_set: tuple | list | None = None,
    task: str = "",
) -> TrainedModel:
    """Multinomial softmax regression minimizing cross-entropy + (l2/2)||W||^2.

    Full-batch mode (batch_size=None, the default) is purely deterministic and
    guarantees a non-increasing loss: an epoch whose step would raise the loss
    retries with a halved step. Mini-batch mode shuffles with the seed.
    """
    if epochs < 1:
        raise DataError(f"epochs must be >= 1, got {epochs}")
    if l2 < 0:
        raise DataError(f"l2 must be >= 0, got {l2}")
    if vectorizer is None:
        raise DataError("train_logistic_regression needs the fitted vectorizer to embed")
    X = _as_matrix(X, len(vectorizer.vocabulary))
    labels, encoded = _encode_labels(y, label_set)
    n, n_features = X.shape
    W = np.zeros((n_features, len(labels)))
    b = np.zeros(len(labels))

    if batch_size is None:
        loss = _lr_loss(X, encoded, W, b, l2)
        step = lr
        for _ in range(epochs):
            grad_w, grad_b = _lr_gradient(X, encoded, W, b, l2)
            accepted = False
            for _attempt in range(60):
                cand_w = W - step * grad_w
                cand_b = b - step * grad_b
                cand_loss = _lr_loss(X, encoded, cand_w, cand_b, l2)
                if not np.isfinite(cand_loss):
                    raise DataError(
                        f"logistic regression diverged (non-finite loss) at learning rate {lr}"
                    )
                if cand_loss <= loss:
                    accepted = True
                    break
                step /= 2.0
            if not accepted:
                break  # step underflowed; we are at a (numerical) minimum
            W, b, loss = cand_w, cand_b, cand_loss
    else:
        if batch_size < 1:
            raise DataError(f"batch_size must be >= 1, got {batch_size}")
        rng = np.random.RandomState(seed)
        # overflow here is diagnosed by the loss check below, not by warnings
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(epochs):
                order = rng.permutation(n)
                for start in range(0, n, batch_size):
                    batch = order[start : start + batch_size]
                    grad_w, grad_b = _lr_gradient(X[batch], encoded[batch], W, b, l2)
                    W -= lr * grad_w
                    b -= lr * grad_b
                if not np.isfinite(_lr_loss(X, encoded, W, b, l2)):
                    raise DataError(
                        f"logistic regression diverged (non-finite loss) at learning rate {lr}"
                    )

    hyper = {"l2": l2, "lr": lr, "epochs": epochs}
    if batch_size is not None:
        hyper["batch_size"] = batch_size
    return TrainedModel(
        task=task,
        model_kind="logistic_regression",
        vectorizer=vectorizer,
        parameters={"weights": W.T.copy(), "bias": b},
        label_set=labels,
        hyperparameters=hyper,
        training_seed=seed,
    )


def svm_objective(w: np.ndarray, b: float, X: np.ndarray, y_signed: np.ndarray, reg: float) -> float:
    """(reg/2)||w||^2 + mean hinge loss; used for the descent sanity bound."""
    margins = y_signed * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * reg * float(w @ w) + float(hinge.mean())


def train_linear_svm(
    X,
    y: list,
    reg: float = 1e-3,
    epochs: int = 20,
    seed: int = DEFAULT_SEED,
    vectorizer: Vectorizer | None = None,
    label_set: tuple | list | None = None,
    task: str = "",
) -> TrainedModel:
    """One-vs-rest linear SVM trained by per-example subgradient descent with
    step 1/(reg*t). The visit order is seed-shuffled per epoch and identical
    for every class, so training is deterministic given the seed."""
    if reg <= 0:
        raise DataError(f"reg must be > 0, got {reg}")
    if epochs < 1:
        raise DataError(f"epochs must be >= 1, got {epochs}")
    if vectorizer is None:
        raise DataError("train_linear_svm needs the fitted vectorizer to embed")
    X = _as_matrix(X, len(vectorizer.vocabulary))
    labels, encoded = _encode_labels(y, label_set)
    n, n_features = X.shape
    weights = np.zeros((len(labels), n_features))
    biases = np.zeros(len(labels))
    for c in range(len(labels)):
        y_signed = np.where(encoded == c, 1.0, -1.0)
        w = np.zeros(n_features)
        b = 0.0
        t = 0
        rng = np.random.RandomState(seed)
        for _ in range(epochs):
            for i in rng.permutation(n):
                t += 1
                eta = 1.0 / (reg * t)
                violated = y_signed[i] * (X[i] @ w + b) < 1.0
                w *= 1.0 - eta * reg
                if violated:
                    w += eta * y_signed[i] * X[i]
                    b += eta * y_signed[i]
        weights[c] = w
        biases[c] = b
    return TrainedModel(
        task=task,
        model_kind="linear_svm",
        vectorizer=vectorizer,
        parameters={"weights": weights, "bias": biases},
        label_set=labels,
        hyperparameters={"reg": reg, "epochs": epochs},
        training_seed=seed,
    )


def decision_scores(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """(n, C) score matrix: normalized posteriors (NB), softmax probabilities
    (LR), or raw one-vs-rest margins (SVM)."""
    if model.model_kind == "naive_bayes":
        log_post = model.parameters["class_log_prior"] + X @ model.parameters["feature_log_prob"].T
        return _softmax(log_post)
    if model.model_kind == "logistic_regression":
        return _softmax(X @ model.parameters["weights"].T + model.parameters["bias"])
    return X @ model.parameters["weights"].T + model.parameters["bias"]


def predict(model: TrainedModel, sentences: list[str]) -> list[Prediction]:
    """Vectorize with the model's embedded vectorizer and score. The label is
    the argmax with ties broken by label_set order."""
    X = model.vectorizer.transform_matrix(list(sentences))
    scores = decision_scores(model, X)
    out = []
    for row in scores:
        idx = int(np.argmax(row))
        out.append(
            Prediction(
                label=model.label_set[idx],
                scores={l: float(row[i]) for i, l in enumerate(model.label_set)},
            )
        )
    return out


# ---------------------------------------------------------------------------
# Model persistence


def save_model(model: TrainedModel, path: str | Path) -> None:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "task": model.task,
        "model_kind": model.model_kind,
        "vectorizer": model.vectorizer.to_dict(),
        "parameters": {k: v.tolist() for k, v in model.parameters.items()},
        "label_set": list(model.label_set),
        "hyperparameters": model.hyperparameters,
        "training_seed": model.training_seed,
    }
    Path(path).write_text(
        json.dumps(doc, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_model(path: str | Path) -> TrainedModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed model file: {exc}") from exc
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise DataError(
            f"{path}: unsupported model format {doc.get('format_version')!r} "
            f"(expected {MODEL_FORMAT_VERSION})"
        )
    return TrainedModel(
        task=str(doc["task"]),
        model_kind=str(doc["model_kind"]),
        vectorizer=Vectorizer.from_dict(doc["vectorizer"]),
        parameters={k: np.asarray(v, dtype=float) for k, v in doc["parameters"].items()},
        label_set=tuple(doc["label_set"]),
        hyperparameters=dict(doc["hyperparameters"]),
        training_seed=int(doc["training_seed"]),
    )


# ---------------------------------------------------------------------------
# Grid search


@dataclass(frozen=True)
class GridCell:
    model_kind: str
    vectorizer_kind: str
    min_df: int = 1
    hyperparameters: tuple = ()  # sorted (name, value) pairs

    def hyper_dict(self) -> dict:
        return dict(self.hyperparameters)

    @classmethod
    def make(cls, model_kind: str, vectorizer_kind: str, min_df: int = 1, **hyper) -> "GridCell":
        if model_kind not in MODEL_KINDS:
            raise DataError(f"unknown model kind {model_kind!r}")
        if vectorizer_kind not in VECTORIZER_KINDS:
            raise DataError(f"unknown vectorizer kind {vectorizer_kind!r}")
        return cls(
            model_kind=model_kind,
            vectorizer_kind=vectorizer_kind,
            min_df=min_df,
            hyperparameters=tuple(sorted(hyper.items())),
        )

    def to_dict(self) -> dict:
        return {
            "model_kind": self.model_kind,
            "vectorizer_kind": self.vectorizer_kind,
            "min_df": self.min_df,
            "hyperparameters": self.hyper_dict(),
        }


def default_grid() -> list[GridCell]:
    """The stock search space: three smoothing values for NB, three l2
    strengths for LR, three regs for the SVM, crossed with both vectorizers
    and min_df in {1, 2}."""
    cells = []
    for vec in VECTORIZER_KINDS:
        for min_df in (1, 2):
            for smoothing in (0.1, 0.5, 1.0):
                cells.append(GridCell.make("naive_bayes", vec, min_df, smoothing=smoothing))
            for l2 in (1e-3, 1e-2, 1e-1):
                cells.append(
                    GridCell.make("logistic_regression", vec, min_df, l2=l2, lr=0.1, epochs=50)
                )
            for reg in (1e-4, 1e-3, 1e-2):
                cells.append(GridCell.make("linear_svm", vec, min_df, reg=reg, epochs=20))
    return cells


def fast_grid() -> list[GridCell]:
    """A 4-cell grid for smoke tests and quick runs."""
    cells = []
    for vec in VECTORIZER_KINDS:
        cells.append(GridCell.make("naive_bayes", vec, 1, smoothing=1.0))
        cells.append(GridCell.make("logistic_regression", vec, 1, l2=1e-2, lr=0.5, epochs=30))
    return cells


NAMED_GRIDS = {"default": default_grid, "fast": fast_grid}


def fit_model(
    sentences: list[str],
    labels: list,
    task: str,
    model_kind: str,
    vectorizer_kind: str,
    hyperparameters: dict | None = None,
    min_df: int = 1,
    seed: int = DEFAULT_SEED,
    label_set: tuple | list | None = None,
) -> TrainedModel:
    """Fit a vectorizer on `sentences` and train one model on top of it."""
    hyper = dict(hyperparameters or {})
    if label_set is None and task in TASKS:
        label_set = label_set_for_task(task)
    vectorizer = fit_vectorizer(sentences, vectorizer_kind, min_df=min_df)
    X = vectorizer.transform_matrix(sentences)
    common = dict(vectorizer=vectorizer, label_set=label_set, task=task, seed=seed)
    if model_kind == "naive_bayes":
        return train_naive_bayes(X, labels, **hyper, **common)
    if model_kind == "logistic_regression":
        return train_logistic_regression(X, labels, **hyper, **common)
    if model_kind == "linear_svm":
        return train_linear_svm(X, labels, **hyper, **common)
    raise DataError(f"unknown model kind {model_kind!r}")


@dataclass(frozen=True)
class CellResult:
    cell: GridCell
    fold_scores: tuple[float, ...]
    mean_score: float
    n_parameters: int

    def to_dict(self) -> dict:
        return {
            "cell": self.cell.to_dict(),
            "fold_scores": list(self.fold_scores),
            "mean_score": self.mean_score,
            "n_parameters": self.n_parameters,
        }


@dataclass
class GridSearchResult:
    ranked: list  # CellResult, best first
    best_model: TrainedModel
    folds: int
    seed: int

    @property
    def best(self) -> CellResult:
        return self.ranked[0]


def grid_search_cv(
    sentences: list[str],
    labels: list,
    task: str,
    grid: list | None = None,
    folds: int = 5,
    seed: int = DEFAULT_SEED,
    label_set: tuple | list | None = None,
) -> GridSearchResult:
    """Evaluate every grid cell with the same stratified fold assignment,
    rank by mean validation macro-F1 (ties: fewer learned parameters, then
    declaration order of model and vectorizer kinds), and refit the winner on
    all the given rows.

    Callers must pass only non-test data; the held-out test set stays outside
    this function entirely.
    """
    grid = list(default_grid() if grid is None else grid)
    if not grid:
        raise DataError("grid search needs at least one cell")
    if len(sentences) != len(labels):
        raise DataError(
            f"sentences and labels length mismatch: {len(sentences)} vs {len(labels)}"
        )
    if label_set is None:
        label_set = label_set_for_task(task) if task in TASKS else tuple(sorted({str(l) for l in labels}))
    fold_of = stratified_fold_assignment(labels, folds, seed)

    vocab_size_cache: dict[int, int] = {}

    def n_parameters(cell: GridCell) -> int:
        if cell.min_df not in vocab_size_cache:
            vec = fit_vectorizer(list(sentences), "counts", min_df=cell.min_df)
            vocab_size_cache[cell.min_df] = len(vec.vocabulary)
        v = vocab_size_cache[cell.min_df]
        return len(label_set) * (v + 1)

    results: list[CellResult] = []
    for cell in grid:
        fold_scores = []
        for f in range(folds):
            train_idx = [i for i in range(len(labels)) if fold_of[i] != f]
            val_idx = [i for i in range(len(labels)) if fold_of[i] == f]
            model = fit_model(
                [sentences[i] for i in train_idx],
                [labels[i] for i in train_idx],
                task=task,
                model_kind=cell.model_kind,
                vectorizer_kind=cell.vectorizer_kind,
                hyperparameters=cell.hyper_dict(),
                min_df=cell.min_df,
                seed=seed,
                label_set=label_set,
            )
            preds = [p.label for p in predict(model, [sentences[i] for i in val_idx])]
            report = evaluate([str(labels[i]) for i in val_idx], preds, label_set)
            fold_scores.append(report.macro_f1)
        results.append(
            CellResult(
                cell=cell,
                fold_scores=tuple(fold_scores),
                mean_score=sum(fold_scores) / folds,
                n_parameters=n_parameters(cell),
            )
        )

    def rank_key(r: CellResult):
        return (
            -r.mean_score,
            r.n_parameters,
            MODEL_KINDS.index(r.cell.model_kind),
            VECTORIZER_KINDS.index(r.cell.vectorizer_kind),
            r.cell.min_df,
            repr(r.cell.hyperparameters),
        )

    ranked = sorted(results, key=rank_key)
    winner = ranked[0].cell
    best_model = fit_model(
        list(sentences),
        list(labels),
        task=task,
        model_kind=winner.model_kind,
        vectorizer_kind=winner.vectorizer_kind,
        hyperparameters=winner.hyper_dict(),
        min_df=winner.min_df,
        seed=seed,
        label_set=label_set,
    )
    return GridSearchResult(ranked=ranked, best_model=best_model, folds=folds, seed=seed)


@dataclass
class TrainOutcome:
    model: TrainedModel
    search: GridSearchResult
    split: SplitSpec
    test_report: object  # EvaluationReport


def train_for_task(
    sentences: list[str],
    labels: list,
    task: str,
    grid: list | None = None,
    folds: int = 5,
    seed: int = DEFAULT_SEED,
) -> TrainOutcome:
    """Full training pipeline: stratified 64/16/20 split, grid search with CV
    over the non-test rows, refit of the winner, and a final report on the
    held-out test rows (which the search never sees)."""
    label_set = label_set_for_task(task) if task in TASKS else None
    split = stratified_split(labels, seed=seed, label_set=label_set)
    non_test = sorted(split.train + split.validation)
    search = grid_search_cv(
        [sentences[i] for i in non_test],
        [labels[i] for i in non_test],
        task=task,
        grid=grid,
        folds=folds,
        seed=seed,
        label_set=label_set,
    )
    model = search.best_model
    test_sentences = [sentences[i] for i in split.test]
    test_labels = [str(labels[i]) for i in split.test]
    preds = [p.label for p in predict(model, test_sentences)]
    report = evaluate(test_labels, preds, model.label_set)
    return TrainOutcome(model=model, search=search, split=split, test_report=report)
