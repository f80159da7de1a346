"""Accuracy metrics, 4-class and 2-class confusion matrices, report tables.

Matrix orientation is predicted = rows, actual = columns, class order
Normal, Benign, InSitu, Invasive. Accuracies are exact integer ratios
(fractions) until rendered, where they are shown at 2 significant figures.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .classify import CLASS_ORDER, ClassLabel
from .errors import ManifestMismatchError

# Published grid-sampling CNN baseline on the same 4-class task, used by the
# comparison table renderer.
GRID_SAMPLING_BASELINE = {
    "patch_accuracy": Fraction(67, 100),
    "image_accuracy_4class": Fraction(78, 100),
    "image_accuracy_2class": Fraction(83, 100),
}


class BinaryLabel(enum.Enum):
    NON_CARCINOMA = 0
    CARCINOMA = 1

    @property
    def token(self) -> str:
        return "non_carcinoma" if self is BinaryLabel.NON_CARCINOMA else "carcinoma"


BINARY_ORDER = (BinaryLabel.NON_CARCINOMA, BinaryLabel.CARCINOMA)


def to_binary(label: ClassLabel) -> BinaryLabel:
    """Collapse classes: normal/benign are non-carcinoma, the rest carcinoma."""
    if label in (ClassLabel.NORMAL, ClassLabel.BENIGN):
        return BinaryLabel.NON_CARCINOMA
    return BinaryLabel.CARCINOMA


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """4x4 counts; rows = predicted, columns = actual."""

    counts: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.counts, dtype=np.int64)
        if arr.shape != (4, 4):
            raise ValueError(f"confusion matrix must be 4x4, got {arr.shape}")
        if (arr < 0).any():
            raise ValueError("confusion matrix entries must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return bool(np.array_equal(self.counts, other.counts))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def accuracy(self) -> Fraction:
        return Fraction(int(np.trace(self.counts)), self.total)

    def per_class_accuracy(self) -> tuple[Fraction | None, ...]:
        """counts[c][c] / column-sum(c) per class; None for empty columns."""
        out = []
        for c in range(4):
            actual = int(self.counts[:, c].sum())
            out.append(Fraction(int(self.counts[c, c]), actual) if actual else None)
        return tuple(out)

    def collapse_binary(self) -> np.ndarray:
        """2x2 counts under the carcinoma mapping (same orientation)."""
        groups = ((0, 1), (2, 3))  # (normal, benign), (insitu, invasive)
        out = np.zeros((2, 2), dtype=np.int64)
        for bp, preds in enumerate(groups):
            for ba, actuals in enumerate(groups):
                out[bp, ba] = self.counts[np.ix_(preds, actuals)].sum()
        return out


def build_confusion(pairs: Iterable[tuple[ClassLabel, ClassLabel]]) -> ConfusionMatrix:
    """Count (predicted, actual) pairs into the 4x4 matrix."""
    counts = np.zeros((4, 4), dtype=np.int64)
    for predicted, actual in pairs:
        counts[predicted.value, actual.value] += 1
    return ConfusionMatrix(counts)


def build_binary_confusion(pairs: Iterable[tuple[BinaryLabel, BinaryLabel]]) -> np.ndarray:
    counts = np.zeros((2, 2), dtype=np.int64)
    for predicted, actual in pairs:
        counts[predicted.value, actual.value] += 1
    return counts


def binary_accuracy(cm2: np.ndarray) -> Fraction:
    return Fraction(int(np.trace(cm2)), int(cm2.sum()))


@dataclass(frozen=True)
class ImageOutcome:
    """Evaluation view of one processed image: decision plus patch labels."""

    image_id: str
    decision: ClassLabel
    patch_labels: tuple[ClassLabel, ...] = ()


@dataclass(frozen=True)
class EvalReport:
    """Patch-level and image-level accuracy summary."""

    patch_accuracy: Fraction | None
    image_accuracy_4class: Fraction
    image_accuracy_2class: Fraction
    per_class_accuracy: tuple[Fraction | None, ...]
    cm4: ConfusionMatrix
    cm2: np.ndarray
    n_images: int
    n_patches: int

    def to_record(self) -> dict:
        return {
            "n_images": self.n_images,
            "n_patches": self.n_patches,
            "patch_accuracy": None if self.patch_accuracy is None else float(self.patch_accuracy),
            "image_accuracy_4class": float(self.image_accuracy_4class),
            "image_accuracy_2class": float(self.image_accuracy_2class),
            "per_class_accuracy": {
                label.token: None if acc is None else float(acc)
                for label, acc in zip(CLASS_ORDER, self.per_class_accuracy)
            },
            "cm4": self.cm4.counts.tolist(),
            "cm2": self.cm2.tolist(),
        }


def evaluate_run(
    results: Sequence[ImageOutcome],
    truth: Mapping[str, ClassLabel | None],
) -> EvalReport:
    """Score a run against ground truth.

    Patch ground truth is the owning image's label (every patch inherits the
    image diagnosis). Images whose manifest label is unknown are skipped.

    Raises:
        ManifestMismatchError: a result's image id is absent from the truth
            mapping, or no result has a known label.
    """
    image_pairs: list[tuple[ClassLabel, ClassLabel]] = []
    patch_pairs: list[tuple[ClassLabel, ClassLabel]] = []
    for res in results:
        if res.image_id not in truth:
            raise ManifestMismatchError(f"image {res.image_id!r} not present in manifest")
        actual = truth[res.image_id]
        if actual is None:
            continue
        image_pairs.append((res.decision, actual))
        patch_pairs.extend((lbl, actual) for lbl in res.patch_labels)

    if not image_pairs:
        raise ManifestMismatchError("no labeled images to evaluate")

    cm4 = build_confusion(image_pairs)
    cm2 = build_binary_confusion(
        [(to_binary(p), to_binary(a)) for p, a in image_pairs]
    )
    patch_acc = None
    if patch_pairs:
        correct = sum(1 for p, a in patch_pairs if p == a)
        patch_acc = Fraction(correct, len(patch_pairs))
    return EvalReport(
        patch_accuracy=patch_acc,
        image_accuracy_4class=cm4.accuracy(),
        image_accuracy_2class=binary_accuracy(cm2),
        per_class_accuracy=cm4.per_class_accuracy(),
        cm4=cm4,
        cm2=cm2,
        n_images=len(image_pairs),
        n_patches=len(patch_pairs),
    )


def format_percent(value: Fraction | float | None) -> str:
    """Render a fraction at 2 significant figures, e.g. 85%, 7.9%, 100%."""
    if value is None:
        return "n/a"
    pct = float(value) * 100.0
    if pct >= 99.5:
        return f"{pct:.0f}%"
    return f"{pct:.2g}%"


def _matrix_table(title: str, counts: np.ndarray, names: Sequence[str]) -> str:
    width = max(9, max(len(n) for n in names) + 1)
    lines = [title, "predicted \\ actual".ljust(20) + "".join(n.rjust(width) for n in names)]
    for i, name in enumerate(names):
        row = "".join(str(int(c)).rjust(width) for c in counts[i])
        lines.append(name.ljust(20) + row)
    return "\n".join(lines)


def render_tables(report: EvalReport) -> str:
    """Human-readable report: both confusion matrices plus the comparison."""
    names4 = ["normal", "benign", "in-situ", "invasive"]
    names2 = ["non-carcinoma", "carcinoma"]
    per_class = "  ".join(
        f"{label.token}={format_percent(acc)}"
        for label, acc in zip(CLASS_ORDER, report.per_class_accuracy)
    )
    trace4 = int(report.cm4.counts.trace())
    parts = [
        _matrix_table("Four class confusion matrix", report.cm4.counts, names4),
        f"image accuracy (4 class): {format_percent(report.image_accuracy_4class)}"
        f"  [{trace4}/{report.cm4.total}]",
        f"per-class accuracy: {per_class}",
        "",
        _matrix_table("Two class confusion matrix", report.cm2, names2),
        f"image accuracy (2 class): {format_percent(report.image_accuracy_2class)}",
        "",
        render_benchmark_table(report),
    ]
    return "\n".join(parts) + "\n"


def render_benchmark_table(report: EvalReport) -> str:
    """Comparison against the published grid-sampling CNN baseline."""
    rows = [
        ("patch accuracy (4 class)", report.patch_accuracy, GRID_SAMPLING_BASELINE["patch_accuracy"]),
        ("image accuracy (4 class)", report.image_accuracy_4class, GRID_SAMPLING_BASELINE["image_accuracy_4class"]),
        ("image accuracy (2 class)", report.image_accuracy_2class, GRID_SAMPLING_BASELINE["image_accuracy_2class"]),
    ]
    lines = [
        "Comparison with the grid-sampling CNN baseline",
        f"{'metric':<26}{'this pipeline':>14}{'baseline':>10}",
    ]
    for name, ours, baseline in rows:
        lines.append(f"{name:<26}{format_percent(ours):>14}{format_percent(baseline):>10}")
    return "\n".join(lines)
