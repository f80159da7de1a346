"""Dataset manifests: one image per line with label, split and format hint.

The on-disk form is CSV: ``path,label,split[,format]``. Labels are the four
class tokens or ``unknown`` for inference-only entries; split is ``train``
or ``validation``. Blank lines and ``#`` comments are ignored, as is an
optional header line starting with ``path``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .classify import ClassLabel
from .errors import ManifestError

SPLITS = ("train", "validation")


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: ClassLabel | None = None  # None = unknown (inference-only)
    split: str | None = None
    format: str | None = None


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self):
        seen = set()
        for entry in self.entries:
            if entry.path in seen:
                raise ManifestError(f"duplicate manifest path: {entry.path}")
            seen.add(entry.path)

    def labels(self) -> dict[str, ClassLabel | None]:
        return {entry.path: entry.label for entry in self.entries}

    def labeled(self) -> tuple[ManifestEntry, ...]:
        return tuple(entry for entry in self.entries if entry.label is not None)

    def for_split(self, split: str) -> tuple[ManifestEntry, ...]:
        return tuple(entry for entry in self.entries if entry.split == split)


def _parse_label(token: str, line_no: int) -> ClassLabel | None:
    token = token.strip()
    if not token or token.lower() == "unknown":
        return None
    try:
        return ClassLabel.from_token(token)
    except ValueError as exc:
        raise ManifestError(f"line {line_no}: {exc}") from exc


def _parse_split(token: str, line_no: int) -> str | None:
    token = token.strip().lower()
    if not token:
        return None
    if token == "val":
        token = "validation"
    if token not in SPLITS:
        raise ManifestError(f"line {line_no}: split must be train or validation, got {token!r}")
    return token


def parse_manifest(text: str) -> DatasetManifest:
    entries = []
    reader = csv.reader(io.StringIO(text))
    for line_no, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        first = row[0].strip()
        if first.startswith("#"):
            continue
        if line_no == 1 and first.lower() == "path":
            continue
        if not first:
            raise ManifestError(f"line {line_no}: empty image path")
        label = _parse_label(row[1], line_no) if len(row) > 1 else None
        split = _parse_split(row[2], line_no) if len(row) > 2 else None
        fmt = row[3].strip().lower() or None if len(row) > 3 else None
        entries.append(ManifestEntry(path=first, label=label, split=split, format=fmt))
    if not entries:
        raise ManifestError("manifest has no entries")
    return DatasetManifest(tuple(entries))


def load_manifest(path: str | Path) -> DatasetManifest:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    try:
        return parse_manifest(text)
    except ManifestError as exc:
        raise ManifestError(f"{path}: {exc}") from exc


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    lines = ["path,label,split,format"]
    for e in manifest.entries:
        label = e.label.token if e.label is not None else "unknown"
        lines.append(f"{e.path},{label},{e.split or ''},{e.format or ''}")
    Path(path).write_text("\n".join(lines) + "\n")
