"""Dataset ingestion: manifests, CSV loaders, image grids and bundled data.

A dataset manifest is a small JSON document naming the storage format and
how to interpret records::

    {
      "format": "csv-vectors" | "csv-tensors" | "image-grid",
      "path": "iris.csv",          // file, or class-per-subdirectory root
      "shape": [2, 2],             // csv-tensors: dims of each record
      "label_column": "species"    // csv formats; omit for unlabeled data
    }

Relative paths resolve against the manifest's own directory.  CSV files
need a header row and rectangular numeric content; malformed rows are
reported with their 1-based row number.  Image grids hold one subdirectory
per class of equally sized portable graymaps whose intensities are scaled
to [0, 1].
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from .classify import LabeledDataset
from .errors import DataFormatError, DimensionError
from .tensor import TensorSample

__all__ = [
    "DatasetManifest",
    "load_sample",
    "load_labeled",
    "load_queries",
    "load_image_grid",
    "load_iris",
    "iris_csv_text",
]

FORMATS = ("csv-vectors", "csv-tensors", "image-grid")


@dataclass(frozen=True)
class DatasetManifest:
    format: str
    path: Path
    shape: tuple[int, ...] | None = None
    label_column: str | None = None

    def __post_init__(self):
        if self.format not in FORMATS:
            raise DataFormatError(
                f"manifest format must be one of {FORMATS}, got {self.format!r}"
            )
        if self.format == "csv-tensors" and self.shape is None:
            raise DataFormatError("csv-tensors manifests must declare a shape")

    @classmethod
    def from_json_file(cls, path) -> "DatasetManifest":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as err:
            raise DataFormatError(f"{path}: not valid JSON ({err})") from err
        if not isinstance(doc, dict) or "format" not in doc or "path" not in doc:
            raise DataFormatError(f"{path}: manifest needs 'format' and 'path'")
        shape = doc.get("shape")
        return cls(
            format=doc["format"],
            path=(path.parent / doc["path"]).resolve(),
            shape=None if shape is None else tuple(int(d) for d in shape),
            label_column=doc.get("label_column"),
        )


def _read_csv(path: Path, label_column: str | None):
    """Rectangular numeric rows plus optional labels; errors carry row numbers."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as err:
        raise DataFormatError(f"{path}: {err}") from err
    if not rows:
        raise DataFormatError(f"{path}: empty file, expected a header row")
    header = [h.strip() for h in rows[0]]
    label_idx = None
    if label_column is not None:
        if label_column not in header:
            raise DataFormatError(
                f"{path}: label column {label_column!r} not in header {header}"
            )
        label_idx = header.index(label_column)
    width = len(header)
    values = []
    labels = []
    for rownum, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise DataFormatError(
                f"{path}: row {rownum} has {len(row)} fields, expected {width}"
            )
        try:
            record = [
                float(cell)
                for i, cell in enumerate(row)
                if i != label_idx
            ]
        except ValueError as err:
            raise DataFormatError(f"{path}: row {rownum}: {err}") from err
        values.append(record)
        if label_idx is not None:
            labels.append(row[label_idx].strip())
    if not values:
        raise DataFormatError(f"{path}: no data rows")
    feature_names = [h for i, h in enumerate(header) if i != label_idx]
    return np.asarray(values, dtype=np.float64), labels, feature_names


def _records_to_sample(values: np.ndarray, shape) -> TensorSample:
    if shape is None:
        return TensorSample.from_array(values)
    shape = tuple(int(d) for d in shape)
    if int(np.prod(shape)) != values.shape[1]:
        raise DataFormatError(
            f"declared shape {shape} holds {int(np.prod(shape))} values but "
            f"records carry {values.shape[1]}"
        )
    return TensorSample.from_array(values.reshape((values.shape[0],) + shape))


def _grouped(values: np.ndarray, labels, shape) -> LabeledDataset:
    if not labels:
        raise DataFormatError("dataset has no labels; declare a label_column")
    unique = sorted(set(labels))
    classes = []
    for lab in unique:
        idx = [i for i, l in enumerate(labels) if l == lab]
        classes.append(_records_to_sample(values[idx], shape))
    return LabeledDataset(labels=tuple(unique), classes=tuple(classes))


def load_sample(manifest: DatasetManifest, shape_override=None) -> TensorSample:
    """All records of the dataset as one unlabeled sample."""
    shape = shape_override or manifest.shape
    if manifest.format == "image-grid":
        dataset = load_image_grid(manifest.path, shape)
        return TensorSample.from_array(
            np.concatenate([c.stack for c in dataset.classes])
        )
    values, _, _ = _read_csv(manifest.path, manifest.label_column)
    if manifest.format == "csv-vectors" and shape_override is None:
        shape = None
    return _records_to_sample(values, shape)


def load_labeled(manifest: DatasetManifest, shape_override=None) -> LabeledDataset:
    """The dataset grouped by class label."""
    shape = shape_override or manifest.shape
    if manifest.format == "image-grid":
        return load_image_grid(manifest.path, shape)
    if manifest.label_column is None:
        raise DataFormatError(
            f"{manifest.path}: manifest has no label_column, cannot group"
        )
    values, labels, _ = _read_csv(manifest.path, manifest.label_column)
    if manifest.format == "csv-vectors" and shape_override is None:
        shape = None
    return _grouped(values, labels, shape)


def load_queries(path, manifest: DatasetManifest, shape_override=None) -> TensorSample:
    """Query records shaped like the dataset's; a label column is dropped."""
    path = Path(path)
    label = manifest.label_column
    try:
        values, _, _ = _read_csv(path, label)
    except DataFormatError:
        if label is None:
            raise
        # queries may legitimately omit the label column
        values, _, _ = _read_csv(path, None)
    shape = shape_override or manifest.shape
    if manifest.format == "csv-vectors" and shape_override is None:
        shape = None
    return _records_to_sample(values, shape)


def _load_pgm(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            arr = np.asarray(img, dtype=np.float64)
    except OSError as err:
        raise DataFormatError(f"{path}: cannot read image ({err})") from err
    if arr.ndim != 2:
        raise DataFormatError(f"{path}: expected a single-channel grayscale image")
    full = 65535.0 if arr.max() > 255.0 else 255.0
    return arr / full


def load_image_grid(directory, shape=None) -> LabeledDataset:
    """One class per subdirectory of equally sized grayscale images."""
    directory = Path(directory)
    if not directory.is_dir():
        raise DataFormatError(f"{directory}: not a directory")
    labels = sorted(p.name for p in directory.iterdir() if p.is_dir())
    if not labels:
        raise DataFormatError(f"{directory}: no class subdirectories")
    classes = []
    expected = None
    for lab in labels:
        files = sorted((directory / lab).glob("*.pgm"))
        if not files:
            raise DataFormatError(f"{directory / lab}: no .pgm images")
        images = []
        for f in files:
            arr = _load_pgm(f)
            if expected is None:
                expected = arr.shape
            elif arr.shape != expected:
                raise DataFormatError(
                    f"{f}: image size {arr.shape} differs from {expected}"
                )
            images.append(arr)
        classes.append(TensorSample.from_array(np.stack(images)))
    if shape is not None and tuple(shape) != expected:
        raise DimensionError(
            f"declared shape {tuple(shape)} does not match image size {expected}"
        )
    return LabeledDataset(labels=tuple(labels), classes=tuple(classes))


def iris_csv_text() -> str:
    """The bundled 150-flower measurement table as CSV text."""
    return (
        resources.files("tensordepth").joinpath("data/iris.csv").read_text()
    )


def load_iris() -> LabeledDataset:
    """Bundled iris data: three classes of 50 four-feature vectors."""
    ref = resources.files("tensordepth").joinpath("data/iris.csv")
    with resources.as_file(ref) as path:
        values, labels, _ = _read_csv(Path(path), "species")
    return _grouped(values, labels, None)
