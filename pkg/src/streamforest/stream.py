"""Labeled data-point streams.

Sources: CSV ingestion, windowed sensor-feature extraction, synthetic
radial-basis generation with optional centroid drift, plus label-shift
drift injection and seeded shuffling.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass
class DataPoint:
    """One stream element: a fixed-length feature vector and its label."""

    features: np.ndarray
    label: int


@dataclass(frozen=True)
class StreamSpec:
    feature_count: int
    label_count: int
    length: int

    def __post_init__(self):
        if self.feature_count < 1:
            raise ValueError("feature_count must be >= 1")
        if self.label_count < 2:
            raise ValueError("label_count must be >= 2")
        if self.length < 1:
            raise ValueError("length must be >= 1")


@dataclass(frozen=True)
class RbfGeneratorConfig:
    centroid_count: int
    feature_count: int
    label_count: int
    drift_speed: float = 0.0
    seed: int = 0


class StreamFormatError(ValueError):
    """Malformed input data (ragged rows, non-numeric fields, bad labels)."""


def csv_load(path, label_column: int = -1,
             has_header: bool = False) -> tuple[list[DataPoint], StreamSpec]:
    """Read comma-separated points with one integer label column.

    Features are decimal reals in every non-label column. The label
    count is inferred as max label + 1. Rows are numbered from 1 by
    file line (header included) in error messages.
    """
    rows: list[tuple[int, list[str]]] = []
    width = None
    with open(path, newline="") as handle:
        for line_number, record in enumerate(csv.reader(handle), start=1):
            if has_header and line_number == 1:
                continue
            if width is None:
                width = len(record)
                if width < 2:
                    raise StreamFormatError(
                        f"row {line_number}: need at least one feature column and a label"
                    )
            elif len(record) != width:
                raise StreamFormatError(
                    f"row {line_number}: expected {width} columns, got {len(record)}"
                )
            rows.append((line_number, record))
    if not rows:
        raise StreamFormatError(f"no data rows in {path}")
    label_index = label_column if label_column >= 0 else width + label_column
    if not 0 <= label_index < width:
        raise ValueError(f"label column {label_column} out of range for {width} columns")

    points: list[DataPoint] = []
    max_label = 0
    for line_number, record in rows:
        raw_label = record[label_index]
        try:
            label = int(raw_label)
        except ValueError:
            raise StreamFormatError(
                f"row {line_number}: label {raw_label!r} is not an integer"
            ) from None
        if label < 0:
            raise StreamFormatError(f"row {line_number}: negative label {label}")
        features = np.empty(width - 1, dtype=np.float64)
        position = 0
        for column, field in enumerate(record):
            if column == label_index:
                continue
            try:
                features[position] = float(field)
            except ValueError:
                raise StreamFormatError(
                    f"row {line_number}: feature {field!r} is not numeric"
                ) from None
            position += 1
        points.append(DataPoint(features, label))
        if label > max_label:
            max_label = label
    spec = StreamSpec(width - 1, max_label + 1, len(points))
    return points, spec


def window_features(samples: Sequence[DataPoint], window_size: int) -> list[DataPoint]:
    """Collapse raw sensor rows into per-window mean/std feature points.

    Each output covers ``window_size`` consecutive rows: features are
    the per-axis means followed by the per-axis population standard
    deviations, and the label is the window's most frequent one (ties
    go to the lowest label). A trailing partial window is discarded.
    """
    if window_size < 1:
        raise ValueError("window_size must be >= 1")
    samples = list(samples)
    if not samples:
        return []
    axes = samples[0].features.shape[0]
    for index, sample in enumerate(samples):
        if sample.features.shape[0] != axes:
            raise ValueError(f"sample {index} has {sample.features.shape[0]} axes, expected {axes}")
    out: list[DataPoint] = []
    for start in range(0, len(samples) - window_size + 1, window_size):
        chunk = samples[start:start + window_size]
        data = np.stack([sample.features for sample in chunk])
        means = data.mean(axis=0)
        stds = data.std(axis=0)
        labels = np.array([sample.label for sample in chunk])
        label = int(np.bincount(labels).argmax())
        out.append(DataPoint(np.concatenate([means, stds]), label))
    return out


class RbfStream:
    """Synthetic stream drawn from randomly placed labeled centroids.

    Centers are uniform in the unit box, radii uniform in
    [0, ``CENTROID_RADIUS_MAX``], and labels are assigned round-robin.
    Each point picks a centroid uniformly and lands a folded-gaussian
    distance away along a random unit direction. With a positive drift
    speed every center moves that far along its own fixed direction
    after each emitted point, bouncing off the unit box walls.
    """

    CENTROID_RADIUS_MAX = 0.1

    def __init__(self, config: RbfGeneratorConfig):
        if config.centroid_count < 1:
            raise ValueError("centroid_count must be >= 1")
        if config.feature_count < 1:
            raise ValueError("feature_count must be >= 1")
        if config.label_count < 2:
            raise ValueError("label_count must be >= 2")
        if config.drift_speed < 0.0:
            raise ValueError("drift_speed must be >= 0")
        self.config = config
        rng = np.random.default_rng(config.seed)
        self._rng = rng
        count = config.centroid_count
        self.centers = rng.uniform(0.0, 1.0, (count, config.feature_count))
        self.radii = rng.uniform(0.0, self.CENTROID_RADIUS_MAX, count)
        self.labels = np.arange(count, dtype=np.int64) % config.label_count
        directions = rng.normal(size=(count, config.feature_count))
        norms = np.linalg.norm(directions, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        self.drift_directions = directions / norms

    def take(self, n: int) -> list[DataPoint]:
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = self._rng
        config = self.config
        drifting = config.drift_speed > 0.0
        points: list[DataPoint] = []
        for _ in range(n):
            centroid = int(rng.integers(config.centroid_count))
            direction = rng.normal(size=config.feature_count)
            norm = float(np.linalg.norm(direction))
            if norm == 0.0:
                norm = 1.0
            distance = abs(float(rng.normal())) * self.radii[centroid]
            features = self.centers[centroid] + direction * (distance / norm)
            points.append(DataPoint(features, int(self.labels[centroid])))
            if drifting:
                self._advance()
        return points

    def _advance(self) -> None:
        self.centers += self.config.drift_speed * self.drift_directions
        while True:
            over = self.centers > 1.0
            under = self.centers < 0.0
            if not (over.any() or under.any()):
                break
            self.centers[over] = 2.0 - self.centers[over]
            self.centers[under] = -self.centers[under]
            flipped = over | under
            self.drift_directions[flipped] *= -1.0


def rbf_generate(config: RbfGeneratorConfig, n: int) -> list[DataPoint]:
    """Deterministic sequence of ``n`` points from a fresh generator."""
    return RbfStream(config).take(n)


def inject_label_drift(points: Sequence[DataPoint], label_count: int,
                       shift: int) -> list[DataPoint]:
    """Shift every label in the second half of the stream, modulo L.

    The split point is floor(n / 2); features are untouched.
    """
    if not 1 <= shift < label_count:
        raise ValueError("shift must satisfy 1 <= shift < label_count")
    half = len(points) // 2
    out = list(points[:half])
    for point in points[half:]:
        out.append(DataPoint(point.features, (point.label + shift) % label_count))
    return out


def shuffle(points: Sequence[DataPoint], seed: int) -> list[DataPoint]:
    """Seeded Fisher-Yates permutation of the stream."""
    out = list(points)
    rng = np.random.default_rng(seed)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        out[i], out[j] = out[j], out[i]
    return out
