"""Finite qualitative scales, possibility distributions and the optimistic Sugeno aggregate.

Levels are plain integers: the index of a label inside its scale. All order
operations (min, max, comparison, order reversal) act on indices, so they are
exact; the numeric labels are only carried along for display and I/O.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InvalidScaleError, ModelValidationError

Level = int


@dataclass(frozen=True)
class QualitativeScale:
    """A finite, totally ordered set of labels ``0 = l_0 < l_1 < ... < l_k = 1``."""

    labels: tuple[float, ...]

    def __post_init__(self):
        if len(self.labels) < 2:
            raise InvalidScaleError("a scale needs at least two levels")
        if any(b <= a for a, b in zip(self.labels, self.labels[1:])):
            raise InvalidScaleError(f"labels must be strictly increasing: {self.labels}")
        if self.labels[0] != 0.0 or self.labels[-1] != 1.0:
            raise InvalidScaleError("a scale must start at 0 and end at 1")

    @property
    def k(self) -> int:
        return len(self.labels) - 1

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def bottom(self) -> Level:
        return 0

    @property
    def top(self) -> Level:
        return self.k

    def reverse(self, level):
        """Order-reversing involution; works elementwise on integer arrays too."""
        return self.k - level

    def label(self, level: Level) -> float:
        return self.labels[level]

    def index_of(self, label: float) -> Level:
        """Exact lookup of a label; raises ``KeyError`` when the label is not a member."""
        try:
            return self.labels.index(float(label))
        except ValueError:
            raise KeyError(label) from None

    def floor(self, x: float) -> Level:
        """Greatest level whose label is <= ``x``."""
        return int(np.searchsorted(self.labels, x, side="right")) - 1

    def to_labels(self, levels) -> np.ndarray:
        return np.asarray(self.labels)[np.asarray(levels)]

    def __len__(self):
        return len(self.labels)


def make_scale(labels: Iterable[float]) -> QualitativeScale:
    """Build a scale from arbitrary labels in [0, 1]: dedup, sort, force 0 and 1 in."""
    values = [float(x) for x in labels]
    if not values:
        raise InvalidScaleError("no labels given")
    bad = [x for x in values if not 0.0 <= x <= 1.0]
    if bad:
        raise InvalidScaleError(f"labels outside [0, 1]: {bad}")
    return QualitativeScale(tuple(sorted(set(values) | {0.0, 1.0})))


def uniform_scale(k: int) -> QualitativeScale:
    """The classical scale {0, 1/k, ..., 1}."""
    return make_scale(i / k for i in range(k + 1))


def order_reverse(scale: QualitativeScale, level: Level) -> Level:
    if not 0 <= level <= scale.k:
        raise ValueError(f"level {level} is not in a scale with k={scale.k}")
    return scale.k - level


def sugeno_optimistic(possibilities: Sequence[int], utilities: Sequence[int]) -> Level:
    """max_i min(possibilities[i], utilities[i])."""
    pi = np.asarray(possibilities, dtype=np.int64)
    mu = np.asarray(utilities, dtype=np.int64)
    if pi.shape != mu.shape or pi.ndim != 1:
        raise DimensionError(f"shape mismatch: {pi.shape} vs {mu.shape}")
    if pi.size == 0:
        raise DimensionError("empty sequences")
    return int(np.minimum(pi, mu).max())


def is_normalized(values, scale: QualitativeScale, axis=-1) -> np.ndarray:
    return np.asarray(values).max(axis=axis) == scale.top


def possibility_distribution(values: Sequence[int], scale: QualitativeScale) -> np.ndarray:
    """Validate a distribution of level indices and return it as a read-only array."""
    arr = np.array(values, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError("a possibility distribution is a non-empty 1-d sequence")
    if arr.min() < 0 or arr.max() > scale.k:
        raise ModelValidationError(f"levels out of range for k={scale.k}: {arr.tolist()}")
    if arr.max() != scale.top:
        raise ModelValidationError(f"distribution not normalized: {arr.tolist()}")
    arr.setflags(write=False)
    return arr


def check_rows_normalized(table: np.ndarray, scale: QualitativeScale, what: str, index_names):
    """Raise ``ModelValidationError`` naming the first row (last axis) whose max is not 1."""
    if table.min() < 0 or table.max() > scale.k:
        raise ModelValidationError(f"{what} table holds levels outside the scale")
    bad = np.argwhere(table.max(axis=-1) != scale.top)
    if len(bad):
        where = ", ".join(f"{n}={i}" for n, i in zip(index_names, bad[0]))
        raise ModelValidationError(f"{what} row ({where}) not normalized")


def frozen(a, dtype=np.int64) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr
