"""Labeled datasets and the Gaussian-blob generator."""
from dataclasses import dataclass, replace

import numpy as np

from .errors import ParameterError
from .rng import make_stream


@dataclass(frozen=True)
class LabeledDataset:
    """Features plus working labels and the hidden clean labels.

    ``labels`` may be corrupted; ``clean_labels`` is ground truth and is only
    read by evaluation and memorization tracking.  ``assumed_clean`` marks
    data whose file carried no clean-label column.
    """

    features: np.ndarray
    labels: np.ndarray
    clean_labels: np.ndarray
    num_classes: int
    assumed_clean: bool = False

    def __post_init__(self):
        n = len(self.features)
        if np.ndim(self.features) != 2:
            raise ParameterError("features must be a 2-D array (N x d)")
        if len(self.labels) != n or len(self.clean_labels) != n:
            raise ParameterError("labels, clean_labels and features must have equal length")
        if self.num_classes < 2:
            raise ParameterError("need at least two classes")
        for arr in (self.labels, self.clean_labels):
            if n and (arr.min() < 0 or arr.max() >= self.num_classes):
                raise ParameterError(f"label values must lie in [0, {self.num_classes})")

    def __len__(self):
        return len(self.labels)

    @property
    def dim(self):
        return self.features.shape[1]

    @property
    def noisy_mask(self):
        return self.labels != self.clean_labels

    def noise_rate(self):
        return float(self.noisy_mask.mean()) if len(self) else 0.0

    def with_labels(self, labels):
        return replace(self, labels=np.asarray(labels, dtype=np.int64).copy())

    def subset(self, index):
        return LabeledDataset(
            self.features[index],
            self.labels[index],
            self.clean_labels[index],
            self.num_classes,
            self.assumed_clean,
        )

    def equals(self, other):
        return (
            self.num_classes == other.num_classes
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.clean_labels, other.clean_labels)
        )


def make_dataset(features, labels, num_classes=None, clean_labels=None):
    labels = np.asarray(labels, dtype=np.int64)
    if num_classes is None:
        num_classes = int(labels.max()) + 1
    clean = labels.copy() if clean_labels is None else np.asarray(clean_labels, dtype=np.int64)
    return LabeledDataset(np.asarray(features, dtype=np.float64), labels.copy(), clean, num_classes)


def class_means(d, num_classes, separation):
    """Cluster centres whose neighbours sit ``separation`` apart.

    Two classes: +-separation/2 on the first axis.  More classes: a regular
    polygon in the first two axes (a line when d == 1).
    """
    means = np.zeros((num_classes, d))
    if d == 1:
        means[:, 0] = (np.arange(num_classes) - (num_classes - 1) / 2) * separation
        return means
    radius = separation / (2 * np.sin(np.pi / num_classes))
    angles = 2 * np.pi * np.arange(num_classes) / num_classes
    means[:, 0] = radius * np.cos(angles)
    means[:, 1] = radius * np.sin(angles)
    return means


def generate_blobs(n, d, num_classes, separation, seed):
    """Balanced unit-variance Gaussian clusters, returned in shuffled order."""
    if n < num_classes or d < 1 or num_classes < 2:
        raise ParameterError(f"invalid sizes n={n}, d={d}, C={num_classes}")
    if separation < 0:
        raise ParameterError("separation must be nonnegative")
    rng = make_stream(seed, "blobs")
    labels = np.arange(n) % num_classes
    labels = labels[rng.permutation(n)]
    x = rng.standard_normal((n, d)) + class_means(d, num_classes, separation)[labels]
    return LabeledDataset(x, labels.astype(np.int64), labels.astype(np.int64).copy(), num_classes)
