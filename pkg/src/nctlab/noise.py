"""Synthetic label corruption and per-batch target variability."""
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateClassesError, LabelError, ParameterError
from .rng import make_stream

NOISE_KINDS = ("symmetric_inclusive", "symmetric_exclusive", "pair_flip")


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    rate: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ParameterError(f"unknown noise kind {self.kind!r}; expected one of {NOISE_KINDS}")
        _check_rate(self.rate)


@dataclass
class BatchLabels:
    original: np.ndarray
    perturbed: np.ndarray
    flip_mask: np.ndarray


def _check_rate(rate):
    if not 0 <= rate <= 1:
        raise ParameterError(f"noise rate must lie in [0, 1], got {rate}")


def _require_clean(ds):
    if not np.array_equal(ds.labels, ds.clean_labels):
        raise LabelError("dataset is already corrupted; corruption can only be applied once")


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return make_stream(seed, "corruption")


def corrupt_symmetric_inclusive(ds, rate, seed):
    """Each sample, with probability ``rate``, gets a label drawn uniformly
    from all classes (so the true label can come back)."""
    _check_rate(rate)
    _require_clean(ds)
    rng = _rng(seed)
    n = len(ds)
    selected = rng.random(n) < rate
    resampled = rng.integers(0, ds.num_classes, size=n)
    return ds.with_labels(np.where(selected, resampled, ds.clean_labels))


def corrupt_symmetric_exclusive(ds, rate, seed):
    """As the inclusive variant but the replacement is drawn from the other
    C - 1 classes, so every selected label changes."""
    _check_rate(rate)
    if ds.num_classes < 2:
        raise DegenerateClassesError("exclusive corruption needs at least two classes")
    _require_clean(ds)
    rng = _rng(seed)
    n = len(ds)
    selected = rng.random(n) < rate
    other = (ds.clean_labels + rng.integers(1, ds.num_classes, size=n)) % ds.num_classes
    return ds.with_labels(np.where(selected, other, ds.clean_labels))


def corrupt_pair_flip(ds, rate, seed):
    """Each sample, with probability ``rate``, is relabelled i -> (i + 1) mod C."""
    _check_rate(rate)
    if rate > 0.5:
        warnings.warn(
            f"pair-flip rate {rate} > 0.5 makes the flipped class the majority", stacklevel=2
        )
    _require_clean(ds)
    rng = _rng(seed)
    selected = rng.random(len(ds)) < rate
    flipped = (ds.clean_labels + 1) % ds.num_classes
    return ds.with_labels(np.where(selected, flipped, ds.clean_labels))


_CORRUPTERS = {
    "symmetric_inclusive": corrupt_symmetric_inclusive,
    "symmetric_exclusive": corrupt_symmetric_exclusive,
    "pair_flip": corrupt_pair_flip,
}


def corrupt(ds, spec):
    return _CORRUPTERS[spec.kind](ds, spec.rate, spec.seed)


def expected_noise_fraction(kind, rate, num_classes):
    """Expected fraction of labels that end up different from the clean ones."""
    if kind == "symmetric_inclusive":
        return rate * (1 - 1 / num_classes)
    return rate


def vary_targets(y, rate, num_classes, rng):
    """Replace each label with probability ``rate`` by a different class,
    drawn uniformly from the other C - 1."""
    y = np.asarray(y, dtype=np.int64)
    mask = rng.random(y.shape[0]) < rate
    other = (y + rng.integers(1, num_classes, size=y.shape[0])) % num_classes
    return BatchLabels(y, np.where(mask, other, y), mask)


def target_variability_batch(y, rate, num_classes, streams):
    """Independently perturbed targets for the two models.

    ``streams`` holds one generator per model; each model's mask and
    replacement classes come only from its own stream.
    """
    if num_classes < 2:
        raise DegenerateClassesError("target variability needs at least two classes")
    if not 0 <= rate <= 1:
        raise ParameterError(f"variability rate must lie in [0, 1], got {rate}")
    s1, s2 = streams
    return vary_targets(y, rate, num_classes, s1).perturbed, vary_targets(y, rate, num_classes, s2).perturbed
