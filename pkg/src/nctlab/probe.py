"""Random-label probe on frozen representations.

A fresh MLP head is trained on fair-coin labels over the penultimate
features of a trained model.  The harder the coin flips are to fit, the
more the representation has compressed away sample-specific detail.
"""
from dataclasses import dataclass

import numpy as np

from . import nn
from .errors import InsufficientSamplesError, ParameterError, ProbeUnsupportedError
from .losses import cross_entropy_loss, one_hot
from .rng import make_stream


@dataclass(frozen=True)
class ProbeConfig:
    hidden_dims: tuple = (400, 200)
    num_samples: int = 1000
    probe_epochs: int = 200
    probe_lr: float = 0.01
    batch_size: int = 64
    seed: int = 0

    def __post_init__(self):
        if not self.hidden_dims:
            raise ParameterError("probe needs at least one hidden layer")
        if self.num_samples < 2 or self.num_samples % 2:
            raise ParameterError("num_samples must be a positive even number")
        if not self.probe_lr > 0 or self.probe_epochs < 0 or self.batch_size < 1:
            raise ParameterError("invalid probe optimisation settings")


def extract_frozen_features(model, ds):
    """Post-ReLU activations of the last hidden layer."""
    if model.num_layers < 2:
        raise ProbeUnsupportedError("model has no hidden layer to probe")
    x = np.asarray(getattr(ds, "features", ds), dtype=model.dtype)
    _, cache = nn.forward(model, x)
    return np.maximum(cache.preacts[-1], 0.0).copy()


def first_two_classes(ds, num_samples):
    """Indices of up to ``num_samples`` samples labelled 0 or 1 (clean labels), in dataset order."""
    idx = np.flatnonzero(ds.clean_labels < 2)
    return idx[:num_samples]


def fit_random_binary_labels(features, cfg):
    """Train the probe head on coin-flip labels; return the final training error."""
    feats = np.asarray(features, dtype=np.float64)
    n = len(feats)
    if n < 2 * cfg.batch_size:
        raise InsufficientSamplesError(f"{n} samples is fewer than two batches of {cfg.batch_size}")
    labels = make_stream(cfg.seed, "probe-labels").integers(0, 2, size=n)
    targets = one_hot(labels, 2)
    dims = (feats.shape[1], *cfg.hidden_dims, 2)
    head = nn.init_model(dims, make_stream(cfg.seed, "probe-init"))
    opt = nn.sgd_init(head, cfg.probe_lr, momentum=0.0, weight_decay=0.0)
    shuffle = make_stream(cfg.seed, "probe-shuffle")
    for _ in range(cfg.probe_epochs):
        order = shuffle.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            z, cache = nn.forward(head, feats[idx])
            _, g = cross_entropy_loss(z, targets[idx])
            head, opt = nn.sgd_step(head, nn.backward(head, cache, g), opt)
    z, _ = nn.forward(head, feats)
    return float(np.mean(np.argmax(z, axis=1) != labels))


def probe_model(model, ds, cfg):
    """Probe ``model`` on the first ``cfg.num_samples`` samples of classes 0 and 1."""
    idx = first_two_classes(ds, cfg.num_samples)
    features = extract_frozen_features(model, ds.subset(idx))
    return {
        "record_type": "probe",
        "num_samples": int(len(idx)),
        "feature_dim": int(features.shape[1]),
        "hidden_dims": list(cfg.hidden_dims),
        "probe_epochs": cfg.probe_epochs,
        "probe_lr": cfg.probe_lr,
        "seed": cfg.seed,
        "train_error": fit_random_binary_labels(features, cfg),
    }
