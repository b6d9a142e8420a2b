"""Softmax, cross-entropy, KL mimicry and the combined two-model objective.

All functions work along the last axis, so they accept a single vector of
class scores or a batch of them.
"""
from dataclasses import dataclass

import numpy as np

from .errors import LabelError, ParameterError, ShapeError

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class LossParams:
    tau: float = 4.0
    alpha: float = 0.0

    def __post_init__(self):
        if not self.tau >= 1:
            raise ParameterError(f"temperature must be >= 1, got {self.tau}")
        if not 0 <= self.alpha <= 1:
            raise ParameterError(f"alpha must lie in [0, 1], got {self.alpha}")


def log_softmax(z, tau=1.0):
    if not tau > 0:
        raise ParameterError(f"temperature must be positive, got {tau}")
    s = np.asarray(z, dtype=float) / tau
    s = s - np.max(s, axis=-1, keepdims=True)
    return s - np.log(np.sum(np.exp(s), axis=-1, keepdims=True))


def softmax_with_temperature(z, tau=1.0):
    """softmax(z / tau), max-subtracted."""
    if not tau > 0:
        raise ParameterError(f"temperature must be positive, got {tau}")
    s = np.asarray(z, dtype=float) / tau
    e = np.exp(s - np.max(s, axis=-1, keepdims=True))
    return e / np.sum(e, axis=-1, keepdims=True)


def one_hot(labels, num_classes):
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise LabelError(f"labels must lie in [0, {num_classes})")
    out = np.zeros(labels.shape + (num_classes,))
    np.put_along_axis(out, labels[..., None], 1.0, axis=-1)
    return out


def _check_one_hot(target):
    t = np.asarray(target, dtype=float)
    if not (np.all((t == 0) | (t == 1)) and np.all(t.sum(axis=-1) == 1)):
        raise LabelError("target is not a one-hot vector")
    return t


def cross_entropy(pred, target):
    """-log pred[true class], with the probability clamped at 1e-12."""
    p = np.asarray(pred, dtype=float)
    t = _check_one_hot(target)
    if p.shape != t.shape:
        raise ShapeError(f"prediction shape {p.shape} != target shape {t.shape}")
    picked = np.sum(p * t, axis=-1)
    return -np.log(np.maximum(picked, PROB_FLOOR))


def kl_divergence(p, q):
    """KL(p || q) = sum p log(p / q); 0 log 0 = 0 and q clamped at 1e-12."""
    p = np.asarray(p, dtype=float)
    q = np.maximum(np.asarray(q, dtype=float), PROB_FLOOR)
    safe_p = np.where(p > 0, p, 1.0)
    return np.sum(np.where(p > 0, p * (np.log(safe_p) - np.log(q)), 0.0), axis=-1)


def nct_loss(own_logits, peer_probs, targets, params):
    """Supervised + mimicry objective for one model of the pair.

        loss = (1 - alpha) * mean CE(softmax(z), y)
               + alpha * tau^2 * mean KL(peer || softmax(z / tau))

    ``peer_probs`` must already be softened at ``params.tau`` and is treated
    as a constant.  Returns ``(loss, dloss/dz)``.
    """
    z = np.asarray(own_logits, dtype=float)
    p = np.asarray(peer_probs, dtype=float)
    y = np.asarray(targets, dtype=float)
    if z.ndim != 2 or p.shape != z.shape or y.shape != z.shape:
        raise ShapeError(f"logits {z.shape}, peer {p.shape} and targets {y.shape} must agree (b x C)")
    b = z.shape[0]
    alpha, tau = params.alpha, params.tau

    log_own = log_softmax(z)
    ce = -np.sum(y * log_own, axis=1).mean()
    d_ce = (np.exp(log_own) - y) / b

    log_soft = log_softmax(z, tau)
    kl = kl_divergence(p, np.exp(log_soft)).mean()
    # d/dz KL(p || softmax(z/tau)) = (softmax(z/tau) - p) / tau
    d_kl = (np.exp(log_soft) - p) / (tau * b)

    loss = (1 - alpha) * ce + alpha * tau**2 * kl
    grad = (1 - alpha) * d_ce + alpha * tau**2 * d_kl
    return float(loss), grad


def cross_entropy_loss(logits, targets):
    """Mean CE over a batch from raw logits.  Returns ``(loss, dloss/dz)``."""
    z = np.asarray(logits, dtype=float)
    y = np.asarray(targets, dtype=float)
    if z.ndim != 2 or y.shape != z.shape:
        raise ShapeError(f"logits {z.shape} and targets {y.shape} must agree (b x C)")
    log_p = log_softmax(z)
    loss = -np.sum(y * log_p, axis=1).mean()
    return float(loss), (np.exp(log_p) - y) / z.shape[0]


def ensemble_predict(z1, z2):
    """softmax of the averaged logits of the two models."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if z1.shape != z2.shape:
        raise ShapeError(f"logit shapes differ: {z1.shape} vs {z2.shape}")
    return softmax_with_temperature((z1 + z2) / 2, 1.0)
