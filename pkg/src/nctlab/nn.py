"""A small deterministic MLP engine: ReLU hidden layers, manual backprop,
SGD with momentum and weight decay, and a finite-difference oracle.

Parameters are kept in a flat list ordered ``[W0, b0, W1, b1, ...]``;
gradients and momentum buffers use the same ordering.  Weights have shape
``(fan_in, fan_out)`` so a layer computes ``x @ W + b``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import CacheError, InvalidArchitectureError, NumericError, ShapeError


@dataclass
class MlpModel:
    layer_dims: tuple
    weights: list
    biases: list

    @property
    def num_layers(self):
        return len(self.weights)

    @property
    def dtype(self):
        return self.weights[0].dtype

    def parameters(self):
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def with_parameters(self, params):
        return MlpModel(tuple(self.layer_dims), list(params[0::2]), list(params[1::2]))

    def copy(self):
        return self.with_parameters([p.copy() for p in self.parameters()])

    def num_params(self):
        return num_params(self.layer_dims)


def num_params(layer_dims):
    return sum(a * b + b for a, b in zip(layer_dims[:-1], layer_dims[1:]))


def _check_dims(layer_dims):
    dims = list(layer_dims)
    if len(dims) < 2:
        raise InvalidArchitectureError(f"need at least input and output dims, got {dims}")
    if any(int(d) != d or d < 1 for d in dims):
        raise InvalidArchitectureError(f"layer dims must be positive integers, got {dims}")
    return tuple(int(d) for d in dims)


def init_model(layer_dims, rng, dtype=np.float64):
    """He-initialized MLP: W ~ N(0, 2/fan_in), b = 0.

    ``rng`` is a ``numpy.random.Generator``; the same generator state gives
    bit-identical parameters.
    """
    dims = _check_dims(layer_dims)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        w = rng.standard_normal((fan_in, fan_out)) * np.sqrt(2.0 / fan_in)
        weights.append(w.astype(dtype, copy=False))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return MlpModel(dims, weights, biases)


@dataclass
class ForwardCache:
    # inputs[i] is the input to layer i; preacts[i] the pre-ReLU output of hidden layer i
    inputs: list
    preacts: list
    params: list = field(repr=False)


def forward(model, batch):
    x = np.asarray(batch)
    if x.ndim != 2 or x.shape[1] != model.layer_dims[0]:
        raise ShapeError(f"expected batch of shape (b, {model.layer_dims[0]}), got {x.shape}")
    x = x.astype(model.dtype, copy=False)
    inputs, preacts = [], []
    last = model.num_layers - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        inputs.append(x)
        z = x @ w + b
        if i < last:
            preacts.append(z)
            x = np.maximum(z, 0.0)
        else:
            x = z
    return x, ForwardCache(inputs, preacts, model.weights)


def backward(model, cache, dlogits):
    """Backpropagate ``dlogits`` (gradient of the batch loss w.r.t. the logits).

    Returns gradients in ``model.parameters()`` order.  Mean-over-batch
    scaling is expected to be folded into ``dlogits`` already.
    """
    if cache.params is not model.weights:
        raise CacheError("cache was produced by a different model or parameter state")
    delta = np.asarray(dlogits, dtype=model.dtype)
    b = cache.inputs[0].shape[0]
    if delta.shape != (b, model.layer_dims[-1]):
        raise ShapeError(f"dlogits shape {delta.shape} does not match logits {(b, model.layer_dims[-1])}")
    grads = [None] * (2 * model.num_layers)
    for i in range(model.num_layers - 1, -1, -1):
        grads[2 * i] = cache.inputs[i].T @ delta
        grads[2 * i + 1] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (cache.preacts[i - 1] > 0)
    return grads


@dataclass
class SgdState:
    learning_rate: float
    momentum: float = 0.9
    weight_decay: float = 1e-5
    momentum_buffers: list = None

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning rate must be positive")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must lie in [0, 1)")
        if self.weight_decay < 0:
            raise ValueError("weight decay must be nonnegative")


def sgd_init(model, learning_rate, momentum=0.9, weight_decay=1e-5):
    buffers = [np.zeros_like(p) for p in model.parameters()]
    return SgdState(learning_rate, momentum, weight_decay, buffers)


def sgd_step(model, grads, state, learning_rate=None):
    """One SGD step with coupled weight decay.

        v <- momentum * v + (grad + weight_decay * param)
        param <- param - lr * v

    Weight decay applies to biases too.  Returns a new ``(model, state)``;
    the inputs are not modified.
    """
    lr = state.learning_rate if learning_rate is None else learning_rate
    params = model.parameters()
    if len(grads) != len(params):
        raise ShapeError(f"expected {len(params)} gradient tensors, got {len(grads)}")
    buffers = state.momentum_buffers
    if buffers is None:
        buffers = [np.zeros_like(p) for p in params]
    new_params, new_buffers = [], []
    for k, (p, g, v) in enumerate(zip(params, grads, buffers)):
        if g.shape != p.shape:
            raise ShapeError(f"gradient {k} has shape {g.shape}, parameter has {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in layer {k // 2}", layer=k // 2)
        d = g + state.weight_decay * p if state.weight_decay else g
        v = state.momentum * v + d
        new_buffers.append(v)
        new_params.append(p - lr * v)
    new_state = SgdState(state.learning_rate, state.momentum, state.weight_decay, new_buffers)
    return model.with_parameters(new_params), new_state


def finite_difference_gradient(model, loss_fn, eps=1e-5):
    """Central-difference gradient of ``loss_fn(model) -> float``.

    O(num_params) loss evaluations; meant as a test oracle on small nets.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    params = [p.astype(np.float64) for p in model.parameters()]
    grads = []
    for k, p in enumerate(params):
        g = np.zeros_like(p)
        flat = p.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + eps
            up = loss_fn(model.with_parameters(params))
            flat[j] = orig - eps
            down = loss_fn(model.with_parameters(params))
            flat[j] = orig
            g.reshape(-1)[j] = (up - down) / (2 * eps)
        grads.append(g)
    return grads


def max_relative_error(grads_a, grads_b):
    """Largest per-tensor ``max|a - b| / max(max|a|, max|b|)`` over a gradient list."""
    worst = 0.0
    for a, b in zip(grads_a, grads_b):
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
        if scale == 0:
            continue
        worst = max(worst, float(np.max(np.abs(a - b)) / scale))
    return worst
