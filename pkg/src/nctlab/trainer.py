"""Concurrent two-model training, its ablations and the single-model baseline.

Both models see the same shuffled mini-batches.  Per epoch the mimicry
weight and the target-variability rate are evaluated once and held for all
batches of that epoch.  Within a step each model's peer distribution is
computed before either model is updated and is treated as a constant.
"""
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import nn
from .errors import ParameterError, TrainingError
from .losses import (
    LossParams,
    cross_entropy_loss,
    ensemble_predict,
    log_softmax,
    nct_loss,
    one_hot,
    softmax_with_temperature,
)
from .noise import target_variability_batch
from .rng import make_stream
from .schedules import ScheduleParams, alpha_at_epoch, lr_at_epoch, variability_rate_at_epoch

METHODS = ("nct", "nct_no_en", "nct_no_tv", "dml", "standard")
DUAL_METHODS = ("nct", "nct_no_en", "nct_no_tv", "dml")


@dataclass(frozen=True)
class TrainConfig:
    method: str = "nct"
    layer_dims: tuple = (2, 32, 32, 2)
    batch_size: int = 128
    schedule: ScheduleParams = field(default_factory=ScheduleParams)
    tau: float = 4.0
    dml_alpha: float = 0.5
    momentum: float = 0.9
    weight_decay: float = 1e-5
    seed_master: int = 0
    eval_every: int = 1
    dtype: str = "float64"
    init_streams: tuple = ("init-model-1", "init-model-2")
    tv_streams: tuple = ("tv-model-1", "tv-model-2")
    shuffle_stream: str = "data-shuffle"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.batch_size < 1 or self.eval_every < 1:
            raise ParameterError("batch_size and eval_every must be >= 1")
        if not 0 <= self.momentum < 1 or self.weight_decay < 0:
            raise ParameterError("need 0 <= momentum < 1 and weight_decay >= 0")
        if self.dtype not in ("float64", "float32"):
            raise ParameterError("dtype must be float64 or float32")
        LossParams(self.tau, self.dml_alpha)


@dataclass
class DualModelState:
    model1: nn.MlpModel
    model2: nn.MlpModel
    opt1: nn.SgdState
    opt2: nn.SgdState
    epoch: int = 0


@dataclass
class MemorizationMetrics:
    clean_loss: float
    clean_acc: float
    noisy_loss: float = None
    noisy_acc: float = None
    noisy_count: int = 0


@dataclass
class EpochMetrics:
    epoch: int
    alpha_d: float
    r_d: float
    lr: float
    train_loss: list
    test_acc: float
    test_acc_ensemble: float
    test_acc_models: list
    train_acc_clean_subset: float
    train_acc_noisy_subset: float
    train_loss_clean_subset: float
    train_loss_noisy_subset: float

    def to_record(self):
        return {"record_type": "epoch", **asdict(self)}


# -- inference ---------------------------------------------------------------


def predict_logits(models, x, mode="ensemble"):
    """Log-probabilities used for prediction: the ensemble of averaged
    logits, or the first model alone."""
    if mode == "single" or len(models) == 1:
        z, _ = nn.forward(models[0], x)
        return log_softmax(z)
    if mode != "ensemble":
        raise ParameterError(f"unknown inference mode {mode!r}")
    z1, _ = nn.forward(models[0], x)
    z2, _ = nn.forward(models[1], x)
    return np.log(np.maximum(ensemble_predict(z1, z2), 1e-300))


def evaluate(models, test, mode="ensemble"):
    """Top-1 accuracy against the clean labels."""
    if len(test) == 0:
        raise ParameterError("cannot evaluate on an empty test set")
    logp = predict_logits(models, test.features, mode)
    return float(np.mean(np.argmax(logp, axis=1) == test.clean_labels))


def memorization_metrics(models, ds, mode="ensemble"):
    """Mean CE and accuracy w.r.t. the working labels, split by whether the
    label agrees with the clean one.  The noisy fields stay ``None`` when no
    label is noisy."""
    logp = predict_logits(models, ds.features, mode)
    idx = np.arange(len(ds))
    loss = -logp[idx, ds.labels]
    hit = np.argmax(logp, axis=1) == ds.labels
    noisy = ds.noisy_mask
    clean = ~noisy
    out = MemorizationMetrics(
        clean_loss=float(loss[clean].mean()) if clean.any() else None,
        clean_acc=float(hit[clean].mean()) if clean.any() else None,
        noisy_count=int(noisy.sum()),
    )
    if noisy.any():
        out.noisy_loss = float(loss[noisy].mean())
        out.noisy_acc = float(hit[noisy].mean())
    return out


def summarize(metrics):
    """Best (over evaluated epochs) and last test accuracy."""
    if not metrics:
        return {"best_test_acc": None, "best_epoch": None, "last_test_acc": None}
    best = max(metrics, key=lambda m: m.test_acc)
    return {
        "best_test_acc": best.test_acc,
        "best_epoch": best.epoch,
        "last_test_acc": metrics[-1].test_acc,
    }


# -- training loops ------------------------------------------------------------


def _check_data(ds, test, cfg):
    if ds.num_classes != cfg.layer_dims[-1] or test.num_classes != ds.num_classes:
        raise ParameterError(
            f"class count mismatch: train {ds.num_classes}, test {test.num_classes}, "
            f"model output {cfg.layer_dims[-1]}"
        )
    if ds.dim != cfg.layer_dims[0] or test.dim != cfg.layer_dims[0]:
        raise ParameterError(f"feature width does not match input dim {cfg.layer_dims[0]}")


def _batches(n, batch_size, rng):
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def _is_eval_epoch(e, cfg):
    return e % cfg.eval_every == 0 or e == cfg.schedule.total_epochs


def _epoch_metrics(e, alpha_d, r_d, lr, losses, models, ds, test, mode):
    mem = memorization_metrics(models, ds, mode)
    per_model = [evaluate([m], test, "single") for m in models]
    ens = evaluate(models, test, "ensemble") if len(models) == 2 else None
    return EpochMetrics(
        epoch=e,
        alpha_d=alpha_d,
        r_d=r_d,
        lr=lr,
        train_loss=losses,
        test_acc=evaluate(models, test, mode),
        test_acc_ensemble=ens,
        test_acc_models=per_model,
        train_acc_clean_subset=mem.clean_acc,
        train_acc_noisy_subset=mem.noisy_acc,
        train_loss_clean_subset=mem.clean_loss,
        train_loss_noisy_subset=mem.noisy_loss,
    )


def _train_pair(ds, test, cfg, alpha_fn, rate_fn, use_tv, mode, callback=None):
    _check_data(ds, test, cfg)
    sched = cfg.schedule
    dtype = np.dtype(cfg.dtype)
    m1 = nn.init_model(cfg.layer_dims, make_stream(cfg.seed_master, cfg.init_streams[0]), dtype)
    m2 = nn.init_model(cfg.layer_dims, make_stream(cfg.seed_master, cfg.init_streams[1]), dtype)
    state = DualModelState(
        m1,
        m2,
        nn.sgd_init(m1, sched.lr_initial, cfg.momentum, cfg.weight_decay),
        nn.sgd_init(m2, sched.lr_initial, cfg.momentum, cfg.weight_decay),
    )
    shuffle = make_stream(cfg.seed_master, cfg.shuffle_stream)
    tv = (make_stream(cfg.seed_master, cfg.tv_streams[0]), make_stream(cfg.seed_master, cfg.tv_streams[1]))
    C = ds.num_classes
    x_all = ds.features.astype(dtype, copy=False)
    metrics = []

    for e in range(1, sched.total_epochs + 1):
        alpha_d = alpha_fn(e)
        r_d = rate_fn(e) if use_tv else 0.0
        lr = lr_at_epoch(e, sched)
        params = LossParams(cfg.tau, alpha_d)
        sums, count = [0.0, 0.0], 0
        for k, idx in enumerate(_batches(len(ds), cfg.batch_size, shuffle)):
            x, y = x_all[idx], ds.labels[idx]
            if use_tv:
                y1, y2 = target_variability_batch(y, r_d, C, tv)
            else:
                y1 = y2 = y
            z1, c1 = nn.forward(state.model1, x)
            z2, c2 = nn.forward(state.model2, x)
            p1 = softmax_with_temperature(z1, cfg.tau)
            p2 = softmax_with_temperature(z2, cfg.tau)
            l1, g1 = nct_loss(z1, p2, one_hot(y1, C), params)
            l2, g2 = nct_loss(z2, p1, one_hot(y2, C), params)
            if not (math.isfinite(l1) and math.isfinite(l2)):
                raise TrainingError(f"non-finite loss at epoch {e}, batch {k}", epoch=e, batch=k)
            grads1 = nn.backward(state.model1, c1, g1)
            grads2 = nn.backward(state.model2, c2, g2)
            state.model1, state.opt1 = nn.sgd_step(state.model1, grads1, state.opt1, lr)
            state.model2, state.opt2 = nn.sgd_step(state.model2, grads2, state.opt2, lr)
            sums[0] += l1 * len(idx)
            sums[1] += l2 * len(idx)
            count += len(idx)
        state.epoch = e
        if _is_eval_epoch(e, cfg):
            losses = [sums[0] / count, sums[1] / count]
            em = _epoch_metrics(e, alpha_d, r_d, lr, losses, [state.model1, state.model2], ds, test, mode)
            metrics.append(em)
            if callback is not None:
                callback(em)
    return state, metrics


def train_nct(ds, test, cfg, callback=None):
    """Full method and its two ablations (no ensemble / no target variability)."""
    if cfg.method not in ("nct", "nct_no_en", "nct_no_tv"):
        raise ParameterError(f"train_nct cannot run method {cfg.method!r}")
    sched = cfg.schedule
    use_tv = cfg.method != "nct_no_tv"
    mode = "single" if cfg.method == "nct_no_en" else "ensemble"
    return _train_pair(
        ds,
        test,
        cfg,
        alpha_fn=lambda e: alpha_at_epoch(e, sched),
        rate_fn=lambda e: variability_rate_at_epoch(e, sched),
        use_tv=use_tv,
        mode=mode,
        callback=callback,
    )


def train_dml(ds, test, cfg, callback=None):
    """Mutual learning: fixed ``cfg.dml_alpha``, no target variability."""
    if cfg.method != "dml":
        raise ParameterError(f"train_dml cannot run method {cfg.method!r}")
    return _train_pair(
        ds,
        test,
        cfg,
        alpha_fn=lambda e: cfg.dml_alpha,
        rate_fn=lambda e: 0.0,
        use_tv=False,
        mode="ensemble",
        callback=callback,
    )


def train_standard(ds, test, cfg, callback=None):
    """Single model, plain cross-entropy.  Uses the first init stream and
    the same shuffle stream as the paired methods."""
    if cfg.method != "standard":
        raise ParameterError(f"train_standard cannot run method {cfg.method!r}")
    _check_data(ds, test, cfg)
    sched = cfg.schedule
    dtype = np.dtype(cfg.dtype)
    model = nn.init_model(cfg.layer_dims, make_stream(cfg.seed_master, cfg.init_streams[0]), dtype)
    opt = nn.sgd_init(model, sched.lr_initial, cfg.momentum, cfg.weight_decay)
    shuffle = make_stream(cfg.seed_master, cfg.shuffle_stream)
    C = ds.num_classes
    x_all = ds.features.astype(dtype, copy=False)
    metrics = []
    for e in range(1, sched.total_epochs + 1):
        lr = lr_at_epoch(e, sched)
        total, count = 0.0, 0
        for k, idx in enumerate(_batches(len(ds), cfg.batch_size, shuffle)):
            z, cache = nn.forward(model, x_all[idx])
            loss, g = cross_entropy_loss(z, one_hot(ds.labels[idx], C))
            if not math.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {e}, batch {k}", epoch=e, batch=k)
            model, opt = nn.sgd_step(model, nn.backward(model, cache, g), opt, lr)
            total += loss * len(idx)
            count += len(idx)
        if _is_eval_epoch(e, cfg):
            em = _epoch_metrics(e, 0.0, 0.0, lr, [total / count], [model], ds, test, "single")
            metrics.append(em)
            if callback is not None:
                callback(em)
    return model, metrics


def train(ds, test, cfg, callback=None):
    """Dispatch on ``cfg.method``; returns ``(models, metrics)``."""
    if cfg.method == "standard":
        model, metrics = train_standard(ds, test, cfg, callback)
        return [model], metrics
    runner = train_dml if cfg.method == "dml" else train_nct
    state, metrics = runner(ds, test, cfg, callback)
    return [state.model1, state.model2], metrics


def inference_mode(method):
    return "single" if method in ("standard", "nct_no_en") else "ensemble"
