"""Training classifiers under label noise with two concurrently trained models.

The subpackages are plain numpy: ``nn`` (MLP engine), ``losses``,
``schedules``, ``noise``, ``trainer``, ``probe``, ``data``, ``io``,
``config`` and ``cli``.
"""
from .data import LabeledDataset, generate_blobs, make_dataset
from .losses import LossParams, ensemble_predict, nct_loss, one_hot, softmax_with_temperature
from .noise import NoiseSpec, corrupt, target_variability_batch
from .probe import ProbeConfig, extract_frozen_features, fit_random_binary_labels
from .schedules import ScheduleParams, alpha_at_epoch, lr_at_epoch, variability_rate_at_epoch
from .trainer import (
    TrainConfig,
    evaluate,
    memorization_metrics,
    summarize,
    train,
    train_dml,
    train_nct,
    train_standard,
)

__version__ = "0.1.0"
