"""Epoch schedules: mimicry weight ramp-up, target-variability ramp-up and
step learning-rate decay.  Epochs are 1-indexed; epoch 0 is accepted as the
state before training.
"""
import math
from dataclasses import dataclass, replace

from .errors import DegenerateScheduleError, ParameterError


@dataclass(frozen=True)
class ScheduleParams:
    total_epochs: int = 200
    alpha_max: float = 0.9
    beta_mag: float = 0.65
    ramp_len: int = 180
    r_min: float = 0.0
    r_max: float = 0.5
    warmup: int = 1
    lr_initial: float = 0.02
    lr_decay_epoch: int = 180
    lr_decay_factor: float = 10.0

    def __post_init__(self):
        if self.total_epochs < 0:
            raise ParameterError("total_epochs must be nonnegative")
        if not 0 <= self.alpha_max <= 1:
            raise ParameterError("alpha_max must lie in [0, 1]")
        if not self.beta_mag > 0:
            raise ParameterError("beta_mag must be positive")
        if not 0 <= self.r_min <= self.r_max <= 1:
            raise ParameterError("need 0 <= r_min <= r_max <= 1")
        if self.ramp_len < 1 or self.ramp_len > max(self.total_epochs, 1):
            raise ParameterError("ramp_len must lie in [1, total_epochs]")
        # a zero-epoch run is allowed (nothing to schedule)
        if self.total_epochs > 0 and not 0 <= self.warmup < self.total_epochs:
            raise ParameterError("warmup must be smaller than total_epochs")
        if not self.lr_initial > 0 or self.lr_decay_epoch < 1 or not self.lr_decay_factor > 1:
            raise ParameterError("invalid learning-rate schedule")

    @classmethod
    def for_epochs(cls, total_epochs, **overrides):
        """Defaults with ramp and lr decay placed at 90% of the run."""
        at90 = max(1, int(round(0.9 * total_epochs)))
        kw = dict(total_epochs=total_epochs, ramp_len=at90, lr_decay_epoch=at90)
        kw.update(overrides)
        return cls(**kw)

    def replace(self, **changes):
        return replace(self, **changes)


def _check_epoch(e, p):
    if not 0 <= e <= p.total_epochs:
        raise ParameterError(f"epoch {e} outside [0, {p.total_epochs}]")


def alpha_at_epoch(e, p):
    """alpha_max * exp(-beta_mag * (1 - e/ramp_len)^2), held at alpha_max past the ramp."""
    _check_epoch(e, p)
    if e >= p.ramp_len:
        return p.alpha_max
    return p.alpha_max * math.exp(-p.beta_mag * (1.0 - e / p.ramp_len) ** 2)


def variability_rate_at_epoch(e, p):
    _check_epoch(e, p)
    span = p.total_epochs - p.warmup
    if span < 2:
        raise DegenerateScheduleError(f"total_epochs - warmup = {span}; the log ramp needs >= 2")
    if e <= p.warmup:
        return p.r_min
    if e == p.total_epochs:
        return p.r_max
    # the clamp keeps rounding from overshooting the exact endpoint
    return min(p.r_min + (p.r_max - p.r_min) * math.log(e - p.warmup) / math.log(span), p.r_max)


def lr_at_epoch(e, p):
    _check_epoch(e, p)
    if e >= p.lr_decay_epoch:
        return p.lr_initial / p.lr_decay_factor
    return p.lr_initial
