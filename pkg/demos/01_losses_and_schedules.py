"""
Losses and schedules
====================

The two-model objective mixes a supervised cross-entropy with a softened
mimicry term toward the peer. Its weight ramps up over training while the
fraction of randomly relabelled targets grows on a log curve.
"""

import numpy as np

from nctlab import LossParams, ScheduleParams, nct_loss, one_hot, softmax_with_temperature
from nctlab.schedules import alpha_at_epoch, lr_at_epoch, variability_rate_at_epoch

rng = np.random.default_rng(0)
z = rng.standard_normal((4, 3)) * 2
peer = softmax_with_temperature(rng.standard_normal((4, 3)), tau=4.0)
y = one_hot([0, 2, 1, 1], 3)

# alpha = 0 is plain cross-entropy, alpha = 1 is pure mimicry
for alpha in (0.0, 0.5, 1.0):
    loss, grad = nct_loss(z, peer, y, LossParams(tau=4.0, alpha=alpha))
    print(f"alpha={alpha:.1f}  loss={loss:.4f}  |grad|={np.abs(grad).sum():.4f}")

# %%
# The default 200-epoch schedule
p = ScheduleParams()
print("\nepoch  alpha_d  r_d     lr")
for e in (0, 1, 2, 20, 90, 179, 180, 200):
    print(f"{e:5d}  {alpha_at_epoch(e, p):.4f}   {variability_rate_at_epoch(e, p):.4f}  {lr_at_epoch(e, p):.4f}")

# shorter runs keep the ramp and the lr decay at 90% of the budget
short = ScheduleParams.for_epochs(60)
print(f"\n60 epochs: ramp_len={short.ramp_len}, lr_decay_epoch={short.lr_decay_epoch}")
