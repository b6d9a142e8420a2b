"""
Label noise
===========

Three corruption models and per-batch target variability. The realised
noise fraction lands close to its expected value at N = 10000.
"""

import numpy as np

from nctlab import NoiseSpec, corrupt, generate_blobs
from nctlab.noise import expected_noise_fraction, target_variability_batch
from nctlab.rng import make_stream

clean = generate_blobs(10_000, 2, 10, 3.0, seed=0)

for kind in ("symmetric_inclusive", "symmetric_exclusive", "pair_flip"):
    noisy = corrupt(clean, NoiseSpec(kind, 0.4, seed=1))
    print(f"{kind:20s} realised {noisy.noise_rate():.4f}  expected {expected_noise_fraction(kind, 0.4, 10):.4f}")

# pair flip sends every corrupted label to its neighbour class
noisy = corrupt(clean, NoiseSpec("pair_flip", 0.4, seed=1))
m = noisy.noisy_mask
print("pair-flip targets are clean+1:", np.all(noisy.labels[m] == (noisy.clean_labels[m] + 1) % 10))

# %%
# Each model of the pair relabels its own random subset of every batch
streams = (make_stream(0, "tv-model-1"), make_stream(0, "tv-model-2"))
y = np.arange(12) % 10
y1, y2 = target_variability_batch(y, 0.3, 10, streams)
print("\noriginal", y)
print("model 1 ", y1)
print("model 2 ", y2)
