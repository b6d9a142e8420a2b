"""
Compression probe
=================

Freeze a trained network, take its penultimate features, and ask a fresh
head to fit coin-flip labels. The harder that is, the less sample-specific
detail the features kept.
"""

from nctlab import NoiseSpec, ScheduleParams, TrainConfig, corrupt, generate_blobs, train
from nctlab.probe import ProbeConfig, probe_model

ds = corrupt(generate_blobs(2000, 2, 2, 3.0, seed=0), NoiseSpec("symmetric_exclusive", 0.4, seed=0))
test = generate_blobs(2000, 2, 2, 3.0, seed=1000)

# takes a few seconds per probe
probe_cfg = ProbeConfig(num_samples=2000, seed=0)
for method in ("standard", "nct"):
    models, _ = train(ds, test, TrainConfig(method=method, schedule=ScheduleParams.for_epochs(60)))
    rec = probe_model(models[0], ds, probe_cfg)
    print(f"{method:8s} probe train error on random labels: {rec['train_error']:.3f}")
