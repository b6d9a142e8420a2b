"""
Sweeping the variability ceiling
================================

r_max caps how many targets get relabelled late in training. With only two
classes, a rate near 0.5 leaves the supervised targets carrying no
information, and above it they point the wrong way.
"""

from nctlab import NoiseSpec, ScheduleParams, TrainConfig, corrupt, generate_blobs, summarize, train

ds = corrupt(generate_blobs(2000, 2, 2, 3.0, seed=0), NoiseSpec("symmetric_exclusive", 0.4, seed=0))
test = generate_blobs(2000, 2, 2, 3.0, seed=1000)

print("r_max  best    last")
for r_max in (0.0, 0.1, 0.3, 0.5, 0.9):
    cfg = TrainConfig(method="nct", schedule=ScheduleParams.for_epochs(60, r_max=r_max))
    s = summarize(train(ds, test, cfg)[1])
    print(f"{r_max:4.1f}   {s['best_test_acc']:.4f}  {s['last_test_acc']:.4f}")
