"""
Memorization curves
===================

Train plain cross-entropy and the concurrent pair on 2-D blobs with 40% of
labels flipped, and watch how well each fits the flipped subset.
"""

from nctlab import NoiseSpec, ScheduleParams, TrainConfig, corrupt, generate_blobs, train

train_set = corrupt(generate_blobs(2000, 2, 2, 3.0, seed=0), NoiseSpec("symmetric_exclusive", 0.4, seed=0))
test_set = generate_blobs(2000, 2, 2, 3.0, seed=1000)
print(f"realised noise: {train_set.noise_rate():.3f}")

curves = {}
for method in ("standard", "nct"):
    cfg = TrainConfig(method=method, schedule=ScheduleParams.for_epochs(60), eval_every=10)
    _, metrics = train(train_set, test_set, cfg)
    curves[method] = metrics

print("\nepoch  CE noisy-fit  NCT noisy-fit  CE test  NCT test")
for a, b in zip(curves["standard"], curves["nct"]):
    print(
        f"{a.epoch:5d}  {a.train_acc_noisy_subset:11.3f}  {b.train_acc_noisy_subset:13.3f}"
        f"  {a.test_acc:7.4f}  {b.test_acc:8.4f}"
    )
# A net this small barely fits the flipped points under plain CE. The pair
# drifts upward late instead: as r_d nears 0.5 on two classes the relabelled
# targets stop carrying any signal and only the mimicry term is left.
