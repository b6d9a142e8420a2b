"""
Ablation ladder
===============

Strip components off the full method one at a time: ensemble inference,
target variability, the dynamic balance (which leaves mutual learning), and
finally the peer itself (which leaves plain cross-entropy).
"""

from nctlab import NoiseSpec, ScheduleParams, TrainConfig, corrupt, generate_blobs, summarize, train

METHODS = ("nct", "nct_no_en", "nct_no_tv", "dml", "standard")

rows = {m: [] for m in METHODS}
for seed in range(3):
    ds = corrupt(generate_blobs(2000, 2, 2, 3.0, seed), NoiseSpec("symmetric_exclusive", 0.4, seed))
    test = generate_blobs(2000, 2, 2, 3.0, 1000 + seed)
    for m in METHODS:
        cfg = TrainConfig(method=m, schedule=ScheduleParams.for_epochs(60), seed_master=seed)
        _, metrics = train(ds, test, cfg)
        s = summarize(metrics)
        rows[m].append((s["best_test_acc"], s["last_test_acc"]))

print("method     " + "".join(f"{f'seed{s} best/last':>18s}" for s in range(3)))
for m, vals in rows.items():
    print(f"{m:10s} " + "".join(f"{f'{b:.3f}/{l:.3f}':>18s}" for b, l in vals))
