import math

import numpy as np
import pytest
from conftest import noisy_blobs, small_config

from nctlab import nn
from nctlab.data import generate_blobs, make_dataset
from nctlab.errors import ParameterError, TrainingError
from nctlab.losses import log_softmax
from nctlab.rng import make_stream
from nctlab.schedules import alpha_at_epoch, variability_rate_at_epoch
from nctlab.trainer import (
    evaluate,
    memorization_metrics,
    summarize,
    train,
    train_dml,
    train_nct,
    train_standard,
)


def same_params(a, b):
    return all(p.tobytes() == q.tobytes() for p, q in zip(a.parameters(), b.parameters()))


def test_alpha_zero_no_tv_decouples_into_standard_runs(tiny_noisy):
    ds, test = tiny_noisy
    sched = dict(alpha_max=0.0, r_max=0.0)
    state, _ = train_nct(ds, test, small_config("nct", schedule=sched))
    m1, _ = train_standard(ds, test, small_config("standard", schedule=sched))
    m2, _ = train_standard(ds, test, small_config("standard", schedule=sched, init_streams=("init-model-2",)))
    assert same_params(state.model1, m1)
    assert same_params(state.model2, m2)


def test_shared_streams_give_identical_twins(tiny_noisy):
    ds, test = tiny_noisy
    cfg = small_config(
        "nct",
        init_streams=("init-model-1", "init-model-1"),
        tv_streams=("tv-model-1", "tv-model-1"),
        schedule=dict(r_max=0.5),
    )
    state, metrics = train_nct(ds, test, cfg)
    assert same_params(state.model1, state.model2)
    assert all(m.test_acc_models[0] == m.test_acc_models[1] for m in metrics)


def test_distinct_streams_diverge(tiny_noisy):
    ds, test = tiny_noisy
    state, _ = train_nct(ds, test, small_config("nct"))
    assert not same_params(state.model1, state.model2)


def test_swapping_streams_swaps_models(tiny_noisy):
    ds, test = tiny_noisy
    a_state, a = train_nct(ds, test, small_config("nct", schedule=dict(r_max=0.4)))
    b_state, b = train_nct(
        ds,
        test,
        small_config(
            "nct",
            schedule=dict(r_max=0.4),
            init_streams=("init-model-2", "init-model-1"),
            tv_streams=("tv-model-2", "tv-model-1"),
        ),
    )
    assert same_params(a_state.model1, b_state.model2) and same_params(a_state.model2, b_state.model1)
    for ma, mb in zip(a, b):
        assert ma.test_acc_models == mb.test_acc_models[::-1]
        assert ma.train_loss == mb.train_loss[::-1]
        assert ma.test_acc_ensemble == mb.test_acc_ensemble


def test_schedule_wiring(tiny_noisy):
    ds, test = tiny_noisy
    cfg = small_config("nct", epochs=8, schedule=dict(r_max=0.3))
    _, metrics = train_nct(ds, test, cfg)
    assert [m.epoch for m in metrics] == list(range(1, 9))
    for m in metrics:
        assert m.alpha_d == alpha_at_epoch(m.epoch, cfg.schedule)
        assert m.r_d == variability_rate_at_epoch(m.epoch, cfg.schedule)


def test_no_tv_records_zero_rate(tiny_noisy):
    ds, test = tiny_noisy
    _, metrics = train_nct(ds, test, small_config("nct_no_tv", schedule=dict(r_max=0.5)))
    assert all(m.r_d == 0.0 for m in metrics)


def test_no_en_trains_identically_but_infers_with_model1(tiny_noisy):
    ds, test = tiny_noisy
    full, fm = train_nct(ds, test, small_config("nct"))
    solo, sm = train_nct(ds, test, small_config("nct_no_en"))
    assert same_params(full.model1, solo.model1) and same_params(full.model2, solo.model2)
    assert sm[-1].test_acc == evaluate([solo.model1], test, "single")
    assert fm[-1].test_acc == evaluate([full.model1, full.model2], test, "ensemble")


def test_dml_equals_nct_with_constant_alpha_and_no_tv(tiny_noisy):
    ds, test = tiny_noisy
    dml, _ = train_dml(ds, test, small_config("dml", dml_alpha=0.3))
    # ramp_len = 1 holds alpha at alpha_max from epoch 1
    ref, _ = train_nct(ds, test, small_config("nct_no_tv", schedule=dict(alpha_max=0.3, ramp_len=1)))
    assert same_params(dml.model1, ref.model1) and same_params(dml.model2, ref.model2)


def test_dml_alpha_zero_decouples(tiny_noisy):
    ds, test = tiny_noisy
    dml, _ = train_dml(ds, test, small_config("dml", dml_alpha=0.0))
    m1, _ = train_standard(ds, test, small_config("standard"))
    assert same_params(dml.model1, m1)


def test_wrong_method_rejected(tiny_noisy):
    ds, test = tiny_noisy
    with pytest.raises(ParameterError):
        train_nct(ds, test, small_config("dml"))
    with pytest.raises(ParameterError):
        train_dml(ds, test, small_config("nct"))
    with pytest.raises(ParameterError):
        train_standard(ds, test, small_config("nct"))


def test_class_count_mismatch(tiny_noisy):
    ds, test = tiny_noisy
    with pytest.raises(ParameterError):
        train(ds, test, small_config("nct", layer_dims=(2, 8, 3)))


def test_nonfinite_loss_aborts_with_context():
    feats = np.zeros((64, 2))
    feats[5, 0] = np.nan
    ds = make_dataset(feats, np.arange(64) % 2, 2)
    with pytest.raises(TrainingError) as info:
        train(ds, ds, small_config("nct"))
    assert info.value.epoch == 1 and info.value.batch is not None


def test_zero_epochs_returns_initial_model(tiny_noisy):
    ds, test = tiny_noisy
    cfg = small_config("standard", epochs=0)
    model, metrics = train_standard(ds, test, cfg)
    fresh = nn.init_model(cfg.layer_dims, make_stream(0, "init-model-1"))
    assert metrics == [] and same_params(model, fresh)
    assert summarize(metrics)["best_test_acc"] is None


def test_clean_blobs_learned_quickly():
    ds = generate_blobs(2000, 2, 2, 6.0, 0)
    test = generate_blobs(2000, 2, 2, 6.0, 1)
    _, metrics = train_standard(ds, test, small_config("standard", epochs=30, layer_dims=(2, 32, 32, 2), batch_size=128))
    assert metrics[-1].test_acc > 0.95


def test_full_run_deterministic(tiny_noisy):
    ds, test = tiny_noisy
    _, a = train_nct(ds, test, small_config("nct", schedule=dict(r_max=0.5)))
    _, b = train_nct(ds, test, small_config("nct", schedule=dict(r_max=0.5)))
    assert [m.to_record() for m in a] == [m.to_record() for m in b]


def test_eval_interval_keeps_last_epoch(tiny_noisy):
    ds, test = tiny_noisy
    _, metrics = train_nct(ds, test, small_config("nct", epochs=7, eval_every=3))
    assert [m.epoch for m in metrics] == [3, 6, 7]


def test_float32_run():
    ds, test = noisy_blobs(1, n=256)
    models, metrics = train(ds, test, small_config("nct", dtype="float32"))
    assert models[0].dtype == np.float32
    assert all(math.isfinite(m.train_loss[0]) for m in metrics)


class TestEvaluate:
    def zero_model(self, dims=(2, 4, 2)):
        m = nn.init_model(dims, np.random.default_rng(0))
        return m.with_parameters([np.zeros_like(p) for p in m.parameters()])

    def test_constant_prediction_on_balanced_set(self):
        test = generate_blobs(10_000, 2, 2, 3.0, 0)
        assert abs(evaluate([self.zero_model()], test, "single") - 0.5) < 0.015

    def test_perfect_model(self):
        test = generate_blobs(2000, 2, 2, 20.0, 0)
        # class 0 sits at +10 on the first axis, class 1 at -10
        m = nn.MlpModel((2, 2), [np.array([[1.0, -1.0], [0.0, 0.0]])], [np.zeros(2)])
        assert evaluate([m], test, "single") == 1.0

    def test_self_ensemble_equals_single(self):
        test = generate_blobs(500, 2, 2, 1.0, 0)
        m = nn.init_model((2, 6, 2), np.random.default_rng(4))
        assert evaluate([m, m], test, "ensemble") == evaluate([m], test, "single")

    def test_scores_against_clean_labels(self):
        test = generate_blobs(2000, 2, 2, 20.0, 0)
        flipped = test.with_labels(1 - test.labels)
        m = nn.MlpModel((2, 2), [np.array([[1.0, -1.0], [0.0, 0.0]])], [np.zeros(2)])
        assert evaluate([m], flipped, "single") == 1.0

    def test_empty(self):
        test = generate_blobs(10, 2, 2, 1.0, 0).subset(slice(0, 0))
        with pytest.raises(ParameterError):
            evaluate([self.zero_model()], test)


class TestMemorization:
    def test_clean_dataset(self):
        ds = generate_blobs(400, 2, 2, 2.0, 0)
        m = nn.init_model((2, 6, 2), np.random.default_rng(1))
        mm = memorization_metrics([m], ds, "single")
        assert mm.noisy_acc is None and mm.noisy_loss is None and mm.noisy_count == 0
        logp = log_softmax(nn.forward(m, ds.features)[0])
        assert mm.clean_loss == pytest.approx(-logp[np.arange(400), ds.labels].mean(), abs=1e-12)
        assert mm.clean_acc == evaluate([m], ds, "single")

    def test_uniform_outputs(self):
        ds, _ = noisy_blobs(0, n=4000)
        m = TestEvaluate().zero_model()
        mm = memorization_metrics([m, m], ds)
        assert mm.clean_loss == pytest.approx(math.log(2)) and mm.noisy_loss == pytest.approx(math.log(2))
        assert abs(mm.clean_acc - 0.5) < 0.05 and abs(mm.noisy_acc - 0.5) < 0.05

    def test_subsets_partition(self):
        ds, _ = noisy_blobs(2, n=1000)
        mm = memorization_metrics([TestEvaluate().zero_model()], ds, "single")
        assert mm.noisy_count == int(ds.noisy_mask.sum())
