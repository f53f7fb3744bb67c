"""Sampling lab: learners, trials, tails, stability, persistence."""

import json
import math

import numpy as np
import pytest

import infoloss as il
from infoloss import lab
from infoloss.errors import ConfigError, DomainError


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def test_sample_dataset_deterministic(lab_model):
    a = lab.sample_dataset(lab_model, 500, 42)
    b = lab.sample_dataset(lab_model, 500, 42)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    c = lab.sample_dataset(lab_model, 500, 43)
    assert not (np.array_equal(a[0], c[0]) and np.array_equal(a[1], c[1]))


def test_sample_point_mass_model():
    model = il.FullModel(
        il.FiniteDist(np.array([1.0, 0.0])),
        il.CondDist(np.array([[0.0, 1.0], [0.5, 0.5]])),
        il.CondDist(np.array([[1.0], [1.0]])),
    )
    xs, ys = lab.sample_dataset(model, 100, 7)
    assert np.all(xs == 0) and np.all(ys == 1)


def test_sample_marginals_within_multinomial_bands(lab_model):
    m = 10 ** 6
    xs, ys = lab.sample_dataset(lab_model, m, 2718)
    joint = lab_model.p_x.probs[:, None] * lab_model.p_y_given_x.rows
    counts = np.zeros_like(joint)
    np.add.at(counts, (xs, ys), 1.0)
    for a in range(joint.shape[0]):
        for b in range(joint.shape[1]):
            p = joint[a, b]
            sd = math.sqrt(m * p * (1 - p))
            assert abs(counts[a, b] - m * p) <= 3.0 * sd


# ---------------------------------------------------------------------------
# learners
# ---------------------------------------------------------------------------

def test_plugin_counts_with_smoothing():
    xs = np.array([0, 0, 0, 0])
    ys = np.array([0, 0, 0, 1])
    fit = lab.plugin_learner(1.0).fit(xs, ys, 1, 2)
    assert np.allclose(fit.rows, [[4 / 6, 2 / 6]])


def test_plugin_interpolates_at_alpha_zero():
    xs = np.array([0, 0])
    ys = np.array([1, 1])
    fit = lab.plugin_learner(0.0).fit(xs, ys, 2, 2)
    assert np.allclose(fit.rows[0], [0.0, 1.0])
    assert np.allclose(fit.rows[1], [0.5, 0.5])  # unseen symbol: uniform


def test_plugin_large_alpha_flattens():
    xs = np.array([0] * 10)
    ys = np.array([0] * 10)
    fit = lab.plugin_learner(1e9).fit(xs, ys, 1, 4)
    assert np.allclose(fit.rows, 0.25, atol=1e-8)


def test_softmax_no_movement_at_zero_lr():
    xs = np.array([0, 1]); ys = np.array([0, 1])
    fit = lab.softmax_gd_learner(steps=1, lr=0.0).fit(xs, ys, 2, 2)
    assert np.allclose(fit.rows, 0.5)
    with pytest.raises(DomainError):
        lab.softmax_gd_learner(steps=0, lr=0.1)


def test_softmax_deterministic():
    rng = np.random.default_rng(1)
    xs = rng.integers(0, 3, size=60)
    ys = rng.integers(0, 2, size=60)
    l1 = lab.softmax_gd_learner(steps=150, lr=0.4, init_seed=3, init_scale=0.01)
    l2 = lab.softmax_gd_learner(steps=150, lr=0.4, init_seed=3, init_scale=0.01)
    assert np.array_equal(l1.fit(xs, ys, 3, 2).rows, l2.fit(xs, ys, 3, 2).rows)


def test_softmax_converges_on_separable_data():
    xs = np.array([0, 0, 0, 1, 1, 1])
    ys = np.array([0, 0, 0, 1, 1, 1])
    fit = lab.softmax_gd_learner(steps=3000, lr=5.0).fit(xs, ys, 2, 2)
    # KL(empirical || fit) per realized row, in nats
    assert -math.log(fit.rows[0, 0]) < 0.01
    assert -math.log(fit.rows[1, 1]) < 0.01


def test_softmax_unseen_rows_stay_uniform():
    xs = np.array([0, 0]); ys = np.array([0, 1])
    fit = lab.softmax_gd_learner(steps=50, lr=0.3).fit(xs, ys, 3, 2)
    assert np.allclose(fit.rows[1], 0.5)
    assert np.allclose(fit.rows[2], 0.5)


def test_build_learner_config():
    learner = lab.build_learner({"kind": "plugin", "alpha": 2.0})
    assert "plugin" in learner.descriptor
    with pytest.raises(ConfigError, match="kind"):
        lab.build_learner({"alpha": 1.0})
    with pytest.raises(ConfigError, match="bogus"):
        lab.build_learner({"kind": "plugin", "bogus": 1})
    with pytest.raises(ConfigError):
        lab.build_learner({"kind": "forest"})


# ---------------------------------------------------------------------------
# zeta and trials
# ---------------------------------------------------------------------------

def test_training_zeta_interpolating_learner_is_zero(lab_model):
    xs, ys = lab.sample_dataset(lab_model, 200, 5)
    fit = lab.plugin_learner(0.0).fit(xs, ys, lab_model.x_card, lab_model.y_card)
    assert lab.training_zeta((xs, ys), fit) == 0.0


def test_training_zeta_uniform_rows_on_deterministic_data():
    xs = np.zeros(50, dtype=int)
    ys = np.zeros(50, dtype=int)
    uniform = il.CondDist(np.full((1, 2), 0.5))
    assert lab.training_zeta((xs, ys), uniform) == pytest.approx(0.5)


def test_training_zeta_never_exceeds_one(lab_model):
    rng = np.random.default_rng(2)
    xs, ys = lab.sample_dataset(lab_model, 100, 9)
    for _ in range(50):
        learned = il.random_cond(rng, lab_model.x_card, lab_model.y_card)
        assert 0.0 <= lab.training_zeta((xs, ys), learned) <= 1.0


class _TruthLearner(lab.Learner):
    descriptor = "truth-echo"

    def __init__(self, model):
        self.model = model

    def fit(self, xs, ys, x_card, y_card, weights=None):
        return self.model.p_y_given_x


def test_run_trial_truth_learner_has_zero_losses(lab_model):
    rec = lab.run_trial(lab_model, _TruthLearner(lab_model), 50, 3)
    assert rec.delta_bar == 0.0
    assert rec.i_loss_1 <= 1e-12
    assert rec.thm1_value == 0.0


def test_run_trial_needs_z_channel():
    model = il.FullModel(il.FiniteDist(np.array([1.0])), il.CondDist(np.array([[1.0]])))
    with pytest.raises(DomainError):
        lab.run_trial(model, lab.plugin_learner(1.0), 10, 0)


def test_run_trial_large_m_consistency(lab_model):
    rec = lab.run_trial(lab_model, lab.plugin_learner(1.0), 10 ** 6, 77)
    assert rec.delta_bar < 0.01
    assert rec.i_loss_1 <= rec.thm1_value + 1e-9


def test_trial_records_satisfy_thm1_bound(lab_model):
    # every trial satisfies the product-form bound (run_trial raises otherwise)
    records = lab.run_grid(lab_model, lab.plugin_learner(0.0), [30, 80], 150, 11)
    assert len(records) == 300
    for r in records:
        assert r.i_loss_1 <= r.thm1_value + 1e-9
        assert 0.0 <= r.delta_bar <= 1.0
        assert 0.0 <= r.zeta <= 1.0


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------

def test_tail_eps_zero_and_above_one(lab_model):
    ests0 = lab.monte_carlo_tail(lab_model, lab.plugin_learner(0.0), [40], 0.0, 100, 5)
    assert ests0[0].freq == 1.0
    ests1 = lab.monte_carlo_tail(lab_model, lab.plugin_learner(0.0), [40], 1.0 + 1e-9, 100, 5)
    assert ests1[0].freq == 0.0


def test_tail_requires_hundred_trials(lab_model):
    with pytest.raises(DomainError):
        lab.monte_carlo_tail(lab_model, lab.plugin_learner(0.0), [40], 0.1, 50, 5)


def test_tail_reproducible_bit_for_bit(lab_model):
    a = lab.monte_carlo_tail(lab_model, lab.plugin_learner(0.0), [40, 80], 0.1, 100, 21)
    b = lab.monte_carlo_tail(lab_model, lab.plugin_learner(0.0), [40, 80], 0.1, 100, 21)
    assert a == b


def test_wilson_upper_basics():
    assert lab.wilson_upper(0, 100) < 0.05
    assert lab.wilson_upper(100, 100) == 1.0
    assert 0.5 < lab.wilson_upper(50, 100) < 0.61
    for k in (0, 3, 50, 97, 100):
        assert lab.wilson_upper(k, 100) >= k / 100


def test_k_reconstruction_monotone_fallbacks():
    deltas = np.full(200, 0.01)
    assert lab.reconstruct_k_observations(deltas, 50, 3) == []
    spread = np.concatenate([np.full(100, 0.1), np.full(100, 0.6)])
    obs = lab.reconstruct_k_observations(spread, 50, 3, nu=0.05)
    assert obs and all(k > 0 for _, k in obs)


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------

def test_stability_zero_perturbation_is_exactly_zero(lab_model):
    dataset = lab.sample_dataset(lab_model, 40, 4)
    learner = lab.softmax_gd_learner(steps=100, lr=0.5)
    got = lab.stability_probe(learner, dataset, lab_model.x_card, lab_model.y_card,
                              0.0, probe_seed=3)
    assert got == 0.0


def test_stability_ladder_monotone(lab_model):
    dataset = lab.sample_dataset(lab_model, 50, 314)
    learner = lab.softmax_gd_learner(steps=200, lr=0.5)
    ladder = lab.stability_ladder(learner, dataset, lab_model.x_card,
                                  lab_model.y_card, 1.0 / 50, 6, probe_seed=5)
    for a, b in zip(ladder, ladder[1:]):
        assert b <= a + 1e-9


def test_stability_perturb_mass_domain(lab_model):
    dataset = lab.sample_dataset(lab_model, 40, 4)
    learner = lab.plugin_learner(1.0)
    with pytest.raises(DomainError):
        lab.stability_probe(learner, dataset, 4, 3, 0.5, probe_seed=0)


def test_plugin_label_flip_discontinuity(lab_model):
    # contrast case: interpolating learners jump by ~1/count(x) under a flip
    xs, ys = lab.sample_dataset(lab_model, 60, 8)
    learner = lab.plugin_learner(0.0)
    base = learner.fit(xs, ys, lab_model.x_card, lab_model.y_card)
    ys2 = ys.copy()
    ys2[0] = (ys[0] + 1) % lab_model.y_card
    flipped = learner.fit(xs, ys2, lab_model.x_card, lab_model.y_card)
    x0 = xs[0]
    count_x0 = int(np.sum(xs == x0))
    row_tv = 0.5 * float(np.abs(base.rows[x0] - flipped.rows[x0]).sum())
    assert row_tv == pytest.approx(1.0 / count_x0, abs=1e-12)


# ---------------------------------------------------------------------------
# config and persistence
# ---------------------------------------------------------------------------

def _write_experiment(tmp_path, model, **overrides):
    il.save_model(tmp_path / "model.json", model)
    doc = {
        "model": str(tmp_path / "model.json"),
        "learner": {"kind": "plugin", "alpha": 0.0},
        "m_grid": [30, 60],
        "eps": 0.1,
        "trials": 100,
        "base_seed": 5,
    }
    doc.update(overrides)
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(doc))
    return path


def test_load_experiment(tmp_path, lab_model):
    cfg = lab.load_experiment(_write_experiment(tmp_path, lab_model))
    assert cfg["m_grid"] == [30, 60]
    assert cfg["trials"] == 100


def test_load_experiment_rejects_unknown_key(tmp_path, lab_model):
    path = _write_experiment(tmp_path, lab_model, extra=1)
    with pytest.raises(ConfigError, match="extra"):
        lab.load_experiment(path)


def test_load_experiment_names_missing_key(tmp_path, lab_model):
    path = _write_experiment(tmp_path, lab_model)
    doc = json.loads(path.read_text())
    del doc["eps"]
    path.write_text(json.dumps(doc))
    with pytest.raises(ConfigError, match="eps"):
        lab.load_experiment(path)


def test_trials_csv_roundtrip(tmp_path, lab_model):
    records = lab.run_grid(lab_model, lab.plugin_learner(0.0), [30], 100, 13)
    path = tmp_path / "trials.csv"
    lab.write_trials_csv(path, records)
    header = path.read_text().splitlines()[0]
    assert header == "m,seed,delta_bar,zeta,i_loss_1,thm1_value"
    back = lab.read_trials_csv(path)
    assert len(back) == len(records)
    for a, b in zip(records, back):
        assert (a.m, a.seed) == (b.m, b.seed)
        assert a.delta_bar == b.delta_bar  # exact float round-trip via repr
        assert a.zeta == b.zeta
        assert a.i_loss_1 == b.i_loss_1
        assert a.thm1_value == b.thm1_value
