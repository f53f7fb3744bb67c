import json

import numpy as np
import pytest

import infoloss as il
from infoloss.errors import ConfigError, NegativeMass, NotNormalized, ShapeMismatch


def test_validate_accepts_uniform():
    d = il.FiniteDist(np.array([0.5, 0.5]))
    assert il.validate(d) is d


def test_validate_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        il.FiniteDist(np.array([0.5, 0.6]))


def test_validate_rejects_negative_mass_and_reports_index():
    with pytest.raises(NegativeMass) as exc:
        il.FiniteDist(np.array([1.0, -1e-6, 1e-6]))
    assert exc.value.index == 1


def test_normalization_tolerance_is_tight():
    il.FiniteDist(np.array([0.5, 0.5 + 5e-13]))  # within 1e-12
    with pytest.raises(NotNormalized):
        il.FiniteDist(np.array([0.5, 0.5 + 5e-12]))


def test_cond_dist_checks_every_row():
    with pytest.raises(NotNormalized):
        il.CondDist(np.array([[0.5, 0.5], [0.7, 0.4]]))


def test_joint_requires_full_x_support():
    with pytest.raises(NegativeMass):
        il.JointXY(np.array([[0.5, 0.5], [0.0, 0.0]]))


def test_joint_from_shapes_must_agree():
    px = il.FiniteDist(np.array([0.5, 0.5]))
    rows = il.CondDist(np.array([[1.0, 0.0]]))
    with pytest.raises(ShapeMismatch):
        il.joint_from(px, rows)


def test_full_model_markov_invariant_holds_by_construction():
    rng = np.random.default_rng(0)
    for _ in range(50):
        model = il.random_model(rng, 5, 4, 3)
        rep = il.model_info(model)
        assert abs(rep.i_yz_given_x) <= 1e-10


def test_arrays_are_frozen():
    d = il.FiniteDist(np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        d.probs[0] = 1.0


def test_model_json_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    model = il.random_model(rng, 4, 3, 2)
    path = tmp_path / "model.json"
    il.save_model(path, model)
    back = il.load_model(path)
    assert np.array_equal(back.p_x.probs, model.p_x.probs)
    assert np.array_equal(back.p_y_given_x.rows, model.p_y_given_x.rows)
    assert np.array_equal(back.p_z_given_x.rows, model.p_z_given_x.rows)


def test_model_json_z_channel_optional(tmp_path):
    doc = {
        "x_card": 2, "y_card": 2,
        "p_x": [0.5, 0.5],
        "p_y_given_x": [[0.8, 0.2], [0.3, 0.7]],
    }
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    model = il.load_model(path)
    assert model.p_z_given_x is None


@pytest.mark.parametrize("missing", ["x_card", "y_card", "p_x", "p_y_given_x"])
def test_model_json_missing_key_names_it(tmp_path, missing):
    doc = {
        "x_card": 2, "y_card": 2,
        "p_x": [0.5, 0.5],
        "p_y_given_x": [[0.8, 0.2], [0.3, 0.7]],
    }
    del doc[missing]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ConfigError, match=missing):
        il.load_model(path)


def test_model_json_rejects_z_card_mismatch(tmp_path):
    doc = {
        "x_card": 2, "y_card": 2, "z_card": 3,
        "p_x": [0.5, 0.5],
        "p_y_given_x": [[0.8, 0.2], [0.3, 0.7]],
        "p_z_given_x": [[0.5, 0.5], [0.5, 0.5]],
    }
    path = tmp_path / "m.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ConfigError, match="z_card"):
        il.load_model(path)
