"""Tests for FGIM latent editing against a scalar linear scorer with a closed-form gradient"""

import math

import numpy as np
import pytest

from latent_transfer.classifier.latent_classifier import LatentClassifier, LinearScorer, grad_wrt_latent
from latent_transfer.errors import ConfigError
from latent_transfer.fgim import editor
from latent_transfer.fgim.editor import fgim_edit, fgim_step, within_threshold
from latent_transfer.models.transfer_models import FGIMConfig, LossForm

pytestmark = pytest.mark.usefixtures("float64")


def sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def oracle_iterates(z0: float, weight: float, decay: float, steps: int):
    """Iterates of the scalar update z <- z - w (sigmoid(z) - 1) with w decaying after each"""
    current = z0 - weight * (sigmoid(z0) - 1.0)
    iterates = []
    for _ in range(steps):
        iterates.append(current)
        weight *= decay
        current = current - weight * (sigmoid(current) - 1.0)
    return iterates


@pytest.fixture
def unit_scorer():
    return LinearScorer([[1.0]], [0.0])


class TestStep:
    def test_single_step_from_origin(self, unit_scorer):
        np.testing.assert_allclose(fgim_step(np.array([0.0]), [1.0], 1.0, unit_scorer), [0.5])

    def test_step_moves_towards_negative_target(self, unit_scorer):
        np.testing.assert_allclose(fgim_step(np.array([0.0]), [0.0], 2.0, unit_scorer), [-1.0])

    def test_threshold_is_strict_infinity_norm(self):
        assert within_threshold(np.array([0.9995, 0.0005]), np.array([1.0, 0.0]), 0.001)
        assert not within_threshold(np.array([0.9995, 0.002]), np.array([1.0, 0.0]), 0.001)


class TestEdit:
    def test_single_weight_follows_closed_form_and_fails(self, unit_scorer):
        config = FGIMConfig(weights=(1.0,), decay=0.9, threshold=0.001, s_steps=30)
        outcome = fgim_edit(np.array([0.0]), [1.0], config, unit_scorer)
        expected = oracle_iterates(0.0, 1.0, 0.9, 30)

        assert not outcome.success
        assert outcome.trace.success_weight_index is None
        assert len(outcome.trace) == 30
        for step, z in zip(outcome.trace.steps, expected):
            assert step.edit_norm == pytest.approx(abs(z))
            assert step.prediction[0] == pytest.approx(sigmoid(z))
        # loss decreases monotonically, so the fallback is the final iterate
        np.testing.assert_allclose(outcome.edited, [expected[-1]])
        assert outcome.edited[0] < math.log(999.0)

    def test_larger_weight_succeeds_after_restart(self, unit_scorer):
        config = FGIMConfig(weights=(1.0, 16.0), decay=0.9, threshold=0.001, s_steps=30)
        outcome = fgim_edit(np.array([0.0]), [1.0], config, unit_scorer)

        assert outcome.success
        assert outcome.trace.success_weight_index == 1
        assert outcome.trace.weights_tried == [0, 1]
        assert len(outcome.trace) == 31
        last = outcome.trace.steps[-1]
        assert (last.weight_index, last.inner_step, last.weight) == (1, 0, 16.0)
        np.testing.assert_allclose(outcome.edited, [8.0])
        assert outcome.edit_norm == pytest.approx(8.0)

    def test_first_iterate_uses_start_gradient(self, unit_scorer):
        config = FGIMConfig(weights=(1.0,), s_steps=3)
        first = fgim_edit(np.array([0.0]), [1.0], config, unit_scorer).trace.steps[0]
        assert first.grad_norm == pytest.approx(0.5)
        assert first.loss == pytest.approx(math.log1p(math.exp(-0.5)))

    def test_already_satisfied_latent_stops_immediately(self, unit_scorer):
        config = FGIMConfig(weights=(1.0, 2.0), s_steps=10)
        outcome = fgim_edit(np.array([12.0]), [1.0], config, unit_scorer)
        assert outcome.success
        assert len(outcome.trace) == 1
        assert outcome.trace.success_weight_index == 0

    def test_original_latent_preserved(self, unit_scorer):
        z = np.array([0.0])
        outcome = fgim_edit(z, [1.0], FGIMConfig(weights=(16.0,)), unit_scorer)
        np.testing.assert_array_equal(z, [0.0])
        np.testing.assert_array_equal(outcome.z, [0.0])

    def test_one_sided_form_runs(self, unit_scorer):
        outcome = fgim_edit(np.array([0.0]), [1.0], FGIMConfig(weights=(16.0,)), unit_scorer, LossForm.ONE_SIDED)
        assert outcome.success

    def test_multi_aspect_latent(self, rng):
        scorer = LatentClassifier(6, 2, 8, 4, seed=1)
        z = rng.normal(size=6)
        outcome = fgim_edit(z, [1.0, 0.0], FGIMConfig(weights=(1.0, 2.0), s_steps=5), scorer)
        assert outcome.edited.shape == (6,)
        assert all(len(step.prediction) == 2 for step in outcome.trace.steps)
        assert 1 <= len(outcome.trace) <= 10

    @pytest.mark.parametrize("weights", [(), (2.0, 1.0), (1.0, 1.0), (0.0, 1.0)])
    def test_invalid_weight_sets(self, unit_scorer, weights):
        with pytest.raises(ConfigError) as excinfo:
            fgim_edit(np.array([0.0]), [1.0], FGIMConfig(weights=weights), unit_scorer)
        assert excinfo.value.key == "fgim.weights"


def assert_trace_follows_schedule(outcome, config):
    """Effective weights decay as lambda^j and no weight after the successful one is tried"""
    steps = outcome.trace.steps
    for step in steps:
        expected = config.weights[step.weight_index] * config.decay ** step.inner_step
        assert step.weight == pytest.approx(expected, rel=1e-12)
    tried = outcome.trace.weights_tried
    assert tried == list(range(len(tried)))
    for index in tried[:-1]:
        assert sum(1 for s in steps if s.weight_index == index) == config.s_steps
    if outcome.success:
        assert tried[-1] == outcome.trace.success_weight_index


class TestDegreeControl:
    @pytest.mark.parametrize("weight", [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    def test_first_step_norm_is_weight_times_gradient_norm(self, weight, rng):
        scorer = LatentClassifier(6, 2, 8, 4, seed=3)
        z = rng.normal(size=6)
        target = np.array([1.0, 0.0])
        grad, _, _ = grad_wrt_latent(scorer, z, target)
        config = FGIMConfig(weights=(weight,), s_steps=1)
        first = fgim_edit(z, target, config, scorer).trace.steps[0]
        assert first.edit_norm == pytest.approx(weight * np.linalg.norm(grad), rel=1e-6)

    def test_edit_norm_nondecreasing_in_weight(self, unit_scorer):
        norms = []
        for weight in (1.0, 2.0, 3.0, 4.0, 5.0, 6.0):
            outcome = fgim_edit(np.array([0.0]), [1.0], FGIMConfig(weights=(weight,), s_steps=30), unit_scorer)
            norms.append(outcome.edit_norm)
        assert norms == sorted(norms)
        assert norms[0] < norms[-1]

    @pytest.mark.parametrize("weights", [(1.0,), (1.0, 16.0), (1.0, 2.0, 3.0)])
    def test_trace_follows_decay_schedule(self, unit_scorer, weights):
        config = FGIMConfig(weights=weights, decay=0.9, threshold=0.001, s_steps=30)
        outcome = fgim_edit(np.array([0.0]), [1.0], config, unit_scorer)
        assert_trace_follows_schedule(outcome, config)

    def test_one_gradient_per_recorded_iterate(self, unit_scorer, mocker):
        spy = mocker.spy(editor, "grad_wrt_latent")
        config = FGIMConfig(weights=(1.0, 2.0), s_steps=7)
        outcome = fgim_edit(np.array([0.0]), [1.0], config, unit_scorer)
        assert not outcome.success
        # the start gradient plus one evaluation per iterate
        assert spy.call_count == 1 + len(outcome.trace) == 1 + 2 * 7


class TestMultiAspect:
    def test_constant_second_aspect_matches_single_aspect_run(self, unit_scorer):
        constant = 1.5
        paired = LinearScorer([[1.0, 0.0]], [0.0, constant])
        config = FGIMConfig(weights=(1.0, 16.0), s_steps=30)
        single = fgim_edit(np.array([0.0]), [1.0], config, unit_scorer)
        double = fgim_edit(np.array([0.0]), [1.0, sigmoid(constant)], config, paired)

        assert double.success == single.success
        assert len(double.trace) == len(single.trace)
        for a, b in zip(single.trace.steps, double.trace.steps):
            assert b.edit_norm == pytest.approx(a.edit_norm, abs=1e-6)
            assert b.prediction[0] == pytest.approx(a.prediction[0], abs=1e-6)
            assert b.weight == a.weight
        np.testing.assert_allclose(double.edited, single.edited, atol=1e-6)

    @pytest.mark.parametrize("target", [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)])
    def test_every_corner_reachable(self, target):
        scorer = LinearScorer([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])
        config = FGIMConfig(weights=(1.0, 4.0, 16.0), s_steps=30)
        outcome = fgim_edit(np.array([0.3, -0.2]), list(target), config, scorer)
        assert outcome.success
        prediction = 1.0 / (1.0 + np.exp(-outcome.edited))
        assert np.max(np.abs(prediction - np.array(target))) < config.threshold
