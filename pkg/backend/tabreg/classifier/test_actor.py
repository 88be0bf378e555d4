import numpy as np
import pytest

from tabreg.classifier import (
    ActorState,
    ClassifierOptions,
    ClassifierTrace,
    LambdaWeights,
    OscillationDetector,
    critic_reg_classifier_ac,
    log_q_objective,
    one_step_classifier_ac,
    unregularized_classifier_ac,
)
from tabreg.solvers import policy_evaluation_exact, value_iteration
from tabreg.tabular import EmpiricalModel, TabularPolicy, random_policy, random_tabular_mdp
from tabreg.utils import PreconditionError, greedy_actions, make_generator


@pytest.fixture
def small():
    rng = make_generator(8)
    mdp = random_tabular_mdp(rng, 3, 2, discount=0.9)
    behavior = random_policy(rng, 3, 2)
    return mdp, behavior, EmpiricalModel.from_mdp(mdp, behavior)


def test_actor_step_raises_the_log_q_objective():
    rng = make_generator(0)
    actor = ActorState.from_policy(random_policy(rng, 2, 3), ema_rate=0.1)
    log_q = rng.normal(size=(2, 3))
    mask = np.array([1.0, 0.0])
    before = actor.policy.copy()
    actor.ascend_log_q(log_q, mask, lr=0.1)
    after = actor.policy
    assert log_q_objective(after[:1], np.exp(log_q[:1])) > log_q_objective(
        before[:1], np.exp(log_q[:1])
    )
    np.testing.assert_allclose(after[1], before[1])


def test_ema_moves_toward_the_policy():
    actor = ActorState(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]), ema_rate=0.25)
    actor.update_ema()
    np.testing.assert_allclose(actor.ema_policy, [[0.875, 0.125]])
    assert actor.drift == pytest.approx(0.375)


def test_from_policy_keeps_zero_mass_negligible():
    actor = ActorState.from_policy(TabularPolicy(np.array([[1.0, 0.0]])), ema_rate=0.05)
    assert actor.policy[0, 1] < 1e-12


def test_oscillation_detector():
    detector = OscillationDetector(window=6, tolerance=0.1)
    flags = [detector.push(v) for v in [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]]
    assert flags == [False] * 5 + [True]
    steady = OscillationDetector(window=6, tolerance=0.1)
    assert not any(steady.push(v) for v in np.linspace(0.0, 1.0, 12))


def test_behavior_mixture_keeps_the_behavior_critic(small):
    mdp, behavior, model = small
    trace = ClassifierTrace()
    options = ClassifierOptions(updates=30, trace_every=10)
    q, policy = critic_reg_classifier_ac(model, options, LambdaWeights.tied(1.0), trace)
    np.testing.assert_allclose(q, policy_evaluation_exact(mdp, behavior), atol=1e-6)
    np.testing.assert_allclose(policy.probs.sum(axis=1), 1.0)
    assert trace.iterations == [10, 20, 30]
    assert list(trace.to_frame().columns) == [
        "iteration",
        "critic_loss",
        "actor_objective",
        "ema_drift",
    ]


def test_greedy_step_jumps_to_the_best_action():
    actor = ActorState.from_policy(TabularPolicy.uniform(2, 3), ema_rate=0.1)
    actor.take_greedy(np.array([[1.0, 3.0, 2.0], [5.0, 5.0 + 1e-9, 1.0]]), atol=1e-6)
    np.testing.assert_allclose(actor.policy, [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]], atol=1e-12)


def test_unregularized_actor_settles_on_the_optimal_policy(small):
    _, _, model = small
    q, policy = unregularized_classifier_ac(model, ClassifierOptions(updates=3000))
    q_opt, pi_opt = value_iteration(model.as_mdp())
    np.testing.assert_array_equal(greedy_actions(policy.probs), greedy_actions(pi_opt.probs))
    np.testing.assert_allclose(q, q_opt, atol=1e-6)


def test_unregularized_run_returns_a_policy(small):

    _, _, model = small
    q, policy = unregularized_classifier_ac(model, ClassifierOptions(updates=50))
    assert (q > 0).all()
    np.testing.assert_allclose(policy.probs.sum(axis=1), 1.0)


def test_actor_critics_reject_negative_rewards(small):
    _, _, model = small
    shifted = model.with_reward_offset(-10.0)
    with pytest.raises(PreconditionError):
        critic_reg_classifier_ac(shifted, ClassifierOptions(updates=1))
    with pytest.raises(PreconditionError):
        unregularized_classifier_ac(shifted, ClassifierOptions(updates=1))


@pytest.mark.slow
def test_critic_regularized_equilibrium_matches_one_step(small):
    _, _, model = small
    options = ClassifierOptions(updates=20_000)
    _, pi_one = one_step_classifier_ac(model, options)
    _, pi_reg = critic_reg_classifier_ac(model, options)
    np.testing.assert_allclose(pi_reg.probs, pi_one.probs, atol=1e-3)
