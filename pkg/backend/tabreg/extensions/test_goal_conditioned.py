import numpy as np
import pytest

from tabreg.extensions import (
    GoalConditionedPolicy,
    GoalConditionedQ,
    gc_critic_reg_fixed_point,
    gc_discounted_occupancy,
    gc_log_q_objective,
    gc_one_step_objective,
    goal_hit_reward,
)
from tabreg.solvers import policy_evaluation_exact
from tabreg.tabular import (
    EmpiricalModel,
    GridworldSpec,
    TabularMdp,
    TabularPolicy,
    build_gridworld,
    random_policy,
    random_tabular_mdp,
)
from tabreg.utils import PreconditionError, make_generator


@pytest.fixture
def instance():
    rng = make_generator(31)
    mdp = random_tabular_mdp(rng, 4, 3, discount=0.8)
    behavior = random_policy(rng, 4, 3)
    policy = GoalConditionedPolicy.from_goal_policies([random_policy(rng, 4, 3) for _ in range(4)])
    return mdp, behavior, policy


def test_occupancy_rows_are_distributions(instance):
    mdp, behavior, _ = instance
    q = gc_discounted_occupancy(mdp, behavior)
    np.testing.assert_allclose(q.values.sum(axis=2), 1.0, atol=1e-12)
    assert (q.values >= 0).all()
    np.testing.assert_allclose(q.goal_dist, 0.25)


def test_occupancy_column_is_goal_hit_value(instance):
    mdp, behavior, _ = instance
    q = gc_discounted_occupancy(mdp, behavior)
    goal = 2
    reward = goal_hit_reward(mdp)[:, :, goal]
    hit = TabularMdp(mdp.transition, reward, mdp.discount, mdp.initial_dist)
    expected = policy_evaluation_exact(hit, behavior)
    np.testing.assert_allclose(q.values[:, :, goal], expected, atol=1e-12)


def test_deterministic_grid_allows_zero_occupancy():
    mdp = build_gridworld(GridworldSpec(width=3, height=1), 0.9)
    stay = TabularPolicy.deterministic(np.full(3, 4), 5)
    q = gc_discounted_occupancy(mdp, stay)
    # staying put never reaches another cell
    assert q.values[0, 4, 2] < 1e-12
    assert q.values[0, 4, 0] == pytest.approx(1.0)


def test_fixed_point_is_reweighted_occupancy(instance):
    mdp, behavior, policy = instance
    model = EmpiricalModel.from_mdp(mdp, behavior)
    q_star = gc_critic_reg_fixed_point(mdp, model, policy)
    q_beta = gc_discounted_occupancy(mdp, behavior)
    direct = q_beta.values * behavior.probs[:, :, None] / policy.probs
    np.testing.assert_allclose(q_star.values, direct, rtol=1e-8)


def test_goal_conditioned_objectives_agree(instance):
    mdp, behavior, policy = instance
    model = EmpiricalModel.from_mdp(mdp, behavior)
    q_star = gc_critic_reg_fixed_point(mdp, model, policy)
    q_beta = gc_discounted_occupancy(mdp, behavior)
    np.testing.assert_allclose(
        gc_log_q_objective(q_star, policy),
        gc_one_step_objective(q_beta, behavior, policy),
        atol=1e-6,
    )


def test_policy_outside_behavior_support_rejected():
    rng = make_generator(2)
    mdp = random_tabular_mdp(rng, 3, 2)
    support = np.array([[True, False], [True, True], [True, True]])
    behavior = random_policy(rng, 3, 2, support=support)
    policy = GoalConditionedPolicy.from_marginal(TabularPolicy.uniform(3, 2), 3)
    with pytest.raises(PreconditionError, match="support"):
        gc_critic_reg_fixed_point(mdp, EmpiricalModel.from_mdp(mdp, behavior), policy)


def test_policy_slices_must_normalize():
    with pytest.raises(PreconditionError, match="slice"):
        GoalConditionedPolicy(np.full((2, 2, 2), 0.3))
    marginal = TabularPolicy(np.array([[0.2, 0.8], [1.0, 0.0]]))
    policy = GoalConditionedPolicy.from_marginal(marginal, 3)
    np.testing.assert_allclose(policy.for_goal(1).probs, marginal.probs)


def test_values_validated_and_exported(tmp_path):
    with pytest.raises(PreconditionError, match="non-negative"):
        GoalConditionedQ(-np.ones((1, 1, 1)), np.ones(1))
    q = GoalConditionedQ(np.arange(8.0).reshape(2, 2, 2), np.array([0.5, 0.5]))
    frame = q.to_frame()
    assert list(frame.columns) == ["s", "a", "s_g", "value"]
    assert len(frame) == 8
    assert frame.iloc[5].tolist() == [1, 0, 1, 5.0]
    q.to_csv(tmp_path / "q.csv")
    assert (tmp_path / "q.csv").read_text().splitlines()[0] == "s,a,s_g,value"
