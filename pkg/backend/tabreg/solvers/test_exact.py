import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tabreg.solvers import (
    SolverConfig,
    SolverTrace,
    iterate_to_fixed_point,
    policy_evaluation_exact,
    policy_expectation,
    policy_return,
    table_frame,
    td_target,
    value_iteration,
)
from tabreg.tabular import (
    ACTIONS,
    GridworldSpec,
    TabularMdp,
    TabularPolicy,
    build_gridworld,
    load_preset,
    random_policy,
    random_tabular_mdp,
)
from tabreg.utils import (
    ConvergenceError,
    PreconditionError,
    SolverDivergenceError,
    greedy_actions,
    make_generator,
)


def test_single_state_geometric_series():
    mdp = TabularMdp(np.ones((1, 1, 1)), np.ones((1, 1)), 0.95, np.ones(1))
    q = policy_evaluation_exact(mdp, TabularPolicy.uniform(1, 1))
    assert q[0, 0] == pytest.approx(20.0)


def test_two_state_chain():
    transition = np.zeros((2, 1, 2))
    transition[:, 0, 1] = 1.0
    mdp = TabularMdp(transition, np.array([[0.0], [1.0]]), 0.5, np.array([1.0, 0.0]))
    q = policy_evaluation_exact(mdp, TabularPolicy.uniform(2, 1))
    np.testing.assert_allclose(q[:, 0], [1.0, 2.0])


def test_matches_long_iterative_evaluation():
    mdp = load_preset("fig2-left").build_mdp()
    uniform = TabularPolicy.uniform(mdp.num_states, mdp.num_actions)

    def update(q):
        return mdp.reward + mdp.discount * mdp.expected_next((uniform.probs * q).sum(axis=1))

    q_iter, _ = iterate_to_fixed_point(update, np.zeros_like(mdp.reward), 1e-13, 10_000, "oracle")
    np.testing.assert_allclose(policy_evaluation_exact(mdp, uniform), q_iter, atol=1e-8)


def test_td_target_is_a_fixed_point():
    rng = make_generator(1)
    mdp = random_tabular_mdp(rng, 5, 3)
    policy = random_policy(rng, 5, 3)
    q = policy_evaluation_exact(mdp, policy)
    np.testing.assert_allclose(td_target(mdp, q, policy).values, q, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_positive_rewards_give_positive_values(seed):
    rng = make_generator(seed)
    mdp = random_tabular_mdp(rng, 6, 3)
    q = policy_evaluation_exact(mdp, random_policy(rng, 6, 3))
    assert (q > 0).all()


def test_policy_shape_mismatch():
    mdp = random_tabular_mdp(make_generator(0), 3, 2)
    with pytest.raises(PreconditionError):
        policy_evaluation_exact(mdp, TabularPolicy.uniform(3, 4))


def test_value_iteration_zero_rewards_ties_to_first_action():
    mdp = build_gridworld(GridworldSpec(width=3, height=3), 0.9)
    q, policy = value_iteration(mdp)
    np.testing.assert_allclose(q, 0.0)
    assert (policy.greedy_actions() == ACTIONS.index("up")).all()


def test_value_iteration_agrees_with_greedy_evaluation():
    mdp = load_preset("fig2-left").build_mdp()
    q, policy = value_iteration(mdp, SolverConfig(tolerance=1e-12))
    np.testing.assert_allclose(policy_evaluation_exact(mdp, policy), q, atol=1e-8)
    # one rewarding cell: the goal's own value is 1 / (1 - γ) when staying
    goal = mdp.grid.state_index((4, 4))
    assert q[goal].max() == pytest.approx(1.0 / (1.0 - mdp.discount))


def test_value_iteration_heads_for_the_high_cell():
    preset = load_preset("fig3")
    mdp = preset.build_mdp()
    _, policy = value_iteration(mdp)
    actions = policy.greedy_actions()
    grid = mdp.grid
    assert ACTIONS[actions[grid.state_index((0, 2))]] == "right"
    assert ACTIONS[actions[grid.state_index((0, 3))]] == "right"
    assert ACTIONS[actions[grid.state_index((1, 3))]] == "up"


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), shift=st.floats(-5.0, 5.0))
def test_reward_shift_moves_values_not_argmax(seed, shift):
    mdp = random_tabular_mdp(make_generator(seed), 5, 3)
    config = SolverConfig(tolerance=1e-12, tie_tolerance=0.0)
    q, policy = value_iteration(mdp, config)
    q_shift, policy_shift = value_iteration(mdp.with_reward_offset(shift), config)
    np.testing.assert_allclose(q_shift, q + shift / (1.0 - mdp.discount), atol=1e-8)
    np.testing.assert_array_equal(policy_shift.greedy_actions(), policy.greedy_actions())


def test_policy_improvement_never_underestimates():
    rng = make_generator(7)
    for _ in range(5):
        mdp = random_tabular_mdp(rng, 6, 4)
        behavior = random_policy(rng, 6, 4)
        q_beta = policy_evaluation_exact(mdp, behavior)
        improved = TabularPolicy.deterministic(greedy_actions(q_beta), 4)
        q_pi = policy_evaluation_exact(mdp, improved)
        assert (
            policy_expectation(improved.probs, q_beta)
            <= policy_expectation(improved.probs, q_pi) + 1e-9
        ).all()


def test_policy_return_uses_initial_distribution():
    mdp = TabularMdp(np.ones((1, 2, 1)), np.array([[1.0, 0.0]]), 0.5, np.ones(1))
    greedy = TabularPolicy.deterministic(np.array([0]), 2)
    assert policy_return(mdp, greedy) == pytest.approx(2.0)


def test_table_frame_is_long_format():
    frame = table_frame(np.arange(6.0).reshape(3, 2), "q")
    assert list(frame.columns) == ["s", "a", "q"]
    assert frame.iloc[3].tolist() == [1, 1, 3.0]


def test_budget_exhaustion_reports_residual():
    with pytest.raises(ConvergenceError) as info:
        iterate_to_fixed_point(lambda x: x + 1.0, np.zeros(2), 1e-8, 5, "runaway")
    assert info.value.iterations == 5
    assert info.value.residual == pytest.approx(1.0)


def test_bound_raises_divergence():
    with pytest.raises(SolverDivergenceError, match="bound"):
        iterate_to_fixed_point(lambda x: 2.0 * x + 1.0, np.zeros(1), 1e-8, 100, "x", bound=10.0)


def test_trace_records_residuals(tmp_path):
    trace = SolverTrace("halving")
    _, iterations = iterate_to_fixed_point(lambda x: 0.5 * x, np.ones(1), 1e-3, 100, "h", trace)
    assert len(trace) == iterations
    assert trace.residuals == sorted(trace.residuals, reverse=True)
    trace.to_csv(tmp_path / "trace.csv")
    assert (tmp_path / "trace.csv").read_text().startswith("iteration,residual")


def test_relative_change_ignores_constant_zeros():
    out, _ = iterate_to_fixed_point(
        lambda x: np.array([0.0, 1e6 + 0.5 * (x[1] - 1e6)]),
        np.array([0.0, 0.0]),
        1e-10,
        1000,
        "relative",
        relative=True,
    )
    assert out[0] == 0.0
    assert out[1] == pytest.approx(1e6)


@pytest.mark.parametrize(
    "kwargs",
    [{"tolerance": 0.0}, {"temperature": -1.0}, {"max_iters": 0}, {"cql_lambda": -0.1}],
)
def test_solver_config_validation(kwargs):
    with pytest.raises(PreconditionError):
        SolverConfig(**kwargs)
