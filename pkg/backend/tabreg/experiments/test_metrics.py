import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tabreg.experiments import StateSubset, action_prob_r2, argmax_similarity
from tabreg.tabular import TabularPolicy, random_policy
from tabreg.utils import PreconditionError, make_generator


def _det(actions, num_actions=3):
    return TabularPolicy.deterministic(np.asarray(actions), num_actions)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_similarity_is_a_symmetric_fraction(seed):
    rng = make_generator(seed)
    a, b = random_policy(rng, 6, 4), random_policy(rng, 6, 4)
    forward = argmax_similarity(a, b)
    assert 0.0 <= forward.score <= 1.0
    assert forward.score == argmax_similarity(b, a).score
    assert argmax_similarity(a, a).score == 1.0
    assert forward.chance_level == 0.25


def test_ties_break_to_the_lowest_action():
    tied = TabularPolicy(np.array([[0.5, 0.5, 0.0]]))
    assert argmax_similarity(tied, _det([0])).score == 1.0
    assert argmax_similarity(tied, _det([1])).score == 0.0


def test_mask_restricts_the_states():
    report = argmax_similarity(_det([0, 1, 2]), _det([0, 2, 2]), mask=np.array([1, 0, 1], bool))
    assert report.states.tolist() == [0, 2]
    assert report.score == 1.0


def test_deviating_states_follow_the_reference():
    reference = _det([0, 0, 0])
    report = argmax_similarity(
        _det([0, 1, 2]), _det([0, 1, 0]), StateSubset.DEVIATING_STATES, reference=reference
    )
    assert report.states.tolist() == [1, 2]
    assert report.per_state_match.tolist() == [True, False]
    assert report.score == 0.5
    assert report.state_subset is StateSubset.DEVIATING_STATES


def test_tied_reference_has_no_deviations():
    with pytest.raises(PreconditionError, match="empty"):
        argmax_similarity(
            _det([1, 2]),
            _det([1, 2]),
            StateSubset.DEVIATING_STATES,
            reference=TabularPolicy.uniform(2, 3),
        )
    with pytest.raises(PreconditionError, match="reference"):
        argmax_similarity(_det([1]), _det([1]), StateSubset.DEVIATING_STATES)


def test_similarity_needs_matching_shapes():
    with pytest.raises(PreconditionError, match="shape"):
        argmax_similarity(_det([0]), _det([0, 1]))


def test_r_squared():
    rng = make_generator(3)
    target = random_policy(rng, 4, 3)
    assert action_prob_r2(target, target).r_squared == pytest.approx(1.0)
    mean = TabularPolicy.uniform(4, 3)
    assert action_prob_r2(mean, target).r_squared == pytest.approx(0.0, abs=1e-12)
    report = action_prob_r2(mean, target, np.array([True, False, True, False]))
    assert report.num_points == 6
    assert report.state_mask == (True, False, True, False)


def test_r_squared_undefined_cases():
    with pytest.raises(PreconditionError, match="constant"):
        action_prob_r2(TabularPolicy.uniform(2, 2), TabularPolicy.uniform(2, 2))
    with pytest.raises(PreconditionError, match="two points"):
        action_prob_r2(_det([0], 1), _det([0], 1))
