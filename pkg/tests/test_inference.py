import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idsim import (
    BayesParams,
    BeliefState,
    ControlCommand,
    FieldParams,
    Goal,
    InferenceContext,
    MemoryParams,
    NumericalError,
    Pose,
    biased_sigmoid,
    compute_xi,
    enforce_simplex,
    memory_based_belief,
    most_confident_goal,
    step_belief_bayes,
    step_belief_field,
    uniform_belief,
    unit_command,
)

from helpers import random_belief, random_scene, two_goal_scene


def ctx_at(position, scene=None, autonomy=None):
    scene = scene if scene is not None else two_goal_scene()
    goals = tuple(sorted(scene.goals, key=lambda g: g.id))
    return InferenceContext(Pose.identity(position), goals, autonomy)


U_PLUS_X = unit_command(0, 1)
U_ZERO = ControlCommand.zero()


# --- xi / sigmoid -------------------------------------------------------------

def test_xi_directedness_hand_case():
    # command straight at goal 0 (distance 1 > proximity radius 0.5):
    # directedness (1+1)/2 = 1 for goal 0, (1-1)/2 = 0 for goal 1
    xi = compute_xi(U_PLUS_X, ctx_at((0.0, 0.0, 0.0)), 0.5)
    assert np.allclose(xi, [1.0, 0.0], atol=1e-12)


def test_xi_neutral_when_standing_on_goal():
    xi = compute_xi(U_PLUS_X, ctx_at((1.0, 0.0, 0.0)), 0.5)
    # degenerate offset -> neutral directedness 0.5, full proximity 1.0
    assert xi[0] == pytest.approx(1.5)


def test_xi_proximity_ramp():
    xi = compute_xi(U_PLUS_X, ctx_at((0.75, 0.0, 0.0)), 0.5)
    # 0.25 m from goal 0 with radius 0.5 -> proximity 0.5
    assert xi[0] == pytest.approx(0.5 * (1 + 1) + 0.5)


def test_xi_agreement_needs_rotation_and_autonomy():
    cmds = (
        ControlCommand(np.zeros(3), np.array([0.2, 0.0, 0.0])),
        ControlCommand(np.zeros(3), np.array([-0.2, 0.0, 0.0])),
    )
    u_rot = unit_command(3, 1)  # pure roll
    with_auto = compute_xi(u_rot, ctx_at((0.0, 0.0, 0.0), autonomy=cmds), 0.5)
    without = compute_xi(u_rot, ctx_at((0.0, 0.0, 0.0)), 0.5)
    assert with_auto[0] - without[0] == pytest.approx(0.2)
    assert with_auto[1] - without[1] == pytest.approx(-0.2)
    # translational command -> agreement term inactive even with autonomy
    trans_only = compute_xi(U_PLUS_X, ctx_at((0.0, 0.0, 0.0), autonomy=cmds), 0.5)
    assert np.allclose(trans_only, [1.0, 0.0])


def test_biased_sigmoid_values():
    assert biased_sigmoid(0.0) == pytest.approx(0.0, abs=1e-15)
    assert biased_sigmoid(1.0) == pytest.approx(1.0 / (1.0 + np.exp(-1.0)) - 0.5)
    assert float(biased_sigmoid(800.0)) == pytest.approx(0.5)
    assert float(biased_sigmoid(-800.0)) == pytest.approx(-0.5)


@given(st.floats(-500, 500))
def test_biased_sigmoid_odd_and_bounded(x):
    y = float(biased_sigmoid(x))
    assert -0.5 <= y <= 0.5
    assert y == pytest.approx(-float(biased_sigmoid(-x)), abs=1e-12)


# --- simplex projection ---------------------------------------------------------

def test_enforce_simplex_clamps_then_renormalizes():
    b = enforce_simplex(np.array([0.5, 0.6, -0.1]))
    assert np.allclose(b.probabilities, [0.5 / 1.1, 0.6 / 1.1, 0.0])


def test_enforce_simplex_all_zero_is_uniform():
    b = enforce_simplex(np.array([-1.0, -2.0, -3.0]))
    assert np.allclose(b.probabilities, 1.0 / 3.0)


def test_most_confident_goal_tie_goes_low():
    assert most_confident_goal(BeliefState(np.array([0.4, 0.4, 0.2]))) == 0


# --- field predictor -------------------------------------------------------------

def test_field_zero_input_euler_hand_case():
    # rate = (0.5 - p)/tau; tau=10, dt=1: [0.9,0.1] -> [0.86,0.14]
    params = FieldParams(tau=10.0, dt=1.0)
    out = step_belief_field(BeliefState(np.array([0.9, 0.1])), U_ZERO, ctx_at((0, 0, 0)), params)
    assert np.allclose(out.probabilities, [0.86, 0.14], atol=1e-12)


def test_field_zero_input_decays_to_uniform():
    # tau of 10 Euler steps (1.0 s at dt 0.1); gap shrinks by 0.9 per step
    params = FieldParams(tau=1.0, dt=0.1)
    ctx = ctx_at((0.2, -0.1, 0.3))
    p = BeliefState(np.array([0.999, 0.001]))
    gaps = []
    for _ in range(500):  # 50 s
        p = step_belief_field(p, U_ZERO, ctx, params)
        gaps.append(np.abs(p.probabilities - 0.5).max())
    assert gaps[-1] < 1e-3
    assert all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:]))  # monotone decay


def test_field_input_shifts_belief_toward_commanded_goal():
    params = FieldParams()
    p = uniform_belief(2)
    out = step_belief_field(p, U_PLUS_X, ctx_at((0, 0, 0)), params)
    assert out.probabilities[0] > 0.5
    assert out.probabilities.sum() == pytest.approx(1.0, abs=1e-12)


def test_field_respects_explicit_rest_state():
    rest = np.array([0.8, 0.2])
    params = FieldParams(tau=1.0, dt=0.1, rest_state=rest)
    p = uniform_belief(2)
    for _ in range(2000):
        p = step_belief_field(p, U_ZERO, ctx_at((0, 0, 0)), params)
    assert np.allclose(p.probabilities, rest, atol=1e-6)


def test_field_transition_must_match_size():
    params = FieldParams(transition=np.eye(3))
    with pytest.raises(ValueError):
        step_belief_field(uniform_belief(2), U_ZERO, ctx_at((0, 0, 0)), params)


def test_field_numerical_error_is_reported():
    params = FieldParams(control_gain=1e308, dt=1e6)
    with pytest.raises(NumericalError):
        step_belief_field(uniform_belief(2), U_PLUS_X, ctx_at((0, 0, 0)), params)


def test_field_params_validation():
    with pytest.raises(ValueError):
        FieldParams(tau=0.0)
    with pytest.raises(ValueError):
        FieldParams(dt=-0.1)
    with pytest.raises(ValueError):
        FieldParams(transition=np.array([[0.5, 0.4], [0.5, 0.5]]))  # rows must sum to 1
    with pytest.raises(ValueError):
        FieldParams(rest_state=np.array([0.5, 0.6]))


# --- bayes predictor ---------------------------------------------------------------

def test_bayes_hand_case_two_goals():
    # sharpness 1, eta = +-1: posterior = [e, 1/e] / (e + 1/e)
    params = BayesParams(likelihood_sharpness=1.0, stay_probability=1.0)
    out = step_belief_bayes(uniform_belief(2), U_PLUS_X, ctx_at((0, 0, 0)), params)
    e = np.exp(1.0)
    assert np.allclose(out.probabilities, [e / (e + 1 / e), (1 / e) / (e + 1 / e)], atol=1e-12)


def test_bayes_zero_input_applies_transition_only():
    t = np.array([[0.7, 0.3], [0.2, 0.8]])
    params = BayesParams(transition=t)
    p = BeliefState(np.array([0.6, 0.4]))
    out = step_belief_bayes(p, U_ZERO, ctx_at((0, 0, 0)), params)
    assert np.allclose(out.probabilities, t.T @ p.probabilities)


def test_bayes_zero_input_identity_transition_is_noop():
    params = BayesParams(stay_probability=1.0)
    p = BeliefState(np.array([0.6, 0.4]))
    assert step_belief_bayes(p, U_ZERO, ctx_at((0, 0, 0)), params) is p


def test_bayes_converges_to_power_iteration_fixed_point():
    # non-symmetric transition, constant command: the update is
    # p <- normalize(L * P^T p) whose fixed point a power iteration finds
    transition = np.array([
        [0.80, 0.15, 0.05],
        [0.30, 0.60, 0.10],
        [0.20, 0.20, 0.60],
    ])
    params = BayesParams(likelihood_sharpness=2.0, transition=transition)
    scene = random_scene(np.random.default_rng(11), 3)
    goals = tuple(sorted(scene.goals, key=lambda g: g.id))
    ctx = InferenceContext(scene.start_pose, goals)

    offsets = ctx.goal_positions - scene.start_pose.position
    eta = offsets @ U_PLUS_X.translational / np.linalg.norm(offsets, axis=1)
    lik = np.exp(params.likelihood_sharpness * eta)

    m = lik[:, None] * transition.T
    q = np.full(3, 1.0 / 3.0)
    for _ in range(200000):
        nxt = m @ q
        nxt /= nxt.sum()
        if np.abs(nxt - q).max() < 1e-14:
            break
        q = nxt
    else:
        raise AssertionError("power iteration did not converge")

    p = uniform_belief(3)
    for _ in range(5000):
        p = step_belief_bayes(p, U_PLUS_X, ctx, params)
    assert np.abs(p.probabilities - nxt).max() < 1e-6


def test_bayes_params_validation():
    with pytest.raises(ValueError):
        BayesParams(likelihood_sharpness=0.0)
    with pytest.raises(ValueError):
        BayesParams(stay_probability=1.5)
    with pytest.raises(ValueError):
        BayesParams(transition=np.array([[1.0, 0.0], [0.3, 0.6]]))


def test_bayes_default_transition_shape():
    params = BayesParams(stay_probability=0.9)
    t = params.transition_for(4)
    assert t.shape == (4, 4)
    assert np.allclose(t.sum(axis=1), 1.0)
    assert t[0, 0] == pytest.approx(0.9 + 0.1 / 4)


# --- memory predictor ----------------------------------------------------------------

def test_memory_hand_case():
    # distances 0 and 2 from (1,0,0): scores exp(0), exp(-2)
    out = memory_based_belief([Pose.identity((1.0, 0.0, 0.0))], ctx_at((1.0, 0.0, 0.0)))
    z = 1.0 + np.exp(-2.0)
    assert np.allclose(out.probabilities, [1.0 / z, np.exp(-2.0) / z], atol=1e-12)


def test_memory_accepts_raw_positions_and_uses_last():
    out_pose = memory_based_belief([Pose.identity((9, 9, 9)), Pose.identity((0.5, 0, 0))],
                                   ctx_at((0.5, 0, 0)))
    out_raw = memory_based_belief([np.array([0.5, 0.0, 0.0])], ctx_at((0.5, 0, 0)))
    assert np.allclose(out_pose.probabilities, out_raw.probabilities)
    assert out_pose.probabilities[0] > out_pose.probabilities[1]


def test_memory_equidistant_is_uniform():
    out = memory_based_belief([Pose.identity()], ctx_at((0, 0, 0)))
    assert np.allclose(out.probabilities, 0.5)


def test_memory_length_scale_sharpens():
    sharp = memory_based_belief([Pose.identity((0.5, 0, 0))], ctx_at((0.5, 0, 0)),
                                MemoryParams(length_scale=0.1))
    soft = memory_based_belief([Pose.identity((0.5, 0, 0))], ctx_at((0.5, 0, 0)),
                               MemoryParams(length_scale=10.0))
    assert sharp.probabilities[0] > soft.probabilities[0]
    with pytest.raises(ValueError):
        MemoryParams(length_scale=0.0)


# --- shared simplex property ------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_all_predictors_keep_simplex(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    scene = random_scene(rng, n)
    goals = tuple(sorted(scene.goals, key=lambda g: g.id))
    p = BeliefState(random_belief(rng, n))
    u = ControlCommand.from_vector(rng.uniform(-1, 1, 6))
    if rng.random() < 0.3:
        u = U_ZERO
    pose = Pose(rng.uniform(-1, 1, 3), scene.start_pose.orientation)
    ctx = InferenceContext(pose, goals)
    for stepped in (
        step_belief_field(p, u, ctx, FieldParams()),
        step_belief_bayes(p, u, ctx, BayesParams()),
        memory_based_belief([pose], ctx),
    ):
        probs = stepped.probabilities
        assert np.all(probs >= 0.0) and np.all(probs <= 1.0)
        assert abs(probs.sum() - 1.0) <= 1e-9


def test_context_validation():
    with pytest.raises(ValueError):
        InferenceContext(Pose.identity(), ())
    goals = tuple(sorted(two_goal_scene().goals, key=lambda g: g.id))
    with pytest.raises(ValueError):
        InferenceContext(Pose.identity(), goals, (ControlCommand.zero(),))
