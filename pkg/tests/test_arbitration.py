import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idsim import (
    BlendingParams,
    Box,
    ControlCommand,
    Goal,
    Pose,
    PotentialFieldParams,
    Scene,
    all_goal_autonomy,
    blend,
    blending_alpha,
    make_context_builder,
    potential_field_command,
)
from idsim.core import quat_from_rotvec

from helpers import random_scene, two_goal_scene


# --- potential field -----------------------------------------------------------

def test_attraction_is_proportional_to_offset():
    scene = two_goal_scene()
    params = PotentialFieldParams(max_linear_speed=100.0)
    u = potential_field_command(Pose.identity((0.6, 0.0, 0.0)), scene.goals[0], scene, params)
    assert np.allclose(u.translational, [0.4, 0.0, 0.0])
    assert np.allclose(u.rotational, 0.0)


def test_repellers_only_act_inside_radius():
    scene = two_goal_scene()  # goals 2 m apart; repeller radius 0.5
    params = PotentialFieldParams(max_linear_speed=100.0)
    far = potential_field_command(Pose.identity((0.0, 0.0, 0.0)), scene.goals[0], scene, params)
    assert np.allclose(far.translational, [1.0, 0.0, 0.0])  # no repulsion at 1 m

    near = potential_field_command(Pose.identity((-0.7, 0.0, 0.0)), scene.goals[0], scene, params)
    # 0.3 m from goal 1: repelled along +x by gain * d / d^3
    expected = 1.7 + 0.05 * 0.3 / 0.3**3
    assert near.translational[0] == pytest.approx(expected)


def test_coincident_repeller_is_skipped():
    scene = two_goal_scene()
    params = PotentialFieldParams(max_linear_speed=100.0)
    u = potential_field_command(Pose.identity((-1.0, 0.0, 0.0)), scene.goals[0], scene, params)
    assert np.all(np.isfinite(u.translational))
    assert u.translational[0] == pytest.approx(2.0)


def test_speed_caps_apply_separately():
    goal = Goal(0, Pose((4.0, 0.0, 0.0), quat_from_rotvec(np.array([0.0, 0.0, 3.0]))))
    scene = Scene((goal,), Box(np.full(3, -5.0), np.full(3, 5.0)), Pose.identity())
    u = potential_field_command(Pose.identity(), goal, scene, PotentialFieldParams())
    assert np.linalg.norm(u.translational) == pytest.approx(0.5)
    assert np.linalg.norm(u.rotational) == pytest.approx(1.0)


def test_orientation_attractor_direction():
    target = Goal(0, Pose(np.zeros(3), quat_from_rotvec(np.array([0.0, 0.0, 0.4]))))
    scene = Scene((target,), Box(np.full(3, -1.0), np.full(3, 1.0)), Pose.identity())
    u = potential_field_command(Pose.identity(), target, scene, PotentialFieldParams())
    assert np.allclose(u.rotational, [0.0, 0.0, 0.4], atol=1e-12)


def test_potential_params_validation():
    with pytest.raises(ValueError):
        PotentialFieldParams(attractor_gain=-1.0)
    with pytest.raises(ValueError):
        PotentialFieldParams(repeller_radius=0.0)
    with pytest.raises(ValueError):
        PotentialFieldParams(max_linear_speed=0.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_vectorized_autonomy_matches_per_goal_loop(seed):
    rng = np.random.default_rng(seed)
    scene = random_scene(rng, int(rng.integers(1, 6)))
    pose = Pose(rng.uniform(-1, 1, 3), scene.start_pose.orientation)
    params = PotentialFieldParams()
    fast = all_goal_autonomy(pose, scene, params)
    for goal, cmd in zip(sorted(scene.goals, key=lambda g: g.id), fast):
        slow = potential_field_command(pose, goal, scene, params)
        assert np.allclose(cmd.translational, slow.translational, atol=1e-12)
        assert np.allclose(cmd.rotational, slow.rotational, atol=1e-12)


def test_context_builder_attaches_live_autonomy():
    scene = two_goal_scene()
    params = PotentialFieldParams()
    build = make_context_builder(scene, params)
    pose = Pose.identity((0.3, 0.2, -0.1))
    ctx = build(pose)
    assert ctx.robot_pose is pose
    assert [g.id for g in ctx.goals] == [0, 1]
    expected = all_goal_autonomy(pose, scene, params)
    for a, b in zip(ctx.autonomy_commands, expected):
        assert np.array_equal(a.as_vector(), b.as_vector())


# --- blending ---------------------------------------------------------------------

def test_alpha_zero_below_first_threshold():
    params = BlendingParams()
    # defaults for n=2: rho1 = 0.6
    assert blending_alpha(0.0, 2, params) == 0.0
    assert blending_alpha(0.6, 2, params) == 0.0


def test_alpha_caps_at_rho3():
    params = BlendingParams()
    assert blending_alpha(0.71, 2, params) == pytest.approx(0.7)
    assert blending_alpha(1.0, 2, params) == pytest.approx(0.7)


def test_alpha_midpoint_five_goals():
    # n=5: ramp spans [0.24, 0.28]; its midpoint yields half of 0.7
    assert blending_alpha(0.26, 5, BlendingParams()) == pytest.approx(0.35)


def test_alpha_is_continuous_on_dense_grid():
    params = BlendingParams()
    for n in (2, 3, 4, 5):
        grid = np.linspace(0.0, 1.0, 20001)
        vals = np.array([blending_alpha(p, n, params) for p in grid])
        assert np.abs(np.diff(vals)).max() < 1e-2  # no jumps at the knots


def test_alpha_monotone_in_confidence():
    params = BlendingParams()
    grid = np.linspace(0.0, 1.0, 2001)
    vals = [blending_alpha(p, 3, params) for p in grid]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_alpha_rejects_bad_probability():
    with pytest.raises(ValueError):
        blending_alpha(1.2, 3, BlendingParams())


def test_blending_params_validation():
    with pytest.raises(ValueError):
        BlendingParams(rho1=0.5, rho2=0.4)
    with pytest.raises(ValueError):
        BlendingParams(rho3=1.4)
    with pytest.raises(ValueError):
        BlendingParams(rho1=0.9).resolve(2)  # default rho2=0.7 < rho1


def test_blending_params_explicit_thresholds():
    params = BlendingParams(rho1=0.1, rho2=0.5, rho3=1.0)
    assert blending_alpha(0.3, 7, params) == pytest.approx(0.5)
    assert blending_alpha(0.9, 7, params) == 1.0


def test_blend_endpoints_bit_identical():
    u_h = ControlCommand.from_vector([0.3, -0.2, 0.1, 0.01, 0.0, -0.4])
    u_a = ControlCommand.from_vector([-1.0, 2.0, 0.0, 0.5, 0.25, 0.125])
    pure_h = blend(u_h, u_a, 0.0)
    assert np.array_equal(pure_h.as_vector(), u_h.as_vector())
    pure_a = blend(u_h, u_a, 1.0)
    assert np.array_equal(pure_a.as_vector(), u_a.as_vector())


def test_blend_is_convex_combination():
    u_h = ControlCommand.from_vector([1.0, 0, 0, 0, 0, 0])
    u_a = ControlCommand.from_vector([0, 1.0, 0, 0, 0, 0])
    mix = blend(u_h, u_a, 0.25)
    assert np.allclose(mix.as_vector(), [0.75, 0.25, 0, 0, 0, 0])
    with pytest.raises(ValueError):
        blend(u_h, u_a, 1.5)
