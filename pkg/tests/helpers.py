"""Scene/config builders shared across test modules."""

import numpy as np

from idsim import Box, Goal, Pose, Scene, TrialConfig


def ws_box(half=1.5):
    return Box(np.full(3, -half), np.full(3, half))


def two_goal_scene():
    """Two goals on the x axis at +-1, robot starting at the origin."""
    return Scene(
        (
            Goal(0, Pose.identity((1.0, 0.0, 0.0)), "east"),
            Goal(1, Pose.identity((-1.0, 0.0, 0.0)), "west"),
        ),
        ws_box(),
        Pose.identity(),
    )


def random_quat(rng):
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def random_scene(rng, n_goals, half=1.2):
    goals = tuple(
        Goal(i, Pose(rng.uniform(-half, half, 3), random_quat(rng)))
        for i in range(n_goals)
    )
    return Scene(goals, ws_box(), Pose(rng.uniform(-half, half, 3), random_quat(rng)))


def random_belief(rng, n):
    p = rng.uniform(0.05, 1.0, n)
    return p / p.sum()


def make_config(scene=None, **kwargs):
    return TrialConfig(scene=scene if scene is not None else two_goal_scene(), **kwargs)


def plain_goals(scene):
    """Scene goals as plain lists for the naive reference."""
    return [
        (g.id, [float(v) for v in g.pose.position], [float(v) for v in g.pose.orientation])
        for g in sorted(scene.goals, key=lambda g: g.id)
    ]


def plain_params(field, autonomy, disamb):
    return (
        {
            "tau": field.tau,
            "proximity_radius": field.proximity_radius,
            "control_gain": field.control_gain,
        },
        {
            "attractor_gain": autonomy.attractor_gain,
            "repeller_gain": autonomy.repeller_gain,
            "repeller_radius": autonomy.repeller_radius,
            "max_linear_speed": autonomy.max_linear_speed,
            "max_angular_speed": autonomy.max_angular_speed,
        },
        {
            "t_b_offset": disamb.t_b_offset,
            "t_c_offset": disamb.t_c_offset,
            "dt": disamb.dt,
            "weight": disamb.weight,
        },
    )


def plain_modes(interface):
    return [(m.id, [int(d) for d in m.dimensions], m.inert) for m in interface.modes]
