"""Autonomy policy and human/autonomy command arbitration.

The autonomy treats the chosen goal as an attractor and every other goal as
a repeller, acting over the full 6D Cartesian velocity. Arbitration is a
convex combination of human and autonomy commands, gated by how confident
the belief is in its top goal.
"""

from dataclasses import dataclass

import numpy as np

from .core import ControlCommand, quat_conjugate, quat_multiply, quat_to_rotvec
from .inference import InferenceContext

REPELLER_EPS = 1e-12


@dataclass(frozen=True)
class PotentialFieldParams:
    attractor_gain: float = 1.0       # 1/s
    repeller_gain: float = 0.05      # m^2/s
    repeller_radius: float = 0.5     # m
    max_linear_speed: float = 0.5    # m/s
    max_angular_speed: float = 1.0   # rad/s

    def __post_init__(self):
        if self.attractor_gain < 0.0 or self.repeller_gain < 0.0:
            raise ValueError("potential field gains must be non-negative")
        if self.repeller_radius <= 0.0:
            raise ValueError("repeller_radius must be positive")
        if self.max_linear_speed <= 0.0 or self.max_angular_speed <= 0.0:
            raise ValueError("speed caps must be positive")


@dataclass(frozen=True)
class BlendingParams:
    """Piecewise-linear arbitration thresholds.

    rho1/rho2 default to 1.2/n_g and 1.4/n_g evaluated per scene when left
    unset; rho3 caps the autonomy's share of control.
    """

    rho1: float = None
    rho2: float = None
    rho3: float = 0.7

    def __post_init__(self):
        for name in ("rho1", "rho2", "rho3"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.rho1 is not None and self.rho2 is not None and self.rho2 <= self.rho1:
            raise ValueError("rho2 must exceed rho1")
        if self.rho3 is None:
            raise ValueError("rho3 must be set")

    def resolve(self, n_goals):
        r1 = self.rho1 if self.rho1 is not None else 1.2 / n_goals
        r2 = self.rho2 if self.rho2 is not None else 1.4 / n_goals
        if r2 <= r1:
            raise ValueError("resolved rho2 must exceed rho1")
        return r1, r2, self.rho3


def _clamp_norm(v, cap):
    n = np.linalg.norm(v)
    if n > cap:
        return v * (cap / n)
    return v


def _orientation_error(q_target, q_robot):
    """Rotation vector carrying the robot orientation onto the target's."""
    return quat_to_rotvec(quat_multiply(q_target, quat_conjugate(q_robot)))


def potential_field_command(pose, target, scene, params):
    """Autonomy velocity toward one goal, repelled by the others.

    Repellers act radially outward with an inverse-square falloff, only
    inside repeller_radius; a repeller coincident with the robot is skipped.
    Translational and rotational parts are clamped separately.
    """
    trans = params.attractor_gain * (target.pose.position - pose.position)
    for g in scene.goals:
        if g.id == target.id:
            continue
        away = pose.position - g.pose.position
        d = np.linalg.norm(away)
        if d < REPELLER_EPS or d >= params.repeller_radius:
            continue
        trans = trans + params.repeller_gain * away / d**3
    rot = params.attractor_gain * _orientation_error(target.pose.orientation, pose.orientation)
    return ControlCommand(
        _clamp_norm(trans, params.max_linear_speed),
        _clamp_norm(rot, params.max_angular_speed),
    )


def _rotvec_many(quats):
    """Row-wise quaternion-to-rotation-vector, shorter arc."""
    q = np.where(quats[:, 3:4] < 0.0, -quats, quats)
    sin_half = np.linalg.norm(q[:, :3], axis=1)
    angles = 2.0 * np.arctan2(sin_half, q[:, 3])
    scale = np.zeros_like(angles)
    ok = sin_half >= 1e-12
    scale[ok] = angles[ok] / sin_half[ok]
    return q[:, :3] * scale[:, None]


def all_goal_autonomy(pose, scene, params, goal_positions=None, goal_quats=None):
    """Autonomy commands for every goal at once (vectorized potential field).

    Precomputed goal position / quaternion arrays may be passed to avoid
    rebuilding them in per-step loops.
    """
    if goal_positions is None:
        goal_positions = scene.goal_positions()
    if goal_quats is None:
        goal_quats = np.array([g.pose.orientation for g in sorted(scene.goals, key=lambda g: g.id)])
    n = goal_positions.shape[0]

    offsets = goal_positions - pose.position           # robot -> goal
    attract = params.attractor_gain * offsets

    away = -offsets                                    # goal -> robot
    dists = np.linalg.norm(away, axis=1)
    active = (dists >= REPELLER_EPS) & (dists < params.repeller_radius)
    rep_terms = np.zeros_like(away)
    if np.any(active):
        rep_terms[active] = params.repeller_gain * away[active] / dists[active, None] ** 3
    rep_total = rep_terms.sum(axis=0)
    # each goal is repelled by every *other* goal's term
    trans = attract + (rep_total - rep_terms)

    # q_err = q_goal * conj(q_robot), expanded row-wise
    qr = pose.orientation
    cx, cy, cz, cw = -qr[0], -qr[1], -qr[2], qr[3]
    gx, gy, gz, gw = goal_quats[:, 0], goal_quats[:, 1], goal_quats[:, 2], goal_quats[:, 3]
    errs = np.stack(
        [
            gw * cx + cw * gx + gy * cz - gz * cy,
            gw * cy + cw * gy + gz * cx - gx * cz,
            gw * cz + cw * gz + gx * cy - gy * cx,
            gw * cw - gx * cx - gy * cy - gz * cz,
        ],
        axis=1,
    )
    rots = params.attractor_gain * _rotvec_many(errs)

    t_norms = np.linalg.norm(trans, axis=1)
    over = t_norms > params.max_linear_speed
    trans[over] *= (params.max_linear_speed / t_norms[over])[:, None]
    r_norms = np.linalg.norm(rots, axis=1)
    over = r_norms > params.max_angular_speed
    rots[over] *= (params.max_angular_speed / r_norms[over])[:, None]

    return tuple(ControlCommand(trans[i], rots[i]) for i in range(n))


def make_context_builder(scene, params):
    """Closure mapping a robot pose to an InferenceContext with live
    autonomy commands (used by the live loop and forward projections)."""
    goal_positions = scene.goal_positions()
    ordered = sorted(scene.goals, key=lambda g: g.id)
    goal_quats = np.array([g.pose.orientation for g in ordered])
    goals = tuple(ordered)

    def build(pose):
        cmds = all_goal_autonomy(pose, scene, params, goal_positions, goal_quats)
        return InferenceContext(pose, goals, cmds, goal_positions)

    return build


def blending_alpha(p_star, n_goals, params):
    """Autonomy share as a piecewise-linear function of top-goal probability."""
    if not 0.0 <= p_star <= 1.0:
        raise ValueError("p_star must be a probability")
    r1, r2, r3 = params.resolve(n_goals)
    if p_star <= r1:
        return 0.0
    if p_star <= r2:
        return r3 * (p_star - r1) / (r2 - r1)
    return r3


def blend(u_h, u_a, alpha):
    """Convex combination of human and autonomy commands."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return ControlCommand(
        alpha * u_a.translational + (1.0 - alpha) * u_h.translational,
        alpha * u_a.rotational + (1.0 - alpha) * u_h.rotational,
    )
