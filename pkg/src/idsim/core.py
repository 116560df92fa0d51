"""Shared domain vocabulary: poses, goals, commands, control modes and beliefs.

Conventions used throughout the package:
  - positions in meters, angles in radians, time in seconds
  - quaternions stored scalar-last [qx, qy, qz, qw], kept unit-norm to 1e-9
  - the six control dimensions are ordered x, y, z, roll, pitch, yaw
"""

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import InvalidSceneError

QUAT_TOL = 1e-9
SIMPLEX_TOL = 1e-9
N_DIMS = 6

IDENTITY_QUAT = np.array([0.0, 0.0, 0.0, 1.0])


class Dim(IntEnum):
    """Index of one controllable Cartesian dimension."""

    X = 0
    Y = 1
    Z = 2
    ROLL = 3
    PITCH = 4
    YAW = 5


DIM_NAMES = {d: d.name.lower() for d in Dim}
DIM_BY_NAME = {name: d for d, name in DIM_NAMES.items()}


# ---------------------------------------------------------------------------
# quaternion helpers (scalar-last)
# ---------------------------------------------------------------------------

def quat_normalize(q):
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n < 1e-12:
        raise ValueError("cannot normalize near-zero quaternion")
    return q / n


def quat_multiply(a, b):
    """Hamilton product a*b, both scalar-last."""
    ax, ay, az, aw = a
    bx, by, bz, bw = b
    return np.array(
        [
            aw * bx + bw * ax + ay * bz - az * by,
            aw * by + bw * ay + az * bx - ax * bz,
            aw * bz + bw * az + ax * by - ay * bx,
            aw * bw - ax * bx - ay * by - az * bz,
        ]
    )


def quat_conjugate(q):
    return np.array([-q[0], -q[1], -q[2], q[3]])


def quat_from_rotvec(v):
    """Unit quaternion for a rotation-vector (axis * angle)."""
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v)
    if angle < 1e-12:
        # first-order expansion keeps the map smooth through zero
        q = np.array([0.5 * v[0], 0.5 * v[1], 0.5 * v[2], 1.0])
        return quat_normalize(q)
    axis = v / angle
    half = 0.5 * angle
    s = np.sin(half)
    return np.array([axis[0] * s, axis[1] * s, axis[2] * s, np.cos(half)])


def quat_to_rotvec(q):
    """Rotation-vector of a unit quaternion, shorter arc."""
    q = np.asarray(q, dtype=float)
    if q[3] < 0.0:
        q = -q
    sin_half = np.linalg.norm(q[:3])
    if sin_half < 1e-12:
        return np.zeros(3)
    angle = 2.0 * np.arctan2(sin_half, q[3])
    return (angle / sin_half) * q[:3]


def _cross3(a, b):
    # np.cross has heavy per-call overhead for single 3-vectors
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def quat_rotate(q, v):
    """Rotate 3-vector v by unit quaternion q."""
    xyz = q[:3]
    t = 2.0 * _cross3(xyz, v)
    return v + q[3] * t + _cross3(xyz, t)


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pose:
    """End-effector or goal configuration: position plus unit quaternion."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(3).copy()
        quat = np.asarray(self.orientation, dtype=float).reshape(4).copy()
        if not np.all(np.isfinite(pos)) or not np.all(np.isfinite(quat)):
            raise ValueError("pose components must be finite")
        if abs(np.linalg.norm(quat) - 1.0) > QUAT_TOL:
            raise ValueError(
                f"quaternion norm {np.linalg.norm(quat):.12f} outside unit tolerance"
            )
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "orientation", quat)

    @staticmethod
    def identity(position=(0.0, 0.0, 0.0)):
        return Pose(np.asarray(position, dtype=float), IDENTITY_QUAT.copy())


def _pose_unchecked(position, orientation):
    """Internal constructor for hot loops; caller guarantees invariants."""
    p = object.__new__(Pose)
    object.__setattr__(p, "position", position)
    object.__setattr__(p, "orientation", orientation)
    return p


def integrate_pose(pose, command, dt):
    """One explicit Euler step of the rigid-body kinematics.

    Rotational velocity is taken in the world frame, so the increment
    quaternion left-multiplies the current orientation.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    position = pose.position + command.translational * dt
    rot = command.rotational
    if rot[0] == 0.0 and rot[1] == 0.0 and rot[2] == 0.0:
        return _pose_unchecked(position, pose.orientation)
    step = quat_from_rotvec(rot * dt)
    return _pose_unchecked(position, quat_normalize(quat_multiply(step, pose.orientation)))


@dataclass(frozen=True)
class Goal:
    """One candidate reaching target."""

    id: int
    pose: Pose
    label: str = ""


@dataclass(frozen=True)
class ControlCommand:
    """6D Cartesian velocity: translational (m/s) and rotational (rad/s)."""

    translational: np.ndarray
    rotational: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.translational, dtype=float).reshape(3).copy()
        r = np.asarray(self.rotational, dtype=float).reshape(3).copy()
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(r))):
            raise ValueError("command components must be finite")
        object.__setattr__(self, "translational", t)
        object.__setattr__(self, "rotational", r)

    @staticmethod
    def zero():
        return ControlCommand(np.zeros(3), np.zeros(3))

    @staticmethod
    def _unchecked(translational, rotational):
        """Internal constructor for hot loops; caller guarantees finiteness
        and must not mutate the arrays afterwards."""
        c = object.__new__(ControlCommand)
        object.__setattr__(c, "translational", translational)
        object.__setattr__(c, "rotational", rotational)
        return c

    @staticmethod
    def from_vector(v):
        v = np.asarray(v, dtype=float).reshape(N_DIMS)
        return ControlCommand(v[:3], v[3:])

    def as_vector(self):
        return np.concatenate([self.translational, self.rotational])

    def norm(self):
        return float(np.sqrt(np.dot(self.translational, self.translational)
                             + np.dot(self.rotational, self.rotational)))

    def is_zero(self):
        return not (self.translational.any() or self.rotational.any())

    def __add__(self, other):
        return ControlCommand(self.translational + other.translational,
                              self.rotational + other.rotational)

    def scaled(self, factor):
        return ControlCommand(self.translational * factor, self.rotational * factor)


def unit_command(k, sign=1):
    """Command of magnitude 1 along a single control dimension."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    k = Dim(k)
    v = np.zeros(N_DIMS)
    v[int(k)] = float(sign)
    return ControlCommand.from_vector(v)


@dataclass(frozen=True)
class ControlMode:
    """Subset of control dimensions operable at once through the interface.

    An inert mode has no dimensions and stands in for non-Cartesian
    functions (e.g. a gripper); it never contributes to disambiguation.
    """

    id: int
    dimensions: tuple
    inert: bool = False

    def __post_init__(self):
        dims = tuple(Dim(d) for d in self.dimensions)
        if self.inert:
            if dims:
                raise ValueError("inert mode must not carry dimensions")
        else:
            if not dims:
                raise ValueError("control mode needs at least one dimension")
            if len(set(dims)) != len(dims):
                raise ValueError("dimensions within a mode must be unique")
        object.__setattr__(self, "dimensions", dims)


@dataclass(frozen=True)
class InterfaceSpec:
    """A named partition of the 6 control dimensions into switchable modes."""

    name: str
    modes: tuple
    switch_order: tuple

    def __post_init__(self):
        modes = tuple(self.modes)
        order = tuple(int(i) for i in self.switch_order)
        ids = [m.id for m in modes]
        if len(set(ids)) != len(ids):
            raise ValueError("mode ids must be unique")
        covered = set()
        for m in modes:
            covered.update(m.dimensions)
        if covered != set(Dim):
            raise ValueError("interface modes must jointly cover all 6 dimensions")
        if sorted(order) != sorted(ids):
            raise ValueError("switch_order must be a permutation of mode ids")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "switch_order", order)

    @property
    def n_modes(self):
        return len(self.modes)

    def mode_by_id(self, mode_id):
        for m in self.modes:
            if m.id == mode_id:
                return m
        raise KeyError(f"no mode with id {mode_id}")

    def next_mode(self, mode_id):
        """Cycle to the mode after mode_id in switch order."""
        i = self.switch_order.index(mode_id)
        return self.switch_order[(i + 1) % len(self.switch_order)]


def default_interface(name):
    """Built-in interface layouts.

    joystick: a 2-axis device, five modes; head-array: switch-based device,
    seven single-dimension modes. The last mode of each is an inert
    placeholder (gripper stand-in) excluded from disambiguation.
    """
    if name == "joystick":
        modes = (
            ControlMode(0, (Dim.X, Dim.Y)),
            ControlMode(1, (Dim.Z,)),
            ControlMode(2, (Dim.ROLL, Dim.PITCH)),
            ControlMode(3, (Dim.YAW,)),
            ControlMode(4, (), inert=True),
        )
    elif name == "head-array":
        modes = tuple(ControlMode(i, (Dim(i),)) for i in range(N_DIMS)) + (
            ControlMode(N_DIMS, (), inert=True),
        )
    else:
        raise ValueError(f"unknown interface name: {name!r}")
    return InterfaceSpec(name, modes, tuple(m.id for m in modes))


@dataclass(frozen=True)
class BeliefState:
    """Probability vector over the scene's goals (a point on the simplex)."""

    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).reshape(-1).copy()
        if p.size == 0:
            raise ValueError("belief needs at least one goal")
        if not np.all(np.isfinite(p)):
            raise ValueError("belief entries must be finite")
        if np.any(p < -SIMPLEX_TOL) or np.any(p > 1.0 + SIMPLEX_TOL):
            raise ValueError("belief entries outside [0, 1]")
        if abs(float(p.sum()) - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"belief sum {p.sum():.12f} violates simplex constraint")
        object.__setattr__(self, "probabilities", p)

    @property
    def n_goals(self):
        return self.probabilities.size

    def normalized(self):
        """Re-project onto the simplex (clamp then renormalize)."""
        p = np.clip(self.probabilities, 0.0, 1.0)
        s = p.sum()
        if s <= 0.0:
            return uniform_belief(p.size)
        return BeliefState(p / s)


def uniform_belief(n_goals):
    """Maximum-entropy belief over n_goals."""
    if n_goals < 1:
        raise InvalidSceneError("cannot build a belief over zero goals")
    p = np.full(n_goals, 1.0 / n_goals)
    return BeliefState(p / p.sum())


@dataclass(frozen=True)
class Box:
    """Axis-aligned workspace bounds."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).reshape(3).copy()
        hi = np.asarray(self.hi, dtype=float).reshape(3).copy()
        if np.any(hi <= lo):
            raise ValueError("workspace box must have positive extent")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, point, tol=1e-9):
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= self.lo - tol) and np.all(p <= self.hi + tol))

    def center(self):
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class Scene:
    """Candidate goals plus the workspace they live in."""

    goals: tuple
    workspace: Box
    start_pose: Pose = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        goals = tuple(self.goals)
        if not goals:
            raise InvalidSceneError("scene needs at least one goal")
        ids = sorted(g.id for g in goals)
        if ids != list(range(len(goals))):
            raise InvalidSceneError("goal ids must be dense and unique from 0")
        for g in goals:
            if not self.workspace.contains(g.pose.position):
                raise InvalidSceneError(f"goal {g.id} lies outside the workspace")
        start = self.start_pose
        if start is None:
            start = Pose.identity(self.workspace.center())
        object.__setattr__(self, "goals", goals)
        object.__setattr__(self, "start_pose", start)

    @property
    def n_goals(self):
        return len(self.goals)

    def goal_positions(self):
        """(n_g, 3) array of goal positions, ordered by id."""
        ordered = sorted(self.goals, key=lambda g: g.id)
        return np.array([g.pose.position for g in ordered])
