"""Belief dynamics over goals.

Three interchangeable predictors are provided:
  - a continuous-time field update driven by command/scene coupling, integrated
    with explicit Euler and re-projected onto the probability simplex each step
  - a discrete-time recursive Bayesian update with a directedness likelihood
  - a memoryless distance-based predictor

All of them map (belief, command, context, params) -> belief and never mutate
their inputs.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import BeliefState, ControlCommand, Pose, uniform_belief
from .errors import NumericalError

DIRECTEDNESS_EPS = 1e-12


@lru_cache(maxsize=32)
def _identity(n):
    m = np.eye(n)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=32)
def _uniform_vec(n):
    v = np.full(n, 1.0 / n)
    v.setflags(write=False)
    return v


@lru_cache(maxsize=64)
def _mixing_transition(stay, n):
    m = stay * np.eye(n) + (1.0 - stay) / n * np.ones((n, n))
    m.setflags(write=False)
    return m


def _check_row_stochastic(matrix, what):
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be a square matrix")
    if np.any(m < 0.0):
        raise ValueError(f"{what} must be non-negative")
    if np.max(np.abs(m.sum(axis=1) - 1.0)) > 1e-9:
        raise ValueError(f"{what} rows must sum to 1")
    return m


@dataclass(frozen=True)
class FieldParams:
    """Parameters of the field-theoretic belief update.

    tau controls memory/decay (seconds), dt is the Euler step,
    proximity_radius bounds the sphere inside which closeness to a goal
    feeds the update, and control_gain scales how strongly command
    evidence excites or inhibits goal probabilities. Explicit transition /
    control matrices and a rest-state prior may be supplied; by default the
    transition is identity, the control matrix is control_gain * I and the
    rest state is uniform.
    """

    tau: float = 1.0
    dt: float = 0.1
    proximity_radius: float = 0.5
    control_gain: float = 20.0
    transition: np.ndarray = None
    control: np.ndarray = None
    rest_state: np.ndarray = None

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.proximity_radius <= 0.0:
            raise ValueError("proximity_radius must be positive")
        if self.transition is not None:
            object.__setattr__(
                self, "transition", _check_row_stochastic(self.transition, "transition matrix")
            )
        if self.control is not None:
            c = np.asarray(self.control, dtype=float)
            if c.ndim != 2 or c.shape[0] != c.shape[1]:
                raise ValueError("control matrix must be square")
            object.__setattr__(self, "control", c)
        if self.rest_state is not None:
            r = np.asarray(self.rest_state, dtype=float)
            if np.any(r < 0.0) or abs(r.sum() - 1.0) > 1e-9:
                raise ValueError("rest_state must be a probability vector")
            object.__setattr__(self, "rest_state", r)

    def rest_for(self, n_goals):
        if self.rest_state is not None:
            if self.rest_state.size != n_goals:
                raise ValueError("rest_state length does not match goal count")
            return self.rest_state
        return _uniform_vec(n_goals)


@dataclass(frozen=True)
class BayesParams:
    """Recursive Bayesian update parameters.

    likelihood_sharpness is the exponent on the directedness cosine;
    stay_probability shapes the default goal transition matrix
    (stay * I mixed with a uniform jump) when no explicit matrix is given.
    Defaults frozen by one calibration pass of the benchmark.
    """

    likelihood_sharpness: float = 2.0
    stay_probability: float = 0.9
    transition: np.ndarray = None

    def __post_init__(self):
        if self.likelihood_sharpness <= 0.0:
            raise ValueError("likelihood_sharpness must be positive")
        if not 0.0 <= self.stay_probability <= 1.0:
            raise ValueError("stay_probability must lie in [0, 1]")
        if self.transition is not None:
            object.__setattr__(
                self, "transition", _check_row_stochastic(self.transition, "transition matrix")
            )

    def transition_for(self, n_goals):
        if self.transition is not None:
            if self.transition.shape[0] != n_goals:
                raise ValueError("transition matrix size does not match goal count")
            return self.transition
        return _mixing_transition(self.stay_probability, n_goals)


@dataclass(frozen=True)
class MemoryParams:
    """Length scale (meters) of the distance-based predictor."""

    length_scale: float = 1.0

    def __post_init__(self):
        if self.length_scale <= 0.0:
            raise ValueError("length_scale must be positive")


@dataclass(frozen=True)
class InferenceContext:
    """Task-relevant features the predictors read: robot pose, goals and the
    per-goal autonomy commands (None when no autonomy signal is available,
    in which case command agreement contributes nothing)."""

    robot_pose: Pose
    goals: tuple
    autonomy_commands: tuple = None
    goal_positions: np.ndarray = None

    def __post_init__(self):
        goals = tuple(self.goals)
        if not goals:
            raise ValueError("context needs at least one goal")
        if self.autonomy_commands is not None:
            cmds = tuple(self.autonomy_commands)
            if len(cmds) != len(goals):
                raise ValueError("need one autonomy command per goal")
            object.__setattr__(self, "autonomy_commands", cmds)
        pos = self.goal_positions
        if pos is None:
            pos = np.array([g.pose.position for g in goals])
        object.__setattr__(self, "goals", goals)
        object.__setattr__(self, "goal_positions", pos)

    @property
    def n_goals(self):
        return len(self.goals)


def _directedness_cosines(u_trans, offsets, dists):
    """Cosine between the translational command and each goal offset.

    Returns 0 (neutral) for goals whose offset is degenerate or when the
    command itself has no translational part.
    """
    u_norm = np.sqrt(np.dot(u_trans, u_trans))
    if u_norm < DIRECTEDNESS_EPS:
        return np.zeros(len(dists))
    cos = np.zeros(len(dists))
    ok = dists >= DIRECTEDNESS_EPS
    if np.any(ok):
        cos[ok] = (offsets[ok] @ u_trans) / (dists[ok] * u_norm)
    return cos


def compute_xi(u_h, ctx, proximity_radius):
    """Per-goal evidence coupling command and scene geometry.

    Three additive components per goal: directedness of the translational
    command toward the goal (neutral value 0.5 when undefined), agreement
    between the rotational parts of the human and autonomy commands, and
    closeness to the goal inside proximity_radius.
    """
    offsets = ctx.goal_positions - ctx.robot_pose.position
    dists = np.sqrt((offsets * offsets).sum(axis=1))
    eta = _directedness_cosines(u_h.translational, offsets, dists)
    directedness = 0.5 * (1.0 + eta)

    if ctx.autonomy_commands is not None and np.any(u_h.rotational):
        auto_rot = np.array([c.rotational for c in ctx.autonomy_commands])
        agreement = auto_rot @ u_h.rotational
    else:
        agreement = 0.0

    proximity = np.maximum(0.0, 1.0 - dists / proximity_radius)
    return directedness + agreement + proximity


def biased_sigmoid(xi):
    """Logistic nonlinearity shifted to be zero-centered, range (-0.5, 0.5)."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty_like(xi)
    pos = xi >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-xi[pos]))
    e = np.exp(xi[~pos])
    out[~pos] = e / (1.0 + e)
    return out - 0.5


def _belief_unchecked(p):
    """Internal constructor for hot loops; caller guarantees the simplex
    invariants (non-negative entries summing to 1)."""
    b = object.__new__(BeliefState)
    object.__setattr__(b, "probabilities", p)
    return b


def enforce_simplex(raw):
    """Project a raw vector back onto the probability simplex.

    Entries are clamped to [0, 1] and renormalized; a degenerate all-zero
    clamp yields the uniform distribution.
    """
    p = np.clip(np.asarray(raw, dtype=float), 0.0, 1.0)
    s = p.sum()
    if s <= 0.0:
        return uniform_belief(p.size)
    return _belief_unchecked(p / s)


def most_confident_goal(belief):
    """Goal id with the highest probability; lowest index wins ties."""
    return int(np.argmax(belief.probabilities))


def step_belief_field(p, u_h, ctx, params):
    """One Euler step of the field dynamics, re-projected onto the simplex.

    The decay component relaxes the belief toward the rest state on the
    time scale tau; the command-driven component is skipped entirely for a
    zero command so that the belief decays to rest in the absence of input.
    """
    prob = p.probabilities
    n = prob.size
    rest = params.rest_for(n)
    if params.transition is None:
        decayed = prob
    else:
        if params.transition.shape[0] != n:
            raise ValueError("transition matrix size does not match goal count")
        decayed = params.transition.T @ prob
    rate = (rest - decayed) / params.tau

    with np.errstate(over="ignore", invalid="ignore"):  # non-finite raised below
        if not u_h.is_zero():
            xi = compute_xi(u_h, ctx, params.proximity_radius)
            drive = biased_sigmoid(xi)
            if params.control is None:
                rate = rate + params.control_gain * drive
            else:
                if params.control.shape[0] != n:
                    raise ValueError("control matrix size does not match goal count")
                rate = rate + params.control @ drive

        raw = prob + params.dt * rate
    if not np.all(np.isfinite(raw)):
        raise NumericalError(
            f"field update produced non-finite belief (tau={params.tau}, dt={params.dt})"
        )
    return enforce_simplex(raw)


def step_belief_bayes(p, u_h, ctx, params):
    """Recursive Bayesian update: transition prediction then likelihood.

    The likelihood is exp(sharpness * directedness cosine) per goal and
    uniform when the command is zero.
    """
    prob = p.probabilities
    n = prob.size
    if params.transition is None and params.stay_probability == 1.0:
        prior = prob
    else:
        prior = params.transition_for(n).T @ prob

    if u_h.is_zero():
        if prior is prob:
            return p
        posterior = prior
    else:
        offsets = ctx.goal_positions - ctx.robot_pose.position
        dists = np.sqrt((offsets * offsets).sum(axis=1))
        eta = _directedness_cosines(u_h.translational, offsets, dists)
        loglik = params.likelihood_sharpness * eta
        lik = np.exp(loglik - loglik.max())
        posterior = lik * prior

    s = posterior.sum()
    if not np.isfinite(s) or s <= 0.0:
        raise NumericalError("bayes update produced a degenerate posterior")
    return _belief_unchecked(posterior / s)


def memory_based_belief(history, ctx, params=MemoryParams()):
    """Distance-based belief from the current (last) pose in history.

    Accepts a history of Pose objects or raw positions; only the most
    recent entry matters. Scores decay exponentially with distance, shifted
    by the nearest goal so the closest always scores exp(0).
    """
    if not len(history):
        raise ValueError("position history must be non-empty")
    last = history[-1]
    current = np.asarray(getattr(last, "position", last), dtype=float).reshape(3)
    offsets = ctx.goal_positions - current
    dists = np.sqrt((offsets * offsets).sum(axis=1))
    score = np.exp(-(dists - dists.min()) / params.length_scale)
    return _belief_unchecked(score / score.sum())
