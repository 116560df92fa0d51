"""Point-robot world stepping, simulated operator, trials, and benchmark.

A trial runs the closed loop: operator command -> belief update -> autonomy
command for the most likely goal -> confidence-gated blend -> kinematics.
The Monte Carlo benchmark replays identical trials under each belief
predictor and compares how often the top goal matches the ground truth.
"""

import io
from dataclasses import dataclass, field as dataclass_field, replace
from typing import NamedTuple

import numpy as np

from .arbitration import (
    BlendingParams,
    PotentialFieldParams,
    blend,
    blending_alpha,
    make_context_builder,
    potential_field_command,
)
from .core import (
    ControlCommand,
    Goal,
    InterfaceSpec,
    Pose,
    Scene,
    _pose_unchecked,
    default_interface,
    integrate_pose,
    quat_conjugate,
    quat_multiply,
    quat_to_rotvec,
    uniform_belief,
)
from .disambiguation import DisambiguationParams
from .errors import ConfigError, UndefinedAccuracyError
from .inference import (
    BayesParams,
    FieldParams,
    InferenceContext,
    MemoryParams,
    memory_based_belief,
    step_belief_bayes,
    step_belief_field,
)

PREDICTORS = ("field", "bayes", "memory")

GOAL_POSITION_TOL = 0.05   # m
GOAL_ORIENTATION_TOL = 0.2  # rad

EVENT_NONE = "none"
EVENT_MODE_SWITCH = "manual_mode_switch"
EVENT_DISAMB = "disambiguation_request"
EVENT_GOAL_TRANSITION = "goal_transition"


@dataclass(frozen=True)
class SimulatedHumanParams:
    """Noisy straight-line operator model.

    The command is a unit direction toward the intended goal, perturbed by
    a random rotation (angle std direction_noise_sigma), scaled by speed.
    Commands drop to zero with dropout_probability per step and for one
    contiguous silent window; a None window start is drawn per trial.
    """

    direction_noise_sigma: float = 0.2     # rad
    dropout_probability: float = 0.1
    silent_window: tuple = (None, 0.1)     # (start, length) as trial fractions
    goal_transition_interval: tuple = (5, 8)  # steps, inclusive
    speed: float = 0.5                     # m/s

    def __post_init__(self):
        if self.direction_noise_sigma < 0.0:
            raise ValueError("direction_noise_sigma must be non-negative")
        if not 0.0 <= self.dropout_probability <= 1.0:
            raise ValueError("dropout_probability must lie in [0, 1]")
        start, length = self.silent_window
        if not 0.0 <= length <= 1.0:
            raise ValueError("silent window length must be a fraction in [0, 1]")
        if start is not None and not 0.0 <= start <= 1.0:
            raise ValueError("silent window start must be a fraction in [0, 1]")
        lo, hi = self.goal_transition_interval
        if not (isinstance(lo, int) and isinstance(hi, int)) or lo < 1 or hi < lo:
            raise ValueError("goal_transition_interval must be integers with 1 <= low <= high")
        if self.speed < 0.0:
            raise ValueError("speed must be non-negative")


@dataclass(frozen=True)
class TrialConfig:
    """Everything one trial needs; benchmark trials share a base config."""

    scene: Scene
    interface: InterfaceSpec = dataclass_field(default_factory=lambda: default_interface("joystick"))
    predictor: str = "field"
    seed: int = 0
    dt: float = 0.1
    max_steps: int = 800
    human: SimulatedHumanParams = dataclass_field(default_factory=SimulatedHumanParams)
    blending: BlendingParams = dataclass_field(default_factory=BlendingParams)
    field: FieldParams = dataclass_field(default_factory=FieldParams)
    bayes: BayesParams = dataclass_field(default_factory=BayesParams)
    memory: MemoryParams = dataclass_field(default_factory=MemoryParams)
    autonomy: PotentialFieldParams = dataclass_field(default_factory=PotentialFieldParams)
    disamb: DisambiguationParams = dataclass_field(default_factory=DisambiguationParams)
    assistance_enabled: bool = False

    def __post_init__(self):
        if self.predictor not in PREDICTORS:
            raise ConfigError(f"unknown predictor {self.predictor!r}; expected one of {PREDICTORS}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be at least 1")


class TrialLog:
    """Column-oriented per-step trial record."""

    CSV_BASE_COLUMNS = (
        "t,x,y,z,qx,qy,qz,qw,"
        "uhx,uhy,uhz,uhrx,uhry,uhrz,"
        "uax,uay,uaz,uarx,uary,uarz,"
        "ux,uy,uz,urx,ury,urz,alpha"
    )

    def __init__(self, config, t, positions, orientations, u_h, u_a, u,
                 alpha, beliefs, modes, truths, events):
        self.config = config
        self.t = t
        self.positions = positions
        self.orientations = orientations
        self.u_h = u_h
        self.u_a = u_a
        self.u = u
        self.alpha = alpha
        self.beliefs = beliefs
        self.modes = modes
        self.truths = truths
        self.events = events

    @property
    def n_steps(self):
        return self.t.shape[0]

    @property
    def n_goals(self):
        return self.beliefs.shape[1]

    def duration(self):
        return self.n_steps * self.config.dt

    def csv_header(self):
        probs = ",".join(f"p{i}" for i in range(self.n_goals))
        return f"{self.CSV_BASE_COLUMNS},{probs},mode,truth,event"

    def to_csv(self):
        """Render the whole log; float formatting is shortest round-trip,
        so identical logs give identical bytes."""
        out = io.StringIO()
        out.write(self.csv_header())
        out.write("\n")
        for i in range(self.n_steps):
            floats = (
                [self.t[i]],
                self.positions[i],
                self.orientations[i],
                self.u_h[i],
                self.u_a[i],
                self.u[i],
                [self.alpha[i]],
                self.beliefs[i],
            )
            cells = [repr(float(v)) for group in floats for v in group]
            cells.append(str(int(self.modes[i])))
            cells.append(str(int(self.truths[i])))
            cells.append(self.events[i])
            out.write(",".join(cells))
            out.write("\n")
        return out.getvalue()

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv())


def step_kinematics(pose, u, dt):
    """Euler step of the point robot; orientation renormalized each step."""
    return integrate_pose(pose, u, dt)


def _random_axis(rng):
    while True:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n


def _zero_command():
    return ControlCommand._unchecked(np.zeros(3), np.zeros(3))


def simulated_human_command(pose, intended, params, rng, trial_fraction=None):
    """One noisy operator command toward the intended goal.

    Zero inside the silent window (when the window start is resolved and
    trial_fraction is supplied), zero with dropout_probability, zero when
    already at the goal; otherwise speed * (noisily rotated unit direction).
    Purely translational.
    """
    if trial_fraction is not None:
        start, length = params.silent_window
        if start is not None and start <= trial_fraction < start + length:
            return _zero_command()
    if params.dropout_probability > 0.0 and rng.random() < params.dropout_probability:
        return _zero_command()
    offset = intended.pose.position - pose.position
    dist = np.sqrt(offset @ offset)
    if dist < 1e-12:
        return _zero_command()
    direction = offset / dist
    if params.direction_noise_sigma > 0.0:
        axis = _random_axis(rng)
        angle = rng.normal(0.0, params.direction_noise_sigma)
        # Rodrigues rotation of the unit direction about the random axis
        c = np.cos(angle)
        s = np.sin(angle)
        cross = np.array(
            [
                axis[1] * direction[2] - axis[2] * direction[1],
                axis[2] * direction[0] - axis[0] * direction[2],
                axis[0] * direction[1] - axis[1] * direction[0],
            ]
        )
        direction = direction * c + cross * s + axis * ((axis @ direction) * (1.0 - c))
    return ControlCommand._unchecked(params.speed * direction, np.zeros(3))


def _goal_reached(pose, goal):
    if np.linalg.norm(goal.pose.position - pose.position) > GOAL_POSITION_TOL:
        return False
    err = quat_to_rotvec(quat_multiply(goal.pose.orientation, quat_conjugate(pose.orientation)))
    return np.linalg.norm(err) <= GOAL_ORIENTATION_TOL


def _resolve_silent_window(params, rng):
    """Draw the window start when unset so the whole window fits the trial."""
    start, length = params.silent_window
    if length <= 0.0:
        return replace(params, silent_window=(None, 0.0))
    if start is None:
        start = float(rng.uniform(0.0, max(0.0, 1.0 - length)))
    return replace(params, silent_window=(start, length))


def _open_loop_rollout(config):
    """Operator + kinematics pass with assistance off.

    The belief never feeds back into motion here, so every predictor can
    share one rollout; the random stream is consumed exactly as in the
    closed-loop path.
    """
    scene = config.scene
    goals = tuple(sorted(scene.goals, key=lambda g: g.id))
    n_goals = len(goals)
    n_max = config.max_steps
    dt = config.dt
    rng = np.random.default_rng(config.seed)

    human = _resolve_silent_window(config.human, rng)
    lo, hi = human.goal_transition_interval

    t = np.empty(n_max)
    positions = np.empty((n_max, 3))
    orientations = np.empty((n_max, 4))
    u_h_log = np.empty((n_max, 6))
    truths = np.empty(n_max, dtype=int)
    events = []

    pose = scene.start_pose
    truth = int(rng.integers(0, n_goals))
    steps_until_change = int(rng.integers(lo, hi + 1))

    for i in range(n_max):
        event = EVENT_NONE
        if steps_until_change == 0:
            new_truth = int(rng.integers(0, n_goals))
            if new_truth != truth:
                event = EVENT_GOAL_TRANSITION
            truth = new_truth
            steps_until_change = int(rng.integers(lo, hi + 1))
        steps_until_change -= 1

        u_h = simulated_human_command(pose, goals[truth], human, rng, i / n_max)

        t[i] = i * dt
        positions[i] = pose.position
        orientations[i] = pose.orientation
        u_h_log[i, :3] = u_h.translational
        u_h_log[i, 3:] = u_h.rotational
        truths[i] = truth
        events.append(event)

        pose = step_kinematics(pose, u_h, dt)

    return goals, t, positions, orientations, u_h_log, truths, events


def _belief_pass(config, goals, positions, orientations, u_h_log):
    """Belief trajectory for one predictor over a recorded rollout."""
    n = positions.shape[0]
    n_goals = len(goals)
    goal_positions = np.array([g.pose.position for g in goals])
    beliefs = np.empty((n, n_goals))
    belief = uniform_belief(n_goals)
    predictor = config.predictor
    for i in range(n):
        pose = _pose_unchecked(positions[i], orientations[i])
        u_h = ControlCommand._unchecked(u_h_log[i, :3], u_h_log[i, 3:])
        ctx = InferenceContext(pose, goals, None, goal_positions)
        if predictor == "field":
            belief = step_belief_field(belief, u_h, ctx, config.field)
        elif predictor == "bayes":
            belief = step_belief_bayes(belief, u_h, ctx, config.bayes)
        else:
            belief = memory_based_belief((pose,), ctx, config.memory)
        beliefs[i] = belief.probabilities
    return beliefs


def _run_trial_open_loop(config):
    goals, t, positions, orientations, u_h_log, truths, events = _open_loop_rollout(config)
    beliefs = _belief_pass(config, goals, positions, orientations, u_h_log)
    n = t.shape[0]
    mode_id = config.interface.switch_order[0]
    return TrialLog(
        config,
        t,
        positions,
        orientations,
        u_h_log,
        np.zeros((n, 6)),
        u_h_log.copy(),
        np.zeros(n),
        beliefs,
        np.full(n, mode_id, dtype=int),
        truths,
        events,
    )


def _run_trial_closed_loop(config):
    scene = config.scene
    goals = tuple(sorted(scene.goals, key=lambda g: g.id))
    n_goals = len(goals)
    n_max = config.max_steps
    dt = config.dt
    rng = np.random.default_rng(config.seed)

    human = _resolve_silent_window(config.human, rng)
    lo, hi = human.goal_transition_interval
    ctx_builder = make_context_builder(scene, config.autonomy)

    t = np.empty(n_max)
    positions = np.empty((n_max, 3))
    orientations = np.empty((n_max, 4))
    u_h_log = np.empty((n_max, 6))
    u_a_log = np.empty((n_max, 6))
    u_log = np.empty((n_max, 6))
    alpha_log = np.empty(n_max)
    beliefs = np.empty((n_max, n_goals))
    modes = np.empty(n_max, dtype=int)
    truths = np.empty(n_max, dtype=int)
    events = []

    pose = scene.start_pose
    belief = uniform_belief(n_goals)
    mode_id = config.interface.switch_order[0]
    truth = int(rng.integers(0, n_goals))
    steps_until_change = int(rng.integers(lo, hi + 1))

    n_logged = 0
    for i in range(n_max):
        event = EVENT_NONE
        if steps_until_change == 0:
            new_truth = int(rng.integers(0, n_goals))
            if new_truth != truth:
                event = EVENT_GOAL_TRANSITION
            truth = new_truth
            steps_until_change = int(rng.integers(lo, hi + 1))
        steps_until_change -= 1

        u_h = simulated_human_command(pose, goals[truth], human, rng, i / n_max)

        ctx = ctx_builder(pose)
        if config.predictor == "field":
            belief = step_belief_field(belief, u_h, ctx, config.field)
        elif config.predictor == "bayes":
            belief = step_belief_bayes(belief, u_h, ctx, config.bayes)
        else:
            belief = memory_based_belief((pose,), ctx, config.memory)

        g_star = int(np.argmax(belief.probabilities))
        u_a = potential_field_command(pose, goals[g_star], scene, config.autonomy)
        alpha = blending_alpha(float(belief.probabilities[g_star]), n_goals, config.blending)
        u = blend(u_h, u_a, alpha)

        t[i] = i * dt
        positions[i] = pose.position
        orientations[i] = pose.orientation
        u_h_log[i, :3] = u_h.translational
        u_h_log[i, 3:] = u_h.rotational
        u_a_log[i, :3] = u_a.translational
        u_a_log[i, 3:] = u_a.rotational
        u_log[i, :3] = u.translational
        u_log[i, 3:] = u.rotational
        alpha_log[i] = alpha
        beliefs[i] = belief.probabilities
        modes[i] = mode_id
        truths[i] = truth
        events.append(event)
        n_logged = i + 1

        pose = step_kinematics(pose, u, dt)
        if _goal_reached(pose, goals[truth]):
            break

    n = n_logged
    return TrialLog(
        config,
        t[:n].copy(),
        positions[:n].copy(),
        orientations[:n].copy(),
        u_h_log[:n].copy(),
        u_a_log[:n].copy(),
        u_log[:n].copy(),
        alpha_log[:n].copy(),
        beliefs[:n].copy(),
        modes[:n].copy(),
        truths[:n].copy(),
        events[:n],
    )


def run_trial(config):
    """Run one trial and return its complete log.

    The ground-truth goal is resampled every 5-8 steps (configurable); the
    operator model then aims for the new goal. With assistance disabled the
    robot follows the raw operator command and the trial always runs
    max_steps; with assistance enabled the autonomy command is blended in
    and the trial ends early once the pose is within tolerance of the
    intended goal.
    """
    if config.assistance_enabled:
        return _run_trial_closed_loop(config)
    return _run_trial_open_loop(config)


def inference_accuracy(log):
    """Fraction of nonzero-operator-command steps whose belief argmax
    matches the ground-truth goal."""
    active = np.any(log.u_h != 0.0, axis=1)
    n_active = int(active.sum())
    if n_active == 0:
        raise UndefinedAccuracyError("no steps with a nonzero operator command")
    predicted = np.argmax(log.beliefs, axis=1)
    correct = int(np.sum(active & (predicted == log.truths)))
    return correct / n_active


class EventCounts(NamedTuple):
    mode_switches: int
    disambiguation_requests: int
    button_presses: int


def count_events(log):
    switches = log.events.count(EVENT_MODE_SWITCH)
    requests = log.events.count(EVENT_DISAMB)
    return EventCounts(switches, requests, switches + requests)


class SkewnessResult(NamedTuple):
    value: float
    defined: bool   # False when < 3 samples make the moment meaningless


def request_skewness(request_times, trial_duration):
    """Bias-corrected sample skewness of request times normalized by the
    trial duration. Returns None when there were no requests; 0 with
    defined=False for fewer than 3."""
    if trial_duration <= 0.0:
        raise ValueError("trial_duration must be positive")
    times = np.asarray(request_times, dtype=float)
    if times.size == 0:
        return None
    x = times / trial_duration
    n = x.size
    if n < 3:
        return SkewnessResult(0.0, False)
    d = x - x.mean()
    m2 = float(np.mean(d**2))
    m3 = float(np.mean(d**3))
    if m2 <= 1e-18:
        return SkewnessResult(0.0, True)
    g1 = m3 / m2**1.5
    corrected = g1 * np.sqrt(n * (n - 1)) / (n - 2)
    return SkewnessResult(float(corrected), True)


@dataclass(frozen=True)
class BenchmarkReport:
    accuracies: dict     # predictor -> (n_trials,) array of per-trial accuracy
    config_digest: str
    n_trials: int

    def mean(self, predictor):
        return float(np.mean(self.accuracies[predictor]))

    def std(self, predictor):
        # population std so a single trial reports 0, not NaN
        return float(np.std(self.accuracies[predictor]))

    def to_json_dict(self):
        out = {
            pred: {"mean": self.mean(pred), "std": self.std(pred), "n": self.n_trials}
            for pred in PREDICTORS
        }
        out["configDigest"] = self.config_digest
        return out


def _random_scene(rng, workspace, n_goals, start_pose):
    lo = workspace.lo
    hi = workspace.hi
    goals = []
    for gid in range(n_goals):
        position = rng.uniform(lo, hi)
        q = rng.normal(size=4)
        while np.linalg.norm(q) < 1e-9:
            q = rng.normal(size=4)
        goals.append(Goal(gid, Pose(position, q / np.linalg.norm(q))))
    return Scene(tuple(goals), workspace, start_pose)


def run_benchmark(base, n_trials, goal_range=(3, 5), max_steps_range=(430, 800)):
    """Monte Carlo comparison of the three belief predictors.

    Each trial draws its own goal count, random scene, and step budget from
    a child seed of (base.seed, trial index), then runs once per predictor
    with identical seeds so all three see the same operator command stream.
    Deterministic for a fixed base config.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    g_lo, g_hi = goal_range
    if not 1 <= g_lo <= g_hi:
        raise ValueError("goal_range must satisfy 1 <= low <= high")
    s_lo, s_hi = max_steps_range
    if not 1 <= s_lo <= s_hi:
        raise ValueError("max_steps_range must satisfy 1 <= low <= high")

    accuracies = {pred: np.empty(n_trials) for pred in PREDICTORS}
    for trial in range(n_trials):
        scene_ss, trial_ss = np.random.SeedSequence([base.seed, trial]).spawn(2)
        scene_rng = np.random.default_rng(scene_ss)
        n_goals = int(scene_rng.integers(g_lo, g_hi + 1))
        scene = _random_scene(scene_rng, base.scene.workspace, n_goals, base.scene.start_pose)
        max_steps = int(scene_rng.integers(s_lo, s_hi + 1))
        trial_seed = int(trial_ss.generate_state(1, np.uint64)[0])

        cfg = replace(
            base,
            scene=scene,
            seed=trial_seed,
            max_steps=max_steps,
            assistance_enabled=False,
        )
        # assistance is off, so all predictors share one operator rollout;
        # equivalent to (but much cheaper than) a run_trial per predictor
        goals, _, positions, orientations, u_h_log, truths, _ = _open_loop_rollout(cfg)
        active = np.any(u_h_log != 0.0, axis=1)
        n_active = int(active.sum())
        if n_active == 0:
            raise UndefinedAccuracyError(f"trial {trial} has no nonzero operator commands")
        for pred in PREDICTORS:
            beliefs = _belief_pass(
                replace(cfg, predictor=pred), goals, positions, orientations, u_h_log
            )
            predicted = np.argmax(beliefs, axis=1)
            accuracies[pred][trial] = np.sum(active & (predicted == truths)) / n_active

    from .config import benchmark_digest

    digest = benchmark_digest(base, n_trials, goal_range, max_steps_range)
    return BenchmarkReport(accuracies, digest, n_trials)
