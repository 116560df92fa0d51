"""Control-mode selection by forward-projected belief separation.

For every control dimension the belief is projected forward under a
sustained unit command in both directions. Four shape features of the
projected belief — certainty, pairwise spread, top-two margin, and the
spread of per-goal spatial gradients — combine into a per-dimension score;
per-mode sums pick the mode whose motion would tell the goals apart
fastest.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .core import DIM_NAMES, N_DIMS, integrate_pose, unit_command
from .errors import DegenerateProjectionError, NumericalError
from .inference import step_belief_field

DISPLACEMENT_EPS = 1e-9


@dataclass(frozen=True)
class DisambiguationParams:
    """Projection horizons (seconds past the query time), step size, and
    the short-term/long-term mixing weight."""

    t_b_offset: float = 0.5
    t_c_offset: float = 2.0
    dt: float = 0.1
    weight: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.t_b_offset < self.t_c_offset:
            raise ValueError("need 0 < t_b_offset < t_c_offset")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("weight must lie in [0, 1]")

    def step_counts(self):
        nb = int(round(self.t_b_offset / self.dt))
        nc = int(round(self.t_c_offset / self.dt))
        if not 1 <= nb < nc:
            raise ValueError("horizons must span at least one dt step each")
        return nb, nc


class FeatureSet(NamedTuple):
    """Belief-shape features for one (dimension, sign) projection."""

    gamma: float    # certainty: max probability
    lam: float      # spread: summed pairwise probability distances
    omega: float    # margin: top-1 minus top-2
    upsilon: float  # gradient spread across the two horizons

    def as_dict(self):
        return {
            "gamma": self.gamma,
            "lambda": self.lam,
            "omega": self.omega,
            "upsilon": self.upsilon,
        }


@dataclass(frozen=True)
class DisambiguationResult:
    d_plus: np.ndarray       # (6,) positive-direction scores
    d_minus: np.ndarray      # (6,) negative-direction scores
    d_k: np.ndarray          # (6,) per-dimension totals
    d_m: dict                # mode id -> score
    m_star: int
    k_star: int
    features: dict           # (dim, sign) -> FeatureSet

    def to_json_dict(self):
        by_dim = {}
        for dim in range(N_DIMS):
            name = DIM_NAMES[dim]
            by_dim[name] = {
                "plus": self.features[(dim, 1)].as_dict(),
                "minus": self.features[(dim, -1)].as_dict(),
            }
        return {
            "dPlus": [float(v) for v in self.d_plus],
            "dMinus": [float(v) for v in self.d_minus],
            "dK": [float(v) for v in self.d_k],
            "dM": {str(mid): float(v) for mid, v in sorted(self.d_m.items())},
            "mStar": int(self.m_star),
            "kStar": int(self.k_star),
            "features": by_dim,
        }


def forward_project(p, pose, k, sign, params, field, ctx_builder):
    """Belief snapshots under a sustained unit command sign*e^k.

    Runs the same field update as live inference (with autonomy commands
    recomputed at each projected pose) while the kinematics follow the probe
    command alone. Returns (p_at_tb, p_at_tc, x_at_tb, x_at_tc) where x is
    the scalar displacement component along dimension k. Inputs are never
    mutated.
    """
    n_b, n_c = params.step_counts()
    proj_field = field if field.dt == params.dt else replace(field, dt=params.dt)
    probe = unit_command(k, sign)

    belief = p
    cur = pose
    p_tb = None
    try:
        for step in range(1, n_c + 1):
            ctx = ctx_builder(cur)
            belief = step_belief_field(belief, probe, ctx, proj_field)
            cur = integrate_pose(cur, probe, params.dt)
            if step == n_b:
                p_tb = belief
    except NumericalError as e:
        raise NumericalError(
            f"projection along {DIM_NAMES[k]} (sign {sign:+d}) failed: {e}"
        ) from e

    x0 = float(pose.position[k]) if k < 3 else 0.0
    x_tb = x0 + sign * n_b * params.dt
    x_tc = x0 + sign * n_c * params.dt
    return p_tb, belief, x_tb, x_tc


def feature_gamma(p):
    """Certainty: the largest goal probability."""
    return float(np.max(p.probabilities))


def feature_lambda(p):
    """Spread: sum of pairwise absolute probability differences."""
    prob = p.probabilities
    return float(np.abs(prob[:, None] - prob[None, :]).sum() / 2.0)


def feature_omega(p):
    """Margin between the two largest probabilities; 0 when only one goal."""
    prob = p.probabilities
    if prob.size < 2:
        return 0.0
    top = np.partition(prob, -2)
    return float(top[-1] - top[-2])


def feature_upsilon(p_tb, p_tc, x_tb, x_tc):
    """Spread of per-goal spatial gradients between the two horizons."""
    dx = x_tc - x_tb
    if abs(dx) <= DISPLACEMENT_EPS:
        raise DegenerateProjectionError(
            "projection produced no displacement; gradients are undefined"
        )
    grads = (p_tc.probabilities - p_tb.probabilities) / dx
    return float(np.abs(grads[:, None] - grads[None, :]).sum() / 2.0)


def dimension_metric(features_plus, features_minus, weight):
    """Combine the four features of both probe directions into one score.

    Each direction contributes weight * (gamma * lam * omega) short-term
    plus (1 - weight) * upsilon long-term; the directions add.
    """
    if not 0.0 <= weight <= 1.0:
        raise ValueError("weight must lie in [0, 1]")

    def one(f):
        g, l, o, u = f
        v = weight * (g * l * o) + (1.0 - weight) * u
        if not np.isfinite(v):
            raise NumericalError("non-finite disambiguation score")
        return float(v)

    d_plus = one(features_plus)
    d_minus = one(features_minus)
    return d_plus, d_minus, d_plus + d_minus


def mode_metric(d_k, interface):
    """Per-mode score: sum of member dimensions' d_k; inert modes score 0."""
    d_k = np.asarray(d_k, dtype=float).reshape(N_DIMS)
    out = {}
    for mode in interface.modes:
        if mode.inert:
            out[mode.id] = 0.0
        else:
            out[mode.id] = float(sum(d_k[int(dim)] for dim in mode.dimensions))
    return out


def select_disambiguation_mode(p, pose, interface, current_mode, params, field, ctx_builder):
    """Score every dimension in both directions and pick the best mode.

    Ties in the mode score go to the current mode, then to the lowest mode
    id; the best dimension k_star ties to the lowest index. Deterministic:
    no randomness anywhere in the sweep.
    """
    interface.mode_by_id(current_mode)  # validates membership

    d_plus = np.zeros(N_DIMS)
    d_minus = np.zeros(N_DIMS)
    d_k = np.zeros(N_DIMS)
    features = {}
    for k in range(N_DIMS):
        per_sign = {}
        for sign in (1, -1):
            p_tb, p_tc, x_tb, x_tc = forward_project(
                p, pose, k, sign, params, field, ctx_builder
            )
            per_sign[sign] = FeatureSet(
                feature_gamma(p_tb),
                feature_lambda(p_tb),
                feature_omega(p_tb),
                feature_upsilon(p_tb, p_tc, x_tb, x_tc),
            )
            features[(k, sign)] = per_sign[sign]
        d_plus[k], d_minus[k], d_k[k] = dimension_metric(
            per_sign[1], per_sign[-1], params.weight
        )

    d_m = mode_metric(d_k, interface)
    best = max(d_m.values())
    tied = [mid for mid, v in d_m.items() if v == best]
    m_star = current_mode if current_mode in tied else min(tied)
    k_star = int(np.argmax(d_k))
    return DisambiguationResult(d_plus, d_minus, d_k, d_m, m_star, k_star, features)
