"""JSON configuration documents: parsing, serialization, stable digests.

One document describes a full trial setup (scene, interface, predictor
parameters, operator model) plus optional benchmark settings. Matrices are
stored row-major; control dimensions may be named ("x".."yaw") or indexed.
"""

import hashlib
import json

import numpy as np

from .arbitration import BlendingParams, PotentialFieldParams
from .core import (
    DIM_BY_NAME,
    DIM_NAMES,
    Box,
    ControlMode,
    Dim,
    Goal,
    InterfaceSpec,
    Pose,
    Scene,
    default_interface,
)
from .disambiguation import DisambiguationParams
from .errors import ConfigError
from .inference import BayesParams, FieldParams, MemoryParams


def _require(mapping, key, where):
    if key not in mapping:
        raise ConfigError(f"missing {key!r} in {where}")
    return mapping[key]


def _vector(value, size, where):
    try:
        v = np.asarray(value, dtype=float).reshape(size)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{where} must be a length-{size} number list") from e
    if not np.all(np.isfinite(v)):
        raise ConfigError(f"{where} must be finite")
    return v


def _matrix(value, where):
    if value is None:
        return None
    try:
        m = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{where} must be a nested number list") from e
    if m.ndim != 2:
        raise ConfigError(f"{where} must be two-dimensional")
    return m


def pose_from_dict(doc, where="pose"):
    position = _vector(_require(doc, "position", where), 3, f"{where}.position")
    orientation = _vector(doc.get("orientation", (0.0, 0.0, 0.0, 1.0)), 4, f"{where}.orientation")
    try:
        return Pose(position, orientation)
    except ValueError as e:
        raise ConfigError(f"invalid {where}: {e}") from e


def pose_to_dict(pose):
    return {
        "position": [float(v) for v in pose.position],
        "orientation": [float(v) for v in pose.orientation],
    }


def scene_from_dict(doc):
    goals = []
    for i, gdoc in enumerate(_require(doc, "goals", "scene")):
        where = f"scene.goals[{i}]"
        goals.append(
            Goal(
                int(_require(gdoc, "id", where)),
                pose_from_dict(gdoc, where),
                str(gdoc.get("label", "")),
            )
        )
    wdoc = doc.get("workspace", {"lo": [-1.5, -1.5, -1.5], "hi": [1.5, 1.5, 1.5]})
    try:
        workspace = Box(
            _vector(_require(wdoc, "lo", "workspace"), 3, "workspace.lo"),
            _vector(_require(wdoc, "hi", "workspace"), 3, "workspace.hi"),
        )
    except ValueError as e:
        raise ConfigError(f"invalid workspace: {e}") from e
    start = doc.get("start_pose")
    start_pose = pose_from_dict(start, "scene.start_pose") if start is not None else None
    try:
        return Scene(tuple(goals), workspace, start_pose)
    except ValueError as e:
        raise ConfigError(f"invalid scene: {e}") from e


def scene_to_dict(scene):
    goals = []
    for g in sorted(scene.goals, key=lambda g: g.id):
        gdoc = {"id": int(g.id)}
        gdoc.update(pose_to_dict(g.pose))
        gdoc["label"] = g.label
        goals.append(gdoc)
    return {
        "goals": goals,
        "workspace": {
            "lo": [float(v) for v in scene.workspace.lo],
            "hi": [float(v) for v in scene.workspace.hi],
        },
        "start_pose": pose_to_dict(scene.start_pose),
    }


def _dim_from_value(value, where):
    if isinstance(value, str):
        try:
            return DIM_BY_NAME[value.lower()]
        except KeyError:
            raise ConfigError(f"{where}: unknown dimension name {value!r}") from None
    try:
        return Dim(int(value))
    except ValueError:
        raise ConfigError(f"{where}: dimension index {value!r} out of range") from None


def interface_from_dict(doc):
    if isinstance(doc, str):
        try:
            return default_interface(doc)
        except ValueError as e:
            raise ConfigError(str(e)) from e
    name = str(_require(doc, "name", "interface"))
    if "modes" not in doc:
        try:
            return default_interface(name)
        except ValueError as e:
            raise ConfigError(str(e)) from e
    modes = []
    for i, dims in enumerate(doc["modes"]):
        where = f"interface.modes[{i}]"
        parsed = tuple(_dim_from_value(d, where) for d in dims)
        modes.append(ControlMode(i, parsed, inert=not parsed))
    order = tuple(int(i) for i in doc.get("switch_order", range(len(modes))))
    try:
        return InterfaceSpec(name, tuple(modes), order)
    except ValueError as e:
        raise ConfigError(f"invalid interface: {e}") from e


def interface_to_dict(interface):
    return {
        "name": interface.name,
        "modes": [[DIM_NAMES[d] for d in m.dimensions] for m in interface.modes],
        "switch_order": list(interface.switch_order),
    }


def _params_from_dict(cls, doc, where, converters=None):
    if doc is None:
        return cls()
    converters = converters or {}
    kwargs = {}
    fields = {f for f in cls.__dataclass_fields__}
    for key, value in doc.items():
        if key not in fields:
            raise ConfigError(f"unknown key {key!r} in {where}")
        kwargs[key] = converters[key](value) if key in converters else value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid {where}: {e}") from e


def field_params_from_dict(doc):
    return _params_from_dict(
        FieldParams,
        doc,
        "field",
        {
            "transition": lambda v: _matrix(v, "field.transition"),
            "control": lambda v: _matrix(v, "field.control"),
            "rest_state": lambda v: None if v is None else np.asarray(v, dtype=float),
        },
    )


def field_params_to_dict(params):
    return {
        "tau": params.tau,
        "dt": params.dt,
        "proximity_radius": params.proximity_radius,
        "control_gain": params.control_gain,
        "transition": None if params.transition is None else params.transition.tolist(),
        "control": None if params.control is None else params.control.tolist(),
        "rest_state": None if params.rest_state is None else params.rest_state.tolist(),
    }


def bayes_params_from_dict(doc):
    return _params_from_dict(
        BayesParams, doc, "bayes", {"transition": lambda v: _matrix(v, "bayes.transition")}
    )


def bayes_params_to_dict(params):
    return {
        "likelihood_sharpness": params.likelihood_sharpness,
        "stay_probability": params.stay_probability,
        "transition": None if params.transition is None else params.transition.tolist(),
    }


def human_params_from_dict(doc):
    from .simulation import SimulatedHumanParams

    converters = {
        "silent_window": lambda v: (None if v[0] is None else float(v[0]), float(v[1])),
        "goal_transition_interval": lambda v: (int(v[0]), int(v[1])),
    }
    return _params_from_dict(SimulatedHumanParams, doc, "human", converters)


def human_params_to_dict(params):
    start, length = params.silent_window
    return {
        "direction_noise_sigma": params.direction_noise_sigma,
        "dropout_probability": params.dropout_probability,
        "silent_window": [start, length],
        "goal_transition_interval": list(params.goal_transition_interval),
        "speed": params.speed,
    }


def trial_config_from_dict(doc):
    from .simulation import TrialConfig

    if "scene" not in doc:
        raise ConfigError("config document needs a 'scene' section")
    scene = scene_from_dict(doc["scene"])
    kwargs = {
        "scene": scene,
        "interface": interface_from_dict(doc.get("interface", "joystick")),
        "human": human_params_from_dict(doc.get("human")),
        "blending": _params_from_dict(BlendingParams, doc.get("blending"), "blending"),
        "field": field_params_from_dict(doc.get("field")),
        "bayes": bayes_params_from_dict(doc.get("bayes")),
        "memory": _params_from_dict(MemoryParams, doc.get("memory"), "memory"),
        "autonomy": _params_from_dict(PotentialFieldParams, doc.get("autonomy"), "autonomy"),
        "disamb": _params_from_dict(DisambiguationParams, doc.get("disamb"), "disamb"),
    }
    for key in ("predictor", "seed", "dt", "max_steps", "assistance_enabled"):
        if key in doc:
            kwargs[key] = doc[key]
    try:
        return TrialConfig(**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid config: {e}") from e


def trial_config_to_dict(config):
    return {
        "scene": scene_to_dict(config.scene),
        "interface": interface_to_dict(config.interface),
        "predictor": config.predictor,
        "seed": int(config.seed),
        "dt": config.dt,
        "max_steps": int(config.max_steps),
        "assistance_enabled": bool(config.assistance_enabled),
        "human": human_params_to_dict(config.human),
        "blending": {
            "rho1": config.blending.rho1,
            "rho2": config.blending.rho2,
            "rho3": config.blending.rho3,
        },
        "field": field_params_to_dict(config.field),
        "bayes": bayes_params_to_dict(config.bayes),
        "memory": {"length_scale": config.memory.length_scale},
        "autonomy": {
            "attractor_gain": config.autonomy.attractor_gain,
            "repeller_gain": config.autonomy.repeller_gain,
            "repeller_radius": config.autonomy.repeller_radius,
            "max_linear_speed": config.autonomy.max_linear_speed,
            "max_angular_speed": config.autonomy.max_angular_speed,
        },
        "disamb": {
            "t_b_offset": config.disamb.t_b_offset,
            "t_c_offset": config.disamb.t_c_offset,
            "dt": config.disamb.dt,
            "weight": config.disamb.weight,
        },
    }


def load_config_document(path):
    """Read and parse a JSON config file; raises ConfigError with the path
    on any failure."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return doc


def canonical_json(doc):
    """Stable text form: sorted keys, no whitespace, plain floats."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_digest(config):
    """Hex digest of the canonicalized trial config."""
    return hashlib.sha256(canonical_json(trial_config_to_dict(config)).encode()).hexdigest()


def benchmark_digest(base, n_trials, goal_range, max_steps_range):
    doc = {
        "base": trial_config_to_dict(base),
        "trials": int(n_trials),
        "goal_range": [int(goal_range[0]), int(goal_range[1])],
        "max_steps_range": [int(max_steps_range[0]), int(max_steps_range[1])],
    }
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def write_trial_sidecar(config, path):
    """JSON sidecar carrying the full trial configuration."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(trial_config_to_dict(config), f, indent=2, sort_keys=True)
        f.write("\n")
