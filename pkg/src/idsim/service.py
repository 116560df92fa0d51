"""Real-time teleoperation backend.

One SessionWorld per WebSocket connection: the client streams axis values,
mode switches, and disambiguation requests; the server runs the shared
control loop at a fixed tick and streams state frames back. SessionWorld
itself is pure and synchronous — the same loop replays a recorded message
sequence offline to reproduce a session log exactly.
"""

import asyncio
import json
import uuid

import numpy as np

from .arbitration import blend, blending_alpha, make_context_builder, potential_field_command
from .core import ControlCommand
from .disambiguation import select_disambiguation_mode
from .errors import NumericalError
from .inference import InferenceContext, step_belief_field, uniform_belief
from .simulation import (
    EVENT_DISAMB,
    EVENT_MODE_SWITCH,
    EVENT_NONE,
    TrialLog,
    step_kinematics,
)

PROTOCOL_VERSION = 1

CLIENT_MESSAGE_TYPES = ("command", "mode_switch", "disambiguate", "reset")


class ProtocolError(ValueError):
    """Client message rejected by schema validation."""


def _validate_axes(axes):
    if not isinstance(axes, (list, tuple)):
        raise ProtocolError("'axes' must be an array of numbers")
    out = []
    for a in axes:
        if isinstance(a, bool) or not isinstance(a, (int, float)):
            raise ProtocolError("'axes' entries must be numbers")
        a = float(a)
        if not np.isfinite(a) or not -1.0 <= a <= 1.0:
            raise ProtocolError("'axes' entries must be finite and within [-1, 1]")
        out.append(a)
    return out


class SessionWorld:
    """Deterministic teleop world stepped by explicit tick() calls.

    Messages are applied between ticks; each tick runs one iteration of the
    shared control loop (field belief update with the held command, then
    autonomy, blending, kinematics) and appends one log row. Motion stops
    once any goal is reached or after a numerical failure (frozen).
    """

    def __init__(self, config, session_id=None):
        self.id = session_id or uuid.uuid4().hex
        self.config = config
        self._goals = tuple(sorted(config.scene.goals, key=lambda g: g.id))
        self._ctx_builder = make_context_builder(config.scene, config.autonomy)
        self._goals_doc = [
            {
                "id": int(g.id),
                "position": [float(v) for v in g.pose.position],
                "orientation": [float(v) for v in g.pose.orientation],
                "label": g.label,
            }
            for g in self._goals
        ]
        self.reset(config.seed)

    # -- state ---------------------------------------------------------

    def reset(self, seed=None):
        self.seed = self.config.seed if seed is None else int(seed)
        self.pose = self.config.scene.start_pose
        self.belief = uniform_belief(len(self._goals))
        self.mode_id = self.config.interface.switch_order[0]
        self.held = ControlCommand.zero()
        self.ticks = 0
        self.goal_reached = False
        self.frozen = False
        self.last_disamb = None
        self._pending_event = EVENT_NONE
        self._rows = []

    # -- client messages ------------------------------------------------

    def apply_message(self, message):
        """Apply one already-parsed client message; raises ProtocolError on
        schema violations (the world state is then unchanged)."""
        if not isinstance(message, dict):
            raise ProtocolError("message must be a JSON object")
        mtype = message.get("type")
        if mtype == "command":
            axes = _validate_axes(message.get("axes", []))
            mode = self.config.interface.mode_by_id(self.mode_id)
            v = np.zeros(6)
            for value, dim in zip(axes, mode.dimensions):
                v[int(dim)] = value
            self.held = ControlCommand.from_vector(v)
        elif mtype == "mode_switch":
            self.mode_id = self.config.interface.next_mode(self.mode_id)
            self._pending_event = EVENT_MODE_SWITCH
        elif mtype == "disambiguate":
            result = select_disambiguation_mode(
                self.belief,
                self.pose,
                self.config.interface,
                self.mode_id,
                self.config.disamb,
                self.config.field,
                self._ctx_builder,
            )
            self.mode_id = result.m_star
            self.last_disamb = result.to_json_dict()
            self._pending_event = EVENT_DISAMB
        elif mtype == "reset":
            seed = message.get("seed")
            if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
                raise ProtocolError("'seed' must be a non-negative integer")
            self.reset(seed)
        else:
            raise ProtocolError(f"unknown message type {mtype!r}")

    # -- stepping ---------------------------------------------------------

    def _reached_any_goal(self):
        from .simulation import _goal_reached

        return any(_goal_reached(self.pose, g) for g in self._goals)

    def tick(self):
        """One control-loop iteration; returns the state frame to stream."""
        dt = self.config.dt
        event = self._pending_event
        self._pending_event = EVENT_NONE
        moving = not (self.goal_reached or self.frozen)

        alpha = 0.0
        u_a = ControlCommand.zero()
        u = ControlCommand.zero()
        if moving:
            try:
                ctx = self._ctx_builder(self.pose)
                self.belief = step_belief_field(self.belief, self.held, ctx, self.config.field)
                n_goals = len(self._goals)
                if self.config.assistance_enabled:
                    g_star = int(np.argmax(self.belief.probabilities))
                    u_a = potential_field_command(
                        self.pose, self._goals[g_star], self.config.scene, self.config.autonomy
                    )
                    alpha = blending_alpha(
                        float(self.belief.probabilities[g_star]), n_goals, self.config.blending
                    )
                    u = blend(self.held, u_a, alpha)
                else:
                    u = self.held
            except NumericalError as e:
                self.frozen = True
                self._log_row(event, ControlCommand.zero(), ControlCommand.zero(), 0.0)
                self.ticks += 1
                return {"type": "error", "detail": f"numerical failure: {e}"}

        self._log_row(event, u_a, u, alpha)
        if moving:
            self.pose = step_kinematics(self.pose, u, dt)
            if self._reached_any_goal():
                self.goal_reached = True
        self.ticks += 1
        return self.state_frame()

    def _log_row(self, event, u_a, u, alpha):
        self._rows.append(
            (
                self.ticks * self.config.dt,
                self.pose.position.copy(),
                self.pose.orientation.copy(),
                self.held.as_vector(),
                u_a.as_vector(),
                u.as_vector(),
                alpha,
                self.belief.probabilities.copy(),
                self.mode_id,
                event,
            )
        )

    def state_frame(self):
        return {
            "type": "state",
            "t": self.ticks * self.config.dt,
            "pose": {
                "position": [float(v) for v in self.pose.position],
                "orientation": [float(v) for v in self.pose.orientation],
            },
            "belief": [float(v) for v in self.belief.probabilities],
            "alpha": float(self._rows[-1][6]) if self._rows else 0.0,
            "mode": int(self.mode_id),
            "goals": self._goals_doc,
            "disamb": self.last_disamb,
            "goalReached": bool(self.goal_reached),
        }

    # -- logging ----------------------------------------------------------

    def log(self):
        """The session so far as a TrialLog (truth column is -1: live
        sessions have no ground-truth goal)."""
        n = len(self._rows)
        n_goals = len(self._goals)
        t = np.empty(n)
        positions = np.empty((n, 3))
        orientations = np.empty((n, 4))
        u_h = np.empty((n, 6))
        u_a = np.empty((n, 6))
        u = np.empty((n, 6))
        alpha = np.empty(n)
        beliefs = np.empty((n, n_goals))
        modes = np.empty(n, dtype=int)
        events = []
        for i, row in enumerate(self._rows):
            t[i], positions[i], orientations[i], u_h[i], u_a[i], u[i], alpha[i], beliefs[i], modes[i], ev = row
            events.append(ev)
        truths = np.full(n, -1, dtype=int)
        return TrialLog(
            self.config, t, positions, orientations, u_h, u_a, u, alpha,
            beliefs, modes, truths, events,
        )


def replay_session(config, recorded, n_ticks, session_id=None):
    """Re-run a recorded message sequence offline.

    `recorded` is a list of {"tick": k, "message": {...}} entries as captured
    by the live server; messages recorded at tick k are applied before the
    k-th tick. Returns the resulting SessionWorld (its .log() matches the
    live session's log exactly)."""
    world = SessionWorld(config, session_id=session_id)
    by_tick = {}
    for entry in recorded:
        by_tick.setdefault(int(entry["tick"]), []).append(entry["message"])
    for k in range(n_ticks):
        for message in by_tick.get(k, ()):
            try:
                world.apply_message(message)
            except ProtocolError:
                pass  # the live server also rejected it without state change
        world.tick()
    return world


def create_app(config, log_dir=None, tick_interval=None):
    """FastAPI app exposing the teleop WebSocket at /ws.

    tick_interval is the wall-clock spacing of ticks (defaults to config.dt,
    i.e. real time); the simulated step is always config.dt. Per-session
    logs (CSV + recorded messages) are flushed to log_dir on disconnect.
    """
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect

    app = FastAPI()
    wall_dt = config.dt if tick_interval is None else tick_interval

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        await websocket.send_json({"type": "hello", "version": PROTOCOL_VERSION})
        world = SessionWorld(config)
        recorded = []
        loop = asyncio.get_running_loop()
        next_tick = loop.time() + wall_dt
        try:
            while True:
                while True:
                    remaining = next_tick - loop.time()
                    if remaining <= 0:
                        break
                    try:
                        text = await asyncio.wait_for(websocket.receive_text(), timeout=remaining)
                    except asyncio.TimeoutError:
                        break
                    try:
                        message = json.loads(text)
                    except json.JSONDecodeError:
                        await websocket.send_json({"type": "error", "detail": "frame is not valid JSON"})
                        continue
                    try:
                        world.apply_message(message)
                        recorded.append({"tick": world.ticks, "message": message})
                    except ProtocolError as e:
                        await websocket.send_json({"type": "error", "detail": str(e)})
                frame = world.tick()
                await websocket.send_json(frame)
                next_tick += wall_dt
        except WebSocketDisconnect:
            pass
        finally:
            if log_dir is not None:
                _flush_session(world, recorded, log_dir)

    return app


def _flush_session(world, recorded, log_dir):
    import os

    from .config import trial_config_to_dict

    os.makedirs(log_dir, exist_ok=True)
    base = os.path.join(log_dir, f"session_{world.id}")
    world.log().write_csv(base + ".csv")
    with open(base + ".messages.json", "w", encoding="utf-8") as f:
        json.dump(
            {
                "session": world.id,
                "ticks": world.ticks,
                "config": trial_config_to_dict(world.config),
                "messages": recorded,
            },
            f,
            indent=2,
        )
        f.write("\n")
