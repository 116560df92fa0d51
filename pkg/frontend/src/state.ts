// UI store: pure reducers over immutable snapshots.
//
// The event ribbon is append-only; reducers may only push entries. The
// latest validated state frame is stored verbatim — no field of it is ever
// recomputed client-side.

import type { ClientMessage, ServerFrame, StateFrame } from "./protocol.js";

export type Connection = "connecting" | "open" | "closed";

export interface RibbonEntry {
  at: number; // server time of the surrounding frame, seconds
  text: string;
}

export interface UiState {
  connection: Connection;
  frame: StateFrame | null;
  ribbon: RibbonEntry[];
  toasts: string[];
  framesSeen: number;
  invalidFrames: number;
}

const MAX_TOASTS = 5;

export function initialState(): UiState {
  return {
    connection: "connecting",
    frame: null,
    ribbon: [],
    toasts: [],
    framesSeen: 0,
    invalidFrames: 0,
  };
}

function at(state: UiState): number {
  return state.frame ? state.frame.t : 0;
}

function pushRibbon(state: UiState, text: string, t?: number): UiState {
  return { ...state, ribbon: [...state.ribbon, { at: t ?? at(state), text }] };
}

export function onConnection(state: UiState, connection: Connection): UiState {
  if (connection === state.connection) return state;
  const text = connection === "open" ? "connected" : connection === "closed" ? "connection lost" : "connecting";
  return pushRibbon({ ...state, connection }, text);
}

export function onInvalidFrame(state: UiState): UiState {
  const toasts = [...state.toasts, "malformed frame dropped"].slice(-MAX_TOASTS);
  return { ...state, toasts, invalidFrames: state.invalidFrames + 1 };
}

/** Ribbon text for actions the user just sent (commands are too chatty to log). */
export function onSent(state: UiState, message: ClientMessage): UiState {
  switch (message.type) {
    case "mode_switch":
      return pushRibbon(state, "mode switch requested");
    case "disambiguate":
      return pushRibbon(state, "disambiguation requested");
    case "reset":
      return pushRibbon(state, `reset (seed ${message.seed})`);
    default:
      return state;
  }
}

export function onServerFrame(
  state: UiState,
  frame: ServerFrame,
  modeName: (mode: number) => string = (m) => `mode ${m}`,
): UiState {
  if (frame.type === "hello") {
    return pushRibbon(state, `server hello (protocol ${frame.version})`);
  }
  if (frame.type === "error") {
    const toasts = [...state.toasts, frame.detail].slice(-MAX_TOASTS);
    return pushRibbon({ ...state, toasts }, `server error: ${frame.detail}`);
  }

  const prev = state.frame;
  let next: UiState = { ...state, frame, framesSeen: state.framesSeen + 1 };
  if (prev === null || prev.mode !== frame.mode) {
    next = pushRibbon(next, `active ${modeName(frame.mode)}`, frame.t);
  }
  const disambChanged =
    frame.disamb !== null &&
    (prev === null || prev.disamb === null ||
      JSON.stringify(prev.disamb) !== JSON.stringify(frame.disamb));
  if (disambChanged && frame.disamb !== null) {
    next = pushRibbon(next, `disambiguation picked ${modeName(frame.disamb.mStar)}`, frame.t);
  }
  if (frame.goalReached && (prev === null || !prev.goalReached)) {
    next = pushRibbon(next, "goal reached", frame.t);
  }
  return next;
}

/** Modes whose selection was freshly announced by this frame (for flashing). */
export function freshDisamb(prev: StateFrame | null, frame: StateFrame): boolean {
  if (frame.disamb === null) return false;
  if (prev === null || prev.disamb === null) return true;
  return JSON.stringify(prev.disamb) !== JSON.stringify(frame.disamb);
}
