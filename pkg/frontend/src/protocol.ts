// Wire schema for the session service, protocol version 1.
//
// The client never computes physics or inference: everything below is
// validation of server frames plus builders for the four client messages.

export const PROTOCOL_VERSION = 1;

export interface PoseDoc {
  position: number[]; // [x, y, z] metres
  orientation: number[]; // quaternion [qx, qy, qz, qw]
}

export interface GoalDoc {
  id: number;
  position: number[];
  orientation: number[];
  label: string | null;
}

export interface DisambDoc {
  mStar: number;
  kStar: number;
  dPlus: number[];
  dMinus: number[];
  dK: number[];
  dM: Record<string, number>;
  features: unknown;
}

export interface StateFrame {
  type: "state";
  t: number;
  pose: PoseDoc;
  belief: number[];
  alpha: number;
  mode: number;
  goals: GoalDoc[];
  disamb: DisambDoc | null;
  goalReached: boolean;
}

export interface HelloFrame {
  type: "hello";
  version: number;
}

export interface ErrorFrame {
  type: "error";
  detail: string;
}

export type ServerFrame = StateFrame | HelloFrame | ErrorFrame;

export type ClientMessage =
  | { type: "command"; axes: number[] }
  | { type: "mode_switch" }
  | { type: "disambiguate" }
  | { type: "reset"; seed: number };

function isFinite_(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

function isVec(x: unknown, n: number): x is number[] {
  return Array.isArray(x) && x.length === n && x.every(isFinite_);
}

function isProbabilities(x: unknown): x is number[] {
  return (
    Array.isArray(x) &&
    x.length >= 1 &&
    x.every((v) => isFinite_(v) && v >= 0 && v <= 1)
  );
}

function isPose(x: unknown): x is PoseDoc {
  if (typeof x !== "object" || x === null) return false;
  const p = x as Record<string, unknown>;
  return isVec(p.position, 3) && isVec(p.orientation, 4);
}

function isGoal(x: unknown): x is GoalDoc {
  if (typeof x !== "object" || x === null) return false;
  const g = x as Record<string, unknown>;
  if (!Number.isInteger(g.id) || (g.id as number) < 0) return false;
  if (!isVec(g.position, 3) || !isVec(g.orientation, 4)) return false;
  return g.label === null || typeof g.label === "string";
}

function isDisamb(x: unknown): x is DisambDoc {
  if (typeof x !== "object" || x === null) return false;
  const d = x as Record<string, unknown>;
  if (!Number.isInteger(d.mStar) || !Number.isInteger(d.kStar)) return false;
  if (!isVec(d.dPlus, 6) || !isVec(d.dMinus, 6) || !isVec(d.dK, 6)) return false;
  const dm = d.dM;
  if (typeof dm !== "object" || dm === null) return false;
  return Object.values(dm as Record<string, unknown>).every(isFinite_);
}

function isStateFrame(x: Record<string, unknown>): x is StateFrame & Record<string, unknown> {
  return (
    isFinite_(x.t) &&
    isPose(x.pose) &&
    isProbabilities(x.belief) &&
    isFinite_(x.alpha) &&
    x.alpha >= 0 &&
    x.alpha <= 1 &&
    Number.isInteger(x.mode) &&
    (x.mode as number) >= 0 &&
    Array.isArray(x.goals) &&
    x.goals.length >= 1 &&
    x.goals.every(isGoal) &&
    (x.disamb === null || isDisamb(x.disamb)) &&
    typeof x.goalReached === "boolean"
  );
}

/** Parse one server message; malformed input yields null (dropped upstream). */
export function parseFrame(text: string): ServerFrame | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const obj = raw as Record<string, unknown>;
  switch (obj.type) {
    case "hello":
      return isFinite_(obj.version) ? { type: "hello", version: obj.version } : null;
    case "error":
      return typeof obj.detail === "string" ? { type: "error", detail: obj.detail } : null;
    case "state":
      return isStateFrame(obj) ? (obj as unknown as StateFrame) : null;
    default:
      return null;
  }
}

const clamp1 = (a: number) => Math.max(-1, Math.min(1, a));

export function makeCommand(axes: number[]): ClientMessage {
  return { type: "command", axes: axes.map(clamp1) };
}

export function makeModeSwitch(): ClientMessage {
  return { type: "mode_switch" };
}

export function makeDisambiguate(): ClientMessage {
  return { type: "disambiguate" };
}

export function makeReset(seed: number): ClientMessage {
  if (!Number.isInteger(seed) || seed < 0) throw new Error("seed must be a non-negative integer");
  return { type: "reset", seed };
}
