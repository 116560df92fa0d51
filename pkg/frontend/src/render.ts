// Pure view geometry: everything here maps server state to pixel-space
// shapes and labels; the canvas calls live in main.ts.

import type { DisambDoc, StateFrame } from "./protocol.js";
import type { InterfaceKind } from "./input.js";

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

// Display mirrors of the engine's built-in interface layouts (mode index ->
// controlled dimensions). Only used for labels/highlighting.
const JOYSTICK_MODES: string[][] = [["x", "y"], ["z"], ["roll", "pitch"], ["yaw"], []];
const HEAD_ARRAY_MODES: string[][] = [["x"], ["y"], ["z"], ["roll"], ["pitch"], ["yaw"], []];

export function modeDims(kind: InterfaceKind, mode: number): string[] {
  const table = kind === "joystick" ? JOYSTICK_MODES : HEAD_ARRAY_MODES;
  return mode >= 0 && mode < table.length ? table[mode] : [];
}

export function modeName(kind: InterfaceKind, mode: number): string {
  const dims = modeDims(kind, mode);
  return `mode ${mode} (${dims.length > 0 ? dims.join("+") : "gripper"})`;
}

// --- belief bar chart ------------------------------------------------------

export interface BarChart {
  bars: Rect[]; // one per goal, anchored to the viewport floor
  rho1Y: number; // lower assistance threshold line (display-default 1.2/n)
  rho2Y: number; // upper threshold line (1.4/n)
}

function probToY(p: number, vp: Rect): number {
  return vp.y + (1 - p) * vp.h;
}

export function beliefBars(belief: number[], vp: Rect): BarChart {
  const n = belief.length;
  const slot = vp.w / n;
  const width = slot * 0.7;
  const bars = belief.map((p, i) => {
    const h = p * vp.h;
    return { x: vp.x + i * slot + (slot - width) / 2, y: vp.y + vp.h - h, w: width, h };
  });
  return { bars, rho1Y: probToY(1.2 / n, vp), rho2Y: probToY(1.4 / n, vp) };
}

// --- assistance gauge ------------------------------------------------------

export const ALPHA_CAP = 0.7; // marker for the blending ceiling

/** Fraction of the gauge to fill; empty exactly when alpha is 0. */
export function gaugeFill(alpha: number): number {
  return Math.max(0, Math.min(1, alpha));
}

// --- orthographic viewports ------------------------------------------------

export type Plane = "xy" | "xz";

export interface Bounds {
  min: [number, number];
  max: [number, number];
}

/** Axis-aligned bounds of all points, padded; degenerate spans get a unit box. */
export function fitBounds(points: [number, number][], pad = 0.4): Bounds {
  if (points.length === 0) return { min: [-1, -1], max: [1, 1] };
  let [minU, minV] = points[0];
  let [maxU, maxV] = points[0];
  for (const [u, v] of points) {
    minU = Math.min(minU, u);
    minV = Math.min(minV, v);
    maxU = Math.max(maxU, u);
    maxV = Math.max(maxV, v);
  }
  minU -= pad;
  minV -= pad;
  maxU += pad;
  maxV += pad;
  if (maxU - minU < 1e-9) (minU -= 0.5), (maxU += 0.5);
  if (maxV - minV < 1e-9) (minV -= 0.5), (maxV += 0.5);
  return { min: [minU, minV], max: [maxU, maxV] };
}

/** Map a workspace point into a viewport rect (v axis points up on screen). */
export function project(p: [number, number], b: Bounds, vp: Rect): { x: number; y: number } {
  const su = (p[0] - b.min[0]) / (b.max[0] - b.min[0]);
  const sv = (p[1] - b.min[1]) / (b.max[1] - b.min[1]);
  return { x: vp.x + su * vp.w, y: vp.y + (1 - sv) * vp.h };
}

export interface ScenePoint {
  id: number | null; // null marks the end effector
  label: string;
  p: [number, number];
}

/** Plane slice of the frame: the effector plus every goal, untouched values. */
export function scenePoints(frame: StateFrame, plane: Plane): ScenePoint[] {
  const pick = (v: number[]): [number, number] =>
    plane === "xy" ? [v[0], v[1]] : [v[0], v[2]];
  const points: ScenePoint[] = frame.goals.map((g) => ({
    id: g.id,
    label: g.label ?? `goal ${g.id}`,
    p: pick(g.position),
  }));
  points.push({ id: null, label: "effector", p: pick(frame.pose.position) });
  return points;
}

// --- disambiguation table --------------------------------------------------

export interface DmRow {
  mode: number;
  value: number;
  best: boolean; // flag comes from the server's mStar, never recomputed
}

export function dmRows(d: DisambDoc): DmRow[] {
  return Object.entries(d.dM)
    .map(([mode, value]) => ({ mode: Number(mode), value, best: Number(mode) === d.mStar }))
    .sort((a, b) => a.mode - b.mode);
}
