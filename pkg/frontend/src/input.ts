// Keyboard emulation of the two physical interfaces.
//
// Joystick: held arrow keys deflect two continuous axes (full deflection
// while held). Head array: left/right give -1/+1 on the single axis and the
// "back" switch cycles modes. Tab always switches modes, Space always
// requests disambiguation. Discrete actions queue on key-down and are
// flushed once per animation frame together with the current axes sample.

import type { ClientMessage } from "./protocol.js";
import { makeCommand, makeDisambiguate, makeModeSwitch } from "./protocol.js";

export type InterfaceKind = "joystick" | "head-array";

export interface KeyBindings {
  axisEast: string;
  axisWest: string;
  axisNorth: string;
  axisSouth: string;
  headRight: string;
  headLeft: string;
  headBack: string;
  modeSwitch: string;
  disambiguate: string;
}

export const DEFAULT_BINDINGS: KeyBindings = {
  axisEast: "ArrowRight",
  axisWest: "ArrowLeft",
  axisNorth: "ArrowUp",
  axisSouth: "ArrowDown",
  headRight: "KeyD",
  headLeft: "KeyA",
  headBack: "KeyS",
  modeSwitch: "Tab",
  disambiguate: "Space",
};

/** Overlay user overrides on the defaults, ignoring unknown keys. */
export function mergeBindings(overrides: unknown): KeyBindings {
  const merged = { ...DEFAULT_BINDINGS };
  if (typeof overrides !== "object" || overrides === null) return merged;
  for (const [name, code] of Object.entries(overrides as Record<string, unknown>)) {
    if (name in merged && typeof code === "string" && code.length > 0) {
      merged[name as keyof KeyBindings] = code;
    }
  }
  return merged;
}

export class InputTracker {
  private held = new Set<string>();
  private queued: ClientMessage[] = [];
  private kind: InterfaceKind = "joystick";

  constructor(private bindings: KeyBindings = DEFAULT_BINDINGS) {}

  setKind(kind: InterfaceKind): void {
    this.kind = kind;
    this.held.clear(); // stale axes from the other emulation must not stick
  }

  getKind(): InterfaceKind {
    return this.kind;
  }

  isBound(code: string): boolean {
    return Object.values(this.bindings).includes(code);
  }

  /** Returns true when the key is bound (caller should preventDefault). */
  keyDown(code: string): boolean {
    const bound = this.isBound(code);
    if (this.held.has(code)) return bound; // OS auto-repeat: no re-trigger
    this.held.add(code);
    const b = this.bindings;
    if (code === b.modeSwitch || (this.kind === "head-array" && code === b.headBack)) {
      this.queued.push(makeModeSwitch());
    } else if (code === b.disambiguate) {
      this.queued.push(makeDisambiguate());
    }
    return bound;
  }

  keyUp(code: string): void {
    this.held.delete(code);
  }

  /** Window lost focus: key-ups were missed, so nothing stays held. */
  releaseAll(): void {
    this.held.clear();
  }

  /** Current axes sample for the active emulation, each in {-1, 0, +1}. */
  axes(): number[] {
    const on = (code: string) => (this.held.has(code) ? 1 : 0);
    const b = this.bindings;
    if (this.kind === "joystick") {
      return [on(b.axisEast) - on(b.axisWest), on(b.axisNorth) - on(b.axisSouth)];
    }
    return [on(b.headRight) - on(b.headLeft)];
  }

  /** Drain queued discrete actions, then the per-frame command sample. */
  flush(): ClientMessage[] {
    const out = this.queued;
    this.queued = [];
    out.push(makeCommand(this.axes()));
    return out;
  }
}
