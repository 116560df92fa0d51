import { describe, expect, it } from "vitest";

import { DEFAULT_BINDINGS, InputTracker, mergeBindings } from "../src/input.js";

const drain = (tracker: InputTracker) => tracker.flush();

describe("joystick emulation", () => {
  it("sends a zero command each frame when nothing is held", () => {
    const tracker = new InputTracker();
    expect(drain(tracker)).toEqual([{ type: "command", axes: [0, 0] }]);
    expect(drain(tracker)).toEqual([{ type: "command", axes: [0, 0] }]);
  });

  it("maps held arrows to full axis deflection until release", () => {
    const tracker = new InputTracker();
    tracker.keyDown("ArrowRight");
    tracker.keyDown("ArrowUp");
    expect(drain(tracker)).toEqual([{ type: "command", axes: [1, 1] }]);
    expect(drain(tracker)).toEqual([{ type: "command", axes: [1, 1] }]); // still held
    tracker.keyUp("ArrowRight");
    expect(drain(tracker)).toEqual([{ type: "command", axes: [0, 1] }]);
  });

  it("opposite arrows cancel", () => {
    const tracker = new InputTracker();
    tracker.keyDown("ArrowLeft");
    tracker.keyDown("ArrowRight");
    expect(tracker.axes()).toEqual([0, 0]);
  });
});

describe("head-array emulation", () => {
  it("right key yields the single +1 axis", () => {
    const tracker = new InputTracker();
    tracker.setKind("head-array");
    tracker.keyDown(DEFAULT_BINDINGS.headRight);
    // the server maps axes[0] onto whatever dimension the active mode holds
    expect(drain(tracker)).toEqual([{ type: "command", axes: [1] }]);
  });

  it("left key yields -1 and the back switch cycles modes", () => {
    const tracker = new InputTracker();
    tracker.setKind("head-array");
    tracker.keyDown(DEFAULT_BINDINGS.headLeft);
    tracker.keyDown(DEFAULT_BINDINGS.headBack);
    expect(drain(tracker)).toEqual([
      { type: "mode_switch" },
      { type: "command", axes: [-1] },
    ]);
  });

  it("the back switch does nothing under joystick emulation", () => {
    const tracker = new InputTracker();
    tracker.keyDown(DEFAULT_BINDINGS.headBack);
    expect(drain(tracker)).toEqual([{ type: "command", axes: [0, 0] }]);
  });

  it("switching emulation clears held keys", () => {
    const tracker = new InputTracker();
    tracker.keyDown("ArrowRight");
    tracker.setKind("head-array");
    expect(tracker.axes()).toEqual([0]);
  });
});

describe("discrete actions", () => {
  it("Tab queues one mode switch per press, surviving until the next flush", () => {
    const tracker = new InputTracker();
    for (let i = 0; i < 5; i += 1) {
      tracker.keyDown("Tab");
      tracker.keyUp("Tab");
    }
    const flushed = drain(tracker);
    expect(flushed.filter((m) => m.type === "mode_switch")).toHaveLength(5);
    expect(flushed[flushed.length - 1]).toEqual({ type: "command", axes: [0, 0] });
    expect(drain(tracker)).toEqual([{ type: "command", axes: [0, 0] }]); // queue drained
  });

  it("Space queues a disambiguation request", () => {
    const tracker = new InputTracker();
    tracker.keyDown("Space");
    expect(drain(tracker)[0]).toEqual({ type: "disambiguate" });
  });

  it("OS auto-repeat does not duplicate actions", () => {
    const tracker = new InputTracker();
    tracker.keyDown("Space");
    tracker.keyDown("Space");
    tracker.keyDown("Space");
    expect(drain(tracker).filter((m) => m.type === "disambiguate")).toHaveLength(1);
  });

  it("reports which keys are bound so the page can preventDefault", () => {
    const tracker = new InputTracker();
    expect(tracker.keyDown("Tab")).toBe(true);
    expect(tracker.keyDown("KeyQ")).toBe(false);
  });

  it("releaseAll zeroes the axes after focus loss", () => {
    const tracker = new InputTracker();
    tracker.keyDown("ArrowUp");
    tracker.releaseAll();
    expect(tracker.axes()).toEqual([0, 0]);
  });
});

describe("mergeBindings", () => {
  it("overlays known fields and ignores junk", () => {
    const merged = mergeBindings({ disambiguate: "KeyX", bogus: "KeyZ", modeSwitch: 3 });
    expect(merged.disambiguate).toBe("KeyX");
    expect(merged.modeSwitch).toBe(DEFAULT_BINDINGS.modeSwitch);
    expect("bogus" in merged).toBe(false);
  });

  it("handles null overrides", () => {
    expect(mergeBindings(null)).toEqual(DEFAULT_BINDINGS);
  });

  it("custom bindings drive the tracker", () => {
    const tracker = new InputTracker(mergeBindings({ axisEast: "KeyL" }));
    tracker.keyDown("KeyL");
    expect(tracker.axes()).toEqual([1, 0]);
  });
});
