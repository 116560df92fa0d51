// Browser entry point: one socket, one render loop.
//
// Input events queue in the tracker and flush once per animation frame;
// the drawing below is a straight projection of the last validated frame.

import { parseFrame } from "./protocol.js";
import type { StateFrame } from "./protocol.js";
import { DEFAULT_BINDINGS, InputTracker, mergeBindings } from "./input.js";
import type { InterfaceKind } from "./input.js";
import * as ui from "./state.js";
import {
  ALPHA_CAP,
  beliefBars,
  dmRows,
  fitBounds,
  gaugeFill,
  modeDims,
  modeName,
  project,
  scenePoints,
} from "./render.js";
import type { Plane, Rect } from "./render.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const sceneCanvas = el<HTMLCanvasElement>("scene");
const beliefCanvas = el<HTMLCanvasElement>("belief");
const gaugeCanvas = el<HTMLCanvasElement>("gauge");
const statusDot = el<HTMLSpanElement>("status");
const modeLabel = el<HTMLSpanElement>("mode-label");
const dmTable = el<HTMLDivElement>("dm");
const ribbonList = el<HTMLUListElement>("ribbon");
const toastBox = el<HTMLDivElement>("toasts");
const keysFooter = el<HTMLDivElement>("keys");

let state = ui.initialState();
let flashUntil = 0; // wall-clock ms; selected mode flashes briefly

function storedBindings(): unknown {
  try {
    return JSON.parse(window.localStorage.getItem("teleop-bindings") ?? "null");
  } catch {
    return null;
  }
}

const bindings = mergeBindings(storedBindings());
const tracker = new InputTracker(bindings);

function kind(): InterfaceKind {
  return tracker.getKind();
}

// --- socket ----------------------------------------------------------------

const wsProto = window.location.protocol === "https:" ? "wss:" : "ws:";
const ws = new WebSocket(`${wsProto}//${window.location.host}/ws`);

ws.onopen = () => {
  state = ui.onConnection(state, "open");
};
ws.onclose = () => {
  state = ui.onConnection(state, "closed");
};
ws.onerror = () => {
  state = ui.onConnection(state, "closed");
};
ws.onmessage = (event: MessageEvent) => {
  const frame = parseFrame(String(event.data));
  if (frame === null) {
    state = ui.onInvalidFrame(state);
    return;
  }
  if (frame.type === "state") {
    if (ui.freshDisamb(state.frame, frame)) flashUntil = performance.now() + 900;
    state = ui.onServerFrame(state, frame, (m) => modeName(kind(), m));
  } else {
    state = ui.onServerFrame(state, frame);
  }
};

// --- input -----------------------------------------------------------------

window.addEventListener("keydown", (e) => {
  if (tracker.keyDown(e.code)) e.preventDefault();
});
window.addEventListener("keyup", (e) => {
  tracker.keyUp(e.code);
});
window.addEventListener("blur", () => {
  tracker.releaseAll();
});

for (const radio of document.querySelectorAll<HTMLInputElement>("input[name=iface]")) {
  radio.addEventListener("change", () => {
    if (radio.checked) tracker.setKind(radio.value as InterfaceKind);
  });
}

// --- drawing ---------------------------------------------------------------

const FG = "#e6e6e6";
const DIM = "#707a88";
const ACCENT = "#58a6ff";
const GOOD = "#3fb950";
const WARN = "#d29922";

function drawViewport(ctx: CanvasRenderingContext2D, frame: StateFrame, plane: Plane, vp: Rect) {
  ctx.strokeStyle = DIM;
  ctx.strokeRect(vp.x, vp.y, vp.w, vp.h);
  const points = scenePoints(frame, plane);
  const bounds = fitBounds(points.map((p) => p.p));
  ctx.font = "11px system-ui";
  for (const point of points) {
    const { x, y } = project(point.p, bounds, vp);
    const effector = point.id === null;
    ctx.beginPath();
    ctx.arc(x, y, effector ? 6 : 8, 0, 2 * Math.PI);
    ctx.fillStyle = effector ? ACCENT : frame.goalReached ? GOOD : FG;
    ctx.fill();
    ctx.fillStyle = DIM;
    ctx.fillText(point.label, x + 10, y + 4);
  }
  ctx.fillStyle = DIM;
  const axes = plane === "xy" ? "top view (x→, y↑)" : "side view (x→, z↑)";
  ctx.fillText(axes, vp.x + 6, vp.y + 14);
}

function drawScene(frame: StateFrame) {
  const ctx = sceneCanvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, sceneCanvas.width, sceneCanvas.height);
  const half = sceneCanvas.width / 2;
  drawViewport(ctx, frame, "xy", { x: 8, y: 8, w: half - 16, h: sceneCanvas.height - 16 });
  drawViewport(ctx, frame, "xz", { x: half + 8, y: 8, w: half - 16, h: sceneCanvas.height - 16 });
}

function drawBelief(frame: StateFrame) {
  const ctx = beliefCanvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, beliefCanvas.width, beliefCanvas.height);
  const vp: Rect = { x: 8, y: 8, w: beliefCanvas.width - 16, h: beliefCanvas.height - 28 };
  const chart = beliefBars(frame.belief, vp);
  chart.bars.forEach((bar, i) => {
    ctx.fillStyle = i === argmax(frame.belief) ? ACCENT : DIM;
    ctx.fillRect(bar.x, bar.y, bar.w, bar.h);
    ctx.fillStyle = FG;
    ctx.font = "11px system-ui";
    ctx.fillText(frame.goals[i]?.label ?? String(i), bar.x, vp.y + vp.h + 14);
  });
  for (const [y, tag] of [
    [chart.rho1Y, "ρ1"],
    [chart.rho2Y, "ρ2"],
  ] as const) {
    ctx.strokeStyle = WARN;
    ctx.setLineDash([4, 3]);
    ctx.beginPath();
    ctx.moveTo(vp.x, y);
    ctx.lineTo(vp.x + vp.w, y);
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = WARN;
    ctx.fillText(tag, vp.x + vp.w - 18, y - 3);
  }
}

function argmax(xs: number[]): number {
  let best = 0;
  for (let i = 1; i < xs.length; i += 1) if (xs[i] > xs[best]) best = i;
  return best;
}

function drawGauge(frame: StateFrame) {
  const ctx = gaugeCanvas.getContext("2d");
  if (!ctx) return;
  const w = gaugeCanvas.width;
  const h = gaugeCanvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = DIM;
  ctx.strokeRect(8, 8, w - 16, h - 16);
  ctx.fillStyle = frame.alpha > 0 ? GOOD : DIM;
  ctx.fillRect(8, 8, (w - 16) * gaugeFill(frame.alpha), h - 16);
  const capX = 8 + (w - 16) * ALPHA_CAP;
  ctx.strokeStyle = WARN;
  ctx.beginPath();
  ctx.moveTo(capX, 4);
  ctx.lineTo(capX, h - 4);
  ctx.stroke();
}

function drawChrome() {
  statusDot.dataset.state = state.connection;
  const frame = state.frame;
  if (frame) {
    const flash = performance.now() < flashUntil;
    modeLabel.textContent = modeName(kind(), frame.mode);
    modeLabel.classList.toggle("flash", flash);
    modeLabel.title = `controls: ${modeDims(kind(), frame.mode).join(", ") || "gripper"}`;
  }
  if (frame?.disamb) {
    const rows = dmRows(frame.disamb)
      .map(
        (r) =>
          `<tr class="${r.best ? "best" : ""}"><td>${modeName(kind(), r.mode)}</td>` +
          `<td>${r.value.toFixed(4)}</td></tr>`,
      )
      .join("");
    dmTable.innerHTML = `<table><tr><th>mode</th><th>D_m</th></tr>${rows}</table>`;
  }
  ribbonList.innerHTML = state.ribbon
    .slice(-12)
    .map((e) => `<li><span>${e.at.toFixed(1)}s</span> ${e.text}</li>`)
    .join("");
  toastBox.innerHTML = state.toasts.map((t) => `<div class="toast">${t}</div>`).join("");
}

function describeKeys() {
  const b = bindings;
  keysFooter.textContent =
    `joystick: ${b.axisWest}/${b.axisEast} and ${b.axisSouth}/${b.axisNorth} deflect the axes · ` +
    `head array: ${b.headLeft}/${b.headRight} drive, ${b.headBack} cycles modes · ` +
    `${b.modeSwitch} switches mode · ${b.disambiguate} asks for the disambiguating mode` +
    (JSON.stringify(b) === JSON.stringify(DEFAULT_BINDINGS)
      ? ""
      : " · (custom bindings from localStorage)");
}

// --- frame loop --------------------------------------------------------------

function loop() {
  if (ws.readyState === WebSocket.OPEN) {
    for (const message of tracker.flush()) {
      ws.send(JSON.stringify(message));
      state = ui.onSent(state, message);
    }
  }
  const frame = state.frame;
  if (frame) {
    drawScene(frame);
    drawBelief(frame);
    drawGauge(frame);
  }
  drawChrome();
  window.requestAnimationFrame(loop);
}

describeKeys();
window.requestAnimationFrame(loop);
