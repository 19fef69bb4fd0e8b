/** DOM wiring: pointer moves the gaze; holding H (or the right mouse button)
 * moves the hand marker; the wheel adjusts hand depth; Space holds the
 * pinch. Scenario selection re-seeds the server session. */

import { SessionClient, defaultEndpoint } from "./client.js";
import { clampDepth, initialEmulation, type EmulationState } from "./emulate.js";
import { parseServerMessage } from "./protocol.js";
import { render } from "./render.js";
import { SCENARIOS, scenarioById } from "./scenarios.js";
import {
  applyServerMessage,
  initialViewModel,
  setConnection,
  type ViewModel,
} from "./viewmodel.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const scenarioSelect = document.getElementById("scenario") as HTMLSelectElement;
const depthSlider = document.getElementById("depth") as HTMLInputElement;

for (const scenario of SCENARIOS) {
  const option = document.createElement("option");
  option.value = scenario.id;
  option.textContent = scenario.label;
  scenarioSelect.appendChild(option);
}

let vm: ViewModel = initialViewModel();
let emulation: EmulationState = initialEmulation();
let scenario = SCENARIOS[0];
let movingHand = false;

depthSlider.value = String(emulation.handDepthM);

const client = new SessionClient(
  defaultEndpoint(),
  {
    onMessage(raw) {
      const message = parseServerMessage(raw);
      if (message) vm = applyServerMessage(vm, message);
    },
    onConnection(connected) {
      vm = setConnection(vm, connected ? "connected" : "disconnected");
      if (!connected) vm = { ...vm, snapshot: vm.snapshot };
    },
  },
  () => emulation,
  () => canvas.width / canvas.height,
);

client.start(scenario);

scenarioSelect.addEventListener("change", () => {
  scenario = scenarioById(scenarioSelect.value);
  vm = { ...initialViewModel(), connection: vm.connection };
  client.setScenario(scenario);
});

function ndcFromEvent(event: PointerEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return {
    x: ((event.clientX - rect.left) / rect.width) * 2 - 1,
    y: -(((event.clientY - rect.top) / rect.height) * 2 - 1),
  };
}

canvas.addEventListener("pointermove", (event) => {
  const ndc = ndcFromEvent(event);
  if (movingHand || event.buttons === 2) {
    emulation = { ...emulation, handNdc: ndc };
  } else {
    emulation = { ...emulation, gazeNdc: ndc };
  }
});
canvas.addEventListener("contextmenu", (event) => event.preventDefault());

window.addEventListener("keydown", (event) => {
  if (event.code === "Space" && !event.repeat) {
    emulation = { ...emulation, pinch: true };
    event.preventDefault();
  }
  if (event.code === "KeyH") movingHand = true;
});
window.addEventListener("keyup", (event) => {
  if (event.code === "Space") emulation = { ...emulation, pinch: false };
  if (event.code === "KeyH") movingHand = false;
});

canvas.addEventListener("wheel", (event) => {
  event.preventDefault();
  const depth = clampDepth(emulation.handDepthM - Math.sign(event.deltaY) * 0.02);
  emulation = { ...emulation, handDepthM: depth };
  depthSlider.value = String(depth);
});

depthSlider.addEventListener("input", () => {
  emulation = { ...emulation, handDepthM: clampDepth(Number(depthSlider.value)) };
});

function resize(): void {
  canvas.width = canvas.clientWidth * devicePixelRatio;
  canvas.height = canvas.clientHeight * devicePixelRatio;
}
window.addEventListener("resize", resize);
resize();

function frame(): void {
  render(ctx, canvas.width, canvas.height, vm, emulation, scenario.hint);
  requestAnimationFrame(frame);
}
requestAnimationFrame(frame);
