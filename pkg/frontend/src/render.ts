/** Canvas renderer: wireframe boxes, context spheres, gaze cross, hand
 * marker with depth readout, HUD (state label, checklist, events, trial
 * progress, connection banner). Poses come exclusively from the snapshot. */

import { SUMMON_DEPTH_BAND, type EmulationState } from "./emulate.js";
import { projectPoint, projectRadius, boxCorners, BOX_EDGES } from "./projection.js";
import type { Snapshot, SnapshotObject } from "./protocol.js";
import { checklist, hudStateLabel, type ViewModel } from "./viewmodel.js";
import type { V3 } from "./math.js";

const COLORS = {
  far: "#7fb2ff",
  near: "#ffd166",
  target: "#9ef0a0",
  inert: "#8a8f98",
  sphereFar: "rgba(127, 178, 255, 0.35)",
  sphereNear: "rgba(255, 209, 102, 0.45)",
  gaze: "#ff6b8a",
  hand: "#9ef0a0",
  handOutOfBand: "#ff9f5b",
  text: "#e6e9ef",
  dim: "#9aa3b2",
};

export function render(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  vm: ViewModel,
  emulation: EmulationState,
  scenarioHint: string,
): void {
  ctx.fillStyle = "#11141a";
  ctx.fillRect(0, 0, width, height);
  const aspect = width / height;
  const toPx = (ndc: { x: number; y: number }) => ({
    x: ((ndc.x + 1) / 2) * width,
    y: ((1 - ndc.y) / 2) * height,
  });

  const snapshot = vm.snapshot;
  if (snapshot) {
    drawSpheres(ctx, snapshot, aspect, toPx, width);
    const sorted = [...snapshot.objects].sort((a, b) => b.p[2] - a.p[2]);
    for (const obj of sorted) drawBox(ctx, obj, snapshot, aspect, toPx);
  }

  drawHandMarker(ctx, emulation, toPx);
  drawGazeCross(ctx, emulation, toPx);
  drawHud(ctx, vm, emulation, scenarioHint, width, height);
}

function objectColor(obj: SnapshotObject, snapshot: Snapshot): string {
  if (snapshot.target === obj.id) return COLORS.target;
  if (!obj.interactable) return COLORS.inert;
  return obj.space === "near" ? COLORS.near : COLORS.far;
}

function drawBox(
  ctx: CanvasRenderingContext2D,
  obj: SnapshotObject,
  snapshot: Snapshot,
  aspect: number,
  toPx: (ndc: { x: number; y: number }) => { x: number; y: number },
): void {
  const corners = boxCorners(obj.p, obj.q, obj.half_extents).map((c) =>
    projectPoint(c, aspect),
  );
  ctx.strokeStyle = objectColor(obj, snapshot);
  ctx.lineWidth = snapshot.target === obj.id ? 2 : 1;
  ctx.setLineDash(obj.clipped ? [4, 3] : []);
  ctx.beginPath();
  for (const [a, b] of BOX_EDGES) {
    const pa = corners[a];
    const pb = corners[b];
    if (!pa || !pb) continue;
    const sa = toPx(pa);
    const sb = toPx(pb);
    ctx.moveTo(sa.x, sa.y);
    ctx.lineTo(sb.x, sb.y);
  }
  ctx.stroke();
  ctx.setLineDash([]);
  const center = projectPoint(obj.p, aspect);
  if (center) {
    const px = toPx(center);
    ctx.fillStyle = COLORS.dim;
    ctx.font = "10px monospace";
    ctx.fillText(obj.id, px.x + 4, px.y - 4);
  }
}

function drawSpheres(
  ctx: CanvasRenderingContext2D,
  snapshot: Snapshot,
  aspect: number,
  toPx: (ndc: { x: number; y: number }) => { x: number; y: number },
  width: number,
): void {
  if (!snapshot.spheres) return;
  for (const [key, style] of [
    ["far", COLORS.sphereFar],
    ["near", COLORS.sphereNear],
  ] as const) {
    const sphere = snapshot.spheres[key];
    const center = projectPoint(sphere.c as V3, aspect);
    if (!center) continue;
    const px = toPx(center);
    const radius = (projectRadius(sphere.c as V3, sphere.r, aspect) / 2) * width;
    ctx.strokeStyle = style;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.arc(px.x, px.y, Math.max(2, radius), 0, Math.PI * 2);
    ctx.stroke();
  }
}

function drawGazeCross(
  ctx: CanvasRenderingContext2D,
  emulation: EmulationState,
  toPx: (ndc: { x: number; y: number }) => { x: number; y: number },
): void {
  const px = toPx(emulation.gazeNdc);
  ctx.strokeStyle = COLORS.gaze;
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(px.x - 8, px.y);
  ctx.lineTo(px.x + 8, px.y);
  ctx.moveTo(px.x, px.y - 8);
  ctx.lineTo(px.x, px.y + 8);
  ctx.stroke();
}

function drawHandMarker(
  ctx: CanvasRenderingContext2D,
  emulation: EmulationState,
  toPx: (ndc: { x: number; y: number }) => { x: number; y: number },
): void {
  const px = toPx(emulation.handNdc);
  const [lo, hi] = SUMMON_DEPTH_BAND;
  const inBand = emulation.handDepthM >= lo && emulation.handDepthM <= hi;
  ctx.strokeStyle = inBand ? COLORS.hand : COLORS.handOutOfBand;
  ctx.lineWidth = emulation.pinch ? 3 : 1.5;
  ctx.beginPath();
  ctx.arc(px.x, px.y, emulation.pinch ? 7 : 10, 0, Math.PI * 2);
  ctx.stroke();
  ctx.fillStyle = COLORS.dim;
  ctx.font = "10px monospace";
  ctx.fillText(`${emulation.handDepthM.toFixed(2)} m`, px.x + 12, px.y + 3);
}

function drawHud(
  ctx: CanvasRenderingContext2D,
  vm: ViewModel,
  emulation: EmulationState,
  scenarioHint: string,
  width: number,
  height: number,
): void {
  ctx.font = "13px monospace";
  ctx.fillStyle = COLORS.text;
  ctx.fillText(`state: ${hudStateLabel(vm)}`, 12, 20);
  if (vm.snapshot) {
    ctx.fillStyle = vm.snapshot.aligned ? COLORS.hand : COLORS.dim;
    ctx.fillText(vm.snapshot.aligned ? "aligned" : "not aligned", 12, 36);
  }

  ctx.font = "11px monospace";
  let y = 56;
  for (const { state, visited } of checklist(vm)) {
    ctx.fillStyle = visited ? COLORS.hand : COLORS.dim;
    ctx.fillText(`${visited ? "[x]" : "[ ]"} ${state}`, 12, y);
    y += 14;
  }

  ctx.fillStyle = COLORS.dim;
  y += 6;
  for (const line of vm.eventFeed.slice(-5)) {
    ctx.fillText(line, 12, y);
    y += 13;
  }

  const trial = vm.snapshot?.trial;
  if (trial) {
    ctx.fillStyle = COLORS.text;
    const progress = trial.completed_at_ms !== null ? "complete" : `${Math.round(trial.dwell_ms)} / 300 ms`;
    ctx.fillText(`trial: ${progress}`, 12, height - 40);
  }
  if (vm.lastResult) {
    ctx.fillStyle = COLORS.target;
    const m = vm.lastResult.metrics;
    ctx.fillText(
      `done in ${m.trial_completion_time_ms} ms, clutches ${m.clutch_count}`,
      12,
      height - 24,
    );
  }
  if (vm.lastError) {
    ctx.fillStyle = COLORS.handOutOfBand;
    ctx.fillText(`error ${vm.lastError.code}: ${vm.lastError.text}`.slice(0, 90), 12, height - 8);
  }

  ctx.fillStyle = COLORS.dim;
  wrapText(ctx, scenarioHint, width - 300, 20, 288, 13);

  if (vm.connection !== "connected") {
    ctx.fillStyle = "rgba(20, 8, 8, 0.82)";
    ctx.fillRect(0, height / 2 - 26, width, 52);
    ctx.fillStyle = COLORS.handOutOfBand;
    ctx.font = "16px monospace";
    const label = vm.connection === "connecting" ? "connecting..." : "disconnected - retrying";
    ctx.fillText(label, width / 2 - ctx.measureText(label).width / 2, height / 2 + 5);
  }
}

function wrapText(
  ctx: CanvasRenderingContext2D,
  text: string,
  x: number,
  y: number,
  maxWidth: number,
  lineHeight: number,
): void {
  const words = text.split(" ");
  let line = "";
  for (const word of words) {
    const probe = line ? line + " " + word : word;
    if (ctx.measureText(probe).width > maxWidth && line) {
      ctx.fillText(line, x, y);
      line = word;
      y += lineHeight;
    } else {
      line = probe;
    }
  }
  if (line) ctx.fillText(line, x, y);
}
