/** Input emulation: the pointer steers a gaze ray from a fixed eye through
 * the view plane; a second marker plus a depth control steers the hand
 * (covering the 0.3-0.5 m depth band that gates summoning); a key holds the
 * pinch. Frames are emitted on a fixed clock at or above 30 Hz. */

import { normalize, type Quat, type V3 } from "./math.js";
import type { WireFrame } from "./protocol.js";

export const EYE: V3 = [0, 0, 0];
export const HALF_FOV_DEG = 35;
export const FRAME_RATE_HZ = 60;

export const HAND_DEPTH_MIN = 0.15;
export const HAND_DEPTH_MAX = 1.0;
export const SUMMON_DEPTH_BAND: [number, number] = [0.3, 0.5];

export interface EmulationState {
  /** Normalized device coordinates in [-1, 1]; +y up. */
  gazeNdc: { x: number; y: number };
  handNdc: { x: number; y: number };
  handDepthM: number;
  pinch: boolean;
}

export function initialEmulation(): EmulationState {
  return {
    gazeNdc: { x: 0, y: 0 },
    handNdc: { x: 0.3, y: -0.88 },
    handDepthM: 0.42,
    pinch: false,
  };
}

/** View-plane direction for a pointer position: x right, y up, z forward. */
export function directionFromNdc(ndc: { x: number; y: number }, aspect = 1): V3 {
  const tanHalf = Math.tan((HALF_FOV_DEG * Math.PI) / 180);
  return normalize([ndc.x * tanHalf * aspect, ndc.y * tanHalf, 1]);
}

export function gazeRay(state: EmulationState, aspect = 1): { o: V3; d: V3 } {
  return { o: EYE, d: directionFromNdc(state.gazeNdc, aspect) };
}

/** Hand point: along its own view ray at the controlled depth, so raising the
 * marker onto the gaze point brings the hand into the gaze line. */
export function handPoint(state: EmulationState, aspect = 1): V3 {
  const dir = directionFromNdc(state.handNdc, aspect);
  const depth = clampDepth(state.handDepthM);
  return [dir[0] * depth, dir[1] * depth, dir[2] * depth];
}

export function clampDepth(depth: number): number {
  return Math.min(HAND_DEPTH_MAX, Math.max(HAND_DEPTH_MIN, depth));
}

const IDENTITY: Quat = [1, 0, 0, 0];

export function emulateFrame(state: EmulationState, tMs: number, aspect = 1): WireFrame {
  const gaze = gazeRay(state, aspect);
  return {
    t: tMs,
    gaze,
    head: { p: EYE, q: IDENTITY },
    hand: { p: handPoint(state, aspect), q: IDENTITY },
    pinch: state.pinch,
    valid: true,
  };
}

/** Frame timestamps on the emulation clock (integer ms, strictly increasing). */
export function frameTimestamp(frameIndex: number): number {
  return Math.round((1000 * frameIndex) / FRAME_RATE_HZ);
}
