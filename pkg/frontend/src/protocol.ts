/** Typed view of the session protocol (version 1); see docs/protocol.md in
 * the repository root. The sandbox never interprets interaction logic: it
 * encodes inbound messages and decodes server messages verbatim. */

import type { Quat, V3 } from "./math.js";

export const PROTOCOL_VERSION = 1;

export type StateName =
  | "Idle"
  | "Hovering"
  | "IndirectManipulation"
  | "Summoning"
  | "DirectManipulation";

export const ALL_STATES: StateName[] = [
  "Idle",
  "Hovering",
  "IndirectManipulation",
  "Summoning",
  "DirectManipulation",
];

export interface WireFrame {
  t: number;
  gaze: { o: V3; d: V3 };
  head: { p: V3; q: Quat };
  hand: { p: V3; q: Quat };
  pinch: boolean;
  valid: boolean;
}

export interface SceneObjectDoc {
  id: string;
  position: V3;
  orientation?: Quat;
  half_extents: V3;
  interactable?: boolean;
  space?: "far" | "near";
}

export interface SceneDoc {
  schema: 1;
  eye: V3;
  objects: SceneObjectDoc[];
}

export interface TrialSpecDoc {
  object_size_deg: number;
  rotation_magnitude_deg: number;
  displacement_dir: "+x" | "-x" | "+z" | "-z";
  axis_pair: "xy" | "yz" | "xz";
  seed?: number;
}

export interface SnapshotObject {
  id: string;
  p: V3;
  q: Quat;
  half_extents: V3;
  space: "far" | "near";
  interactable: boolean;
  clipped: boolean;
}

export interface SphereDoc {
  c: V3;
  r: number;
}

export interface EventRecord {
  t: number;
  kind: string;
  id?: string;
  space?: string;
}

export interface TrialStatus {
  object: string;
  target: string;
  width_m: number;
  dwell_ms: number;
  completed_at_ms: number | null;
}

export interface Snapshot {
  type: "snapshot";
  protocol: number;
  t: number;
  state: StateName;
  target: string | null;
  aligned: boolean;
  objects: SnapshotObject[];
  spheres: { far: SphereDoc; near: SphereDoc } | null;
  events: EventRecord[];
  trial: TrialStatus | null;
  dropped: number;
}

export interface Hello {
  type: "hello";
  protocol: number;
}

export interface TrialResult {
  type: "trial_result";
  completed_at_ms: number;
  metrics: Record<string, number>;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  text: string;
}

export interface Heartbeat {
  type: "heartbeat";
}

export type ServerMessage = Snapshot | Hello | TrialResult | ErrorMessage | Heartbeat;

const SERVER_TYPES = new Set(["snapshot", "hello", "trial_result", "error", "heartbeat"]);

/** Decode one server message; null for anything that is not a known message. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const type = (doc as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) return null;
  return doc as ServerMessage;
}

export function frameMessage(frame: WireFrame): string {
  return JSON.stringify({ type: "frame", frame });
}

export function configureMessage(config: Record<string, unknown>): string {
  return JSON.stringify({ type: "configure", config });
}

export function loadSceneMessage(scene: SceneDoc): string {
  return JSON.stringify({ type: "load_scene", scene });
}

export function startTrialMessage(spec: TrialSpecDoc): string {
  return JSON.stringify({ type: "start_trial", spec });
}
