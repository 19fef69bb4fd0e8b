/** Pure reducer over server messages. The sandbox holds no interaction
 * logic: every rendered pose, sphere, and state label comes from the last
 * snapshot, so reconnecting resumes from whatever the server reports. */

import type { ServerMessage, Snapshot, StateName, TrialResult } from "./protocol.js";
import { ALL_STATES } from "./protocol.js";

export type Connection = "connecting" | "connected" | "disconnected";

export interface ViewModel {
  connection: Connection;
  protocol: number | null;
  snapshot: Snapshot | null;
  lastError: { code: string; text: string } | null;
  lastResult: TrialResult | null;
  heartbeats: number;
  droppedTotal: number;
  /** Interaction states witnessed in snapshots (the sandbox checklist). */
  visitedStates: StateName[];
  eventFeed: string[];
}

export function initialViewModel(): ViewModel {
  return {
    connection: "connecting",
    protocol: null,
    snapshot: null,
    lastError: null,
    lastResult: null,
    heartbeats: 0,
    droppedTotal: 0,
    visitedStates: [],
    eventFeed: [],
  };
}

export function setConnection(vm: ViewModel, connection: Connection): ViewModel {
  return { ...vm, connection };
}

export function applyServerMessage(vm: ViewModel, message: ServerMessage): ViewModel {
  switch (message.type) {
    case "hello":
      return { ...vm, connection: "connected", protocol: message.protocol };
    case "heartbeat":
      return { ...vm, heartbeats: vm.heartbeats + 1 };
    case "error":
      return { ...vm, lastError: { code: message.code, text: message.text } };
    case "trial_result":
      return { ...vm, lastResult: message };
    case "snapshot": {
      const visited = vm.visitedStates.includes(message.state)
        ? vm.visitedStates
        : [...vm.visitedStates, message.state];
      const feed = message.events.length
        ? [...vm.eventFeed, ...message.events.map((e) => `${e.t} ${e.kind}${e.id ? " " + e.id : ""}`)].slice(-8)
        : vm.eventFeed;
      return {
        ...vm,
        snapshot: message,
        droppedTotal: vm.droppedTotal + message.dropped,
        visitedStates: visited,
        eventFeed: feed,
      };
    }
  }
}

/** The HUD state label always equals the last snapshot's state name. */
export function hudStateLabel(vm: ViewModel): string {
  return vm.snapshot ? vm.snapshot.state : "(no snapshot)";
}

export function checklist(vm: ViewModel): { state: StateName; visited: boolean }[] {
  return ALL_STATES.map((state) => ({ state, visited: vm.visitedStates.includes(state) }));
}

export function framesAllowed(vm: ViewModel): boolean {
  return vm.connection === "connected";
}
