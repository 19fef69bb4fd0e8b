/** WebSocket client: connects, replays the active scenario's setup messages,
 * pumps emulated frames on a fixed clock, and feeds server messages to the
 * view-model reducer. Frames are suppressed while disconnected; reconnects
 * re-send the scenario setup (the server state is authoritative). */

import { emulateFrame, FRAME_RATE_HZ, type EmulationState } from "./emulate.js";
import {
  configureMessage,
  frameMessage,
  loadSceneMessage,
  parseServerMessage,
  startTrialMessage,
} from "./protocol.js";
import type { Scenario } from "./scenarios.js";

export interface ClientCallbacks {
  onMessage(raw: string): void;
  onConnection(connected: boolean): void;
}

export class SessionClient {
  private ws: WebSocket | null = null;
  private timer: number | null = null;
  private frameIndex = 0;
  private epochMs = 0;
  private scenario: Scenario | null = null;
  private reconnectDelayMs = 1000;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly callbacks: ClientCallbacks,
    private readonly emulation: () => EmulationState,
    private readonly aspect: () => number,
  ) {}

  start(scenario: Scenario): void {
    this.scenario = scenario;
    this.closed = false;
    this.connect();
  }

  setScenario(scenario: Scenario): void {
    this.scenario = scenario;
    // A scenario switch needs a fresh engine timeline: reconnect.
    if (this.ws) this.ws.close();
  }

  stop(): void {
    this.closed = true;
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
    if (this.ws) this.ws.close();
  }

  private connect(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.callbacks.onConnection(true);
      this.sendSetup();
      this.frameIndex = 0;
      this.epochMs = 0;
      if (this.timer !== null) clearInterval(this.timer);
      this.timer = setInterval(() => this.pumpFrame(), 1000 / FRAME_RATE_HZ) as unknown as number;
    };
    this.ws.onmessage = (event) => this.callbacks.onMessage(String(event.data));
    this.ws.onclose = () => {
      this.callbacks.onConnection(false);
      if (this.timer !== null) clearInterval(this.timer);
      this.timer = null;
      this.ws = null;
      if (!this.closed) setTimeout(() => this.connect(), this.reconnectDelayMs);
    };
  }

  private sendSetup(): void {
    if (!this.ws || !this.scenario) return;
    this.ws.send(configureMessage(this.scenario.config));
    this.ws.send(loadSceneMessage(this.scenario.scene));
    if (this.scenario.trial) this.ws.send(startTrialMessage(this.scenario.trial));
  }

  private pumpFrame(): void {
    if (!this.ws || this.ws.readyState !== WebSocket.OPEN) return;
    const t = Math.round((1000 * this.frameIndex) / FRAME_RATE_HZ) + this.epochMs;
    this.frameIndex += 1;
    this.ws.send(frameMessage(emulateFrame(this.emulation(), t, this.aspect())));
  }
}

export function defaultEndpoint(): string {
  const params = new URLSearchParams(window.location.search);
  const override = params.get("ws");
  if (override) return override;
  const scheme = window.location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${window.location.host}/session`;
}

export { parseServerMessage };
