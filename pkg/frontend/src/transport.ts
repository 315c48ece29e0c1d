// HTTP poll transport: the browser-reachable equivalent of the persistent
// wire connection. Outbound messages are POSTed one at a time; inbound
// messages are drained from the seat outbox by cursor. Server rejections
// come back on the POST and are surfaced like pushed error messages, so the
// client behaves identically on either transport.

import type { ClientMessage, ServerMessage } from "./protocol.js";

export interface SeatAddress {
  server: string; // e.g. "http://localhost:9001"
  session: string;
  seat: number;
  token: string;
}

export interface Transport {
  join(): Promise<ServerMessage>;
  send(message: ClientMessage): Promise<void>;
  start(onMessage: (message: ServerMessage) => void): void;
  stop(): void;
}

export class PollTransport implements Transport {
  private cursor = 0;
  private timer: ReturnType<typeof setTimeout> | undefined;
  private stopped = false;
  private onMessage: ((message: ServerMessage) => void) | undefined;

  constructor(
    private readonly address: SeatAddress,
    private readonly intervalMs = 150,
  ) {}

  private get base(): string {
    const { server, session, seat, token } = this.address;
    return `${server}/api/sessions/${session}/seats/${seat}/messages?token=${encodeURIComponent(token)}`;
  }

  async join(): Promise<ServerMessage> {
    const response = await fetch(this.base, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ type: "join" }),
    });
    return (await response.json()) as ServerMessage;
  }

  async send(message: ClientMessage): Promise<void> {
    const response = await fetch(this.base, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(message),
    });
    if (!response.ok) {
      const body = (await response.json()) as ServerMessage;
      if (body.type === "error") this.onMessage?.(body);
    }
  }

  start(onMessage: (message: ServerMessage) => void): void {
    this.onMessage = onMessage;
    this.stopped = false;
    void this.pollLoop();
  }

  private async pollLoop(): Promise<void> {
    if (this.stopped) return;
    try {
      const response = await fetch(`${this.base}&cursor=${this.cursor}`);
      if (response.ok) {
        const body = (await response.json()) as { messages: ServerMessage[]; cursor: number };
        this.cursor = body.cursor;
        for (const message of body.messages) this.onMessage?.(message);
      }
    } catch {
      // transient network failure: keep polling
    }
    this.timer = setTimeout(() => void this.pollLoop(), this.intervalMs);
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== undefined) clearTimeout(this.timer);
  }
}
