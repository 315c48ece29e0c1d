// Server-authoritative client core. All game state shown to the player is a
// mirror of received messages: the client never scores anything locally, so
// the page cannot disagree with the engine. Keeping this class free of DOM
// references makes the whole protocol flow testable headlessly.

import type {
  ActionName,
  CertaintyLevel,
  ClientMessage,
  PostgameMessage,
  RoundResultMessage,
  ServerMessage,
} from "./protocol.js";
import type { Transport } from "./transport.js";

export type ClientPhase =
  | "connecting"
  | "waiting_for_players"
  | "round_deciding"
  | "round_certainty"
  | "round_results"
  | "finished";

export interface RoundRow {
  round: number;
  arrivals: string[];
  actions: string[];
  yourCertainty: CertaintyLevel;
  yourPenalty: number;
  bankrolls: number[];
}

export interface ClientState {
  phase: ClientPhase;
  seat: number;
  round: number;
  maxRounds: number;
  ownArrival: string | null;
  deadlineAt: number | null; // epoch ms for the current countdown
  decisionSent: boolean;
  certaintySent: boolean;
  history: RoundRow[];
  bankrolls: number[];
  finalBonus: number | null;
  finishReason: string | null;
  lastError: string | null;
  postgameDone: boolean;
}

export interface TraceEntry {
  dir: "in" | "out";
  message: ServerMessage | ClientMessage;
}

function initialState(): ClientState {
  return {
    phase: "connecting",
    seat: 0,
    round: 0,
    maxRounds: 0,
    ownArrival: null,
    deadlineAt: null,
    decisionSent: false,
    certaintySent: false,
    history: [],
    bankrolls: [],
    finalBonus: null,
    finishReason: null,
    lastError: null,
    postgameDone: false,
  };
}

export class GameClient {
  readonly state: ClientState = initialState();
  readonly trace: TraceEntry[] = [];
  private listeners: Array<(state: ClientState) => void> = [];

  constructor(private readonly transport: Transport) {}

  onChange(listener: (state: ClientState) => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  async connect(): Promise<void> {
    const snapshot = await this.transport.join();
    this.handleMessage(snapshot);
    this.transport.start((message) => this.handleMessage(message));
  }

  stop(): void {
    this.transport.stop();
  }

  handleMessage(message: ServerMessage): void {
    this.trace.push({ dir: "in", message });
    const s = this.state;
    switch (message.type) {
      case "joined":
        s.seat = message.seat;
        s.maxRounds = message.rounds;
        s.bankrolls = message.bankrolls;
        if (s.phase === "connecting") {
          s.phase = message.phase as ClientPhase;
        }
        break;
      case "round_start":
        s.phase = "round_deciding";
        s.round = message.round;
        s.ownArrival = message.your_arrival;
        s.deadlineAt = Date.now() + message.deadline_ms;
        s.decisionSent = false;
        s.certaintySent = false;
        break;
      case "phase":
        s.phase = message.phase as ClientPhase;
        s.deadlineAt = Date.now() + message.deadline_ms;
        break;
      case "round_result":
        s.phase = "round_results";
        s.deadlineAt = null;
        s.bankrolls = message.bankrolls;
        s.history.push(this.toRow(message));
        break;
      case "game_over":
        s.phase = "finished";
        s.deadlineAt = null;
        s.finishReason = message.reason;
        s.finalBonus = message.final_bonus;
        break;
      case "error":
        s.lastError = `${message.code}${message.detail ? `: ${message.detail}` : ""}`;
        break;
    }
    this.notify();
  }

  private toRow(message: RoundResultMessage): RoundRow {
    return {
      round: message.round,
      arrivals: message.arrivals,
      actions: message.actions,
      yourCertainty: message.your_certainty,
      yourPenalty: message.your_penalty,
      bankrolls: message.bankrolls,
    };
  }

  private async send(message: ClientMessage): Promise<void> {
    this.trace.push({ dir: "out", message });
    await this.transport.send(message);
  }

  // Two-step submission: a decision is only available while deciding, the
  // certainty report only after the server has opened the certainty phase.

  async decide(action: ActionName): Promise<void> {
    if (this.state.phase !== "round_deciding" || this.state.decisionSent) return;
    this.state.decisionSent = true;
    this.notify();
    await this.send({ type: "decision", action });
  }

  async reportCertainty(level: CertaintyLevel): Promise<void> {
    if (this.state.phase !== "round_certainty" || this.state.certaintySent) return;
    this.state.certaintySent = true;
    this.notify();
    await this.send({ type: "certainty", level });
  }

  async submitPostgame(answers: Omit<PostgameMessage, "type">): Promise<void> {
    if (this.state.phase !== "finished" || this.state.postgameDone) return;
    this.state.postgameDone = true;
    this.notify();
    await this.send({ type: "postgame", ...answers });
  }
}
