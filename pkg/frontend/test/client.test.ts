import { describe, expect, it } from "vitest";

import { GameClient } from "../src/client.js";
import type { ClientMessage, ServerMessage } from "../src/protocol.js";
import type { Transport } from "../src/transport.js";

class FakeTransport implements Transport {
  sent: ClientMessage[] = [];
  deliver: ((message: ServerMessage) => void) | undefined;

  async join(): Promise<ServerMessage> {
    return {
      type: "joined",
      seat: 1,
      phase: "waiting_for_players",
      round: 0,
      rounds: 10,
      endowment: 10,
      bankrolls: [10, 10],
      instructions_deadline_ms: 240000,
    };
  }

  async send(message: ClientMessage): Promise<void> {
    this.sent.push(message);
  }

  start(onMessage: (message: ServerMessage) => void): void {
    this.deliver = onMessage;
  }

  stop(): void {}
}

async function connected(): Promise<[GameClient, FakeTransport]> {
  const transport = new FakeTransport();
  const client = new GameClient(transport);
  await client.connect();
  return [client, transport];
}

describe("GameClient", () => {
  it("mirrors the joined snapshot", async () => {
    const [client] = await connected();
    expect(client.state.phase).toBe("waiting_for_players");
    expect(client.state.seat).toBe(1);
    expect(client.state.maxRounds).toBe(10);
  });

  it("refuses to decide outside the deciding phase", async () => {
    const [client, transport] = await connected();
    await client.decide("canteen");
    expect(transport.sent).toHaveLength(0);
  });

  it("walks a round through the phases", async () => {
    const [client, transport] = await connected();
    transport.deliver?.({
      type: "round_start",
      round: 1,
      your_arrival: "8:40",
      deadline_ms: 61000,
    });
    expect(client.state.phase).toBe("round_deciding");
    expect(client.state.ownArrival).toBe("8:40");

    await client.decide("canteen");
    await client.decide("canteen"); // double submit is swallowed locally
    expect(transport.sent).toEqual([{ type: "decision", action: "canteen" }]);

    // certainty is refused until the server opens the phase
    await client.reportCertainty("somewhat_certain");
    expect(transport.sent).toHaveLength(1);

    transport.deliver?.({ type: "phase", phase: "round_certainty", deadline_ms: 61000 });
    await client.reportCertainty("somewhat_certain");
    expect(transport.sent).toHaveLength(2);

    transport.deliver?.({
      type: "round_result",
      round: 1,
      arrivals: ["8:40", "8:50"],
      actions: ["canteen", "canteen"],
      your_certainty: "somewhat_certain",
      your_penalty: -0.29,
      bankrolls: [9.71, 9.71],
    });
    expect(client.state.phase).toBe("round_results");
    expect(client.state.history).toHaveLength(1);
    expect(client.state.bankrolls).toEqual([9.71, 9.71]);
    // displayed numbers come from the wire, never recomputed
    expect(client.state.history[0]?.yourPenalty).toBe(-0.29);
  });

  it("handles game over and post-game answers", async () => {
    const [client, transport] = await connected();
    transport.deliver?.({ type: "game_over", reason: "ruin", final_bonus: 0 });
    expect(client.state.phase).toBe("finished");
    expect(client.state.finishReason).toBe("ruin");
    await client.submitPostgame({ cutoff: "There is no such time", simple: "No" });
    await client.submitPostgame({ cutoff: "8:30" }); // only the first submission goes out
    expect(transport.sent).toEqual([
      { type: "postgame", cutoff: "There is no such time", simple: "No" },
    ]);
  });

  it("records server errors without corrupting state", async () => {
    const [client, transport] = await connected();
    transport.deliver?.({ type: "error", code: "wrong_phase", detail: "no" });
    expect(client.state.lastError).toContain("wrong_phase");
    expect(client.state.phase).toBe("waiting_for_players");
  });
});
