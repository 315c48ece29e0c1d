// Thin DOM layer: renders ClientState into the page and forwards clicks to
// the GameClient. Follows the experiment's page sequence on a single page:
// instructions -> rounds (choice, then certainty) -> results -> post-game.

import type { GameClient, ClientState } from "./client.js";
import {
  CERTAINTY_LEVELS,
  CERTAINTY_WORDING,
  COMMON_KNOWLEDGE_OPTIONS,
  SAFE_TIME_OPTIONS,
  type CertaintyLevel,
} from "./protocol.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text) node.textContent = text;
  return node;
}

export class GameView {
  private countdownTimer: ReturnType<typeof setInterval> | undefined;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GameClient,
  ) {
    client.onChange(() => this.render());
    this.countdownTimer = setInterval(() => this.renderCountdown(), 250);
  }

  destroy(): void {
    if (this.countdownTimer !== undefined) clearInterval(this.countdownTimer);
  }

  private render(): void {
    const s = this.client.state;
    this.root.replaceChildren();
    this.root.append(this.header(s));
    if (s.lastError) {
      this.root.append(el("p", { class: "error" }, `server error — ${s.lastError}`));
    }
    switch (s.phase) {
      case "connecting":
        this.root.append(el("p", {}, "connecting…"));
        break;
      case "waiting_for_players":
        this.root.append(
          el("p", {}, "Waiting for your colleague to join…"),
          this.instructions(),
        );
        break;
      case "round_deciding":
        this.root.append(this.decisionPanel(s), this.historyTable(s), this.instructions());
        break;
      case "round_certainty":
        this.root.append(this.certaintyPanel(s), this.historyTable(s));
        break;
      case "round_results":
        this.root.append(
          el("p", {}, "Waiting for the next round…"),
          this.historyTable(s),
        );
        break;
      case "finished":
        this.root.append(this.finalPanel(s), this.historyTable(s));
        break;
    }
    this.renderCountdown();
  }

  private header(s: ClientState): HTMLElement {
    const header = el("div", { class: "header" });
    header.append(el("h1", {}, "Canteen Dilemma"));
    const status = s.round
      ? `round ${s.round} of ${s.maxRounds} — your bonus: $${this.ownBankroll(s)}`
      : "";
    header.append(el("p", { class: "status" }, status));
    header.append(el("p", { class: "countdown", id: "countdown" }));
    return header;
  }

  private ownBankroll(s: ClientState): string {
    const value = s.bankrolls[s.seat - 1];
    return value === undefined ? "—" : value.toFixed(2);
  }

  private instructions(): HTMLElement {
    const box = el("details", { class: "instructions" });
    box.append(el("summary", {}, "Rules"));
    box.append(
      el(
        "p",
        {},
        "Every morning you and your colleague arrive at work 10 minutes apart. " +
          "You see only your own arrival time. If you arrive before 9:00 you have " +
          "time for a coffee in the canteen, but only go if your colleague goes too. " +
          "If either of you arrives at 9:00 or later, both of you should go straight " +
          "to your offices. After choosing, state how certain you are that your " +
          "colleague chose the same. Matching canteen visits cost the least; " +
          "splitting up (or a canteen choice at 9:00 or later) costs by far the most.",
      ),
    );
    return box;
  }

  private decisionPanel(s: ClientState): HTMLElement {
    const panel = el("div", { class: "panel" });
    panel.append(el("h2", {}, `You arrive at ${s.ownArrival ?? "…"}`));
    panel.append(el("p", {}, "Where do you go?"));
    for (const action of ["canteen", "office"] as const) {
      const button = el("button", { class: `choice ${action}` }, action);
      button.disabled = s.decisionSent;
      button.addEventListener("click", () => void this.client.decide(action));
      panel.append(button);
    }
    if (s.decisionSent) panel.append(el("p", {}, "Choice sent — waiting for your colleague."));
    return panel;
  }

  private certaintyPanel(s: ClientState): HTMLElement {
    const panel = el("div", { class: "panel" });
    panel.append(
      el("h2", {}, "How certain are you that your colleague made the same choice?"),
    );
    for (const level of CERTAINTY_LEVELS) {
      const button = el("button", { class: "certainty" }, CERTAINTY_WORDING[level]);
      button.disabled = s.certaintySent;
      button.addEventListener("click", () => void this.client.reportCertainty(level));
      panel.append(button);
    }
    return panel;
  }

  private historyTable(s: ClientState): HTMLElement {
    if (!s.history.length) return el("div");
    const table = el("table", { class: "history" });
    const head = el("tr");
    for (const heading of [
      "round",
      "you arrived",
      "colleague arrived",
      "your choice",
      "colleague's choice",
      "your certainty",
      "your penalty",
      "your bonus",
    ]) {
      head.append(el("th", {}, heading));
    }
    table.append(head);
    const you = s.seat - 1;
    const other = 1 - you;
    for (const row of s.history) {
      const tr = el("tr");
      tr.append(
        el("td", {}, String(row.round)),
        el("td", {}, row.arrivals[you] ?? ""),
        el("td", {}, row.arrivals[other] ?? ""),
        el("td", {}, row.actions[you] ?? ""),
        el("td", {}, row.actions[other] ?? ""),
        el("td", {}, CERTAINTY_WORDING[row.yourCertainty]),
        el("td", {}, row.yourPenalty.toFixed(2)),
        el("td", {}, (row.bankrolls[you] ?? 0).toFixed(2)),
      );
      table.append(tr);
    }
    return table;
  }

  private finalPanel(s: ClientState): HTMLElement {
    const panel = el("div", { class: "panel" });
    const headline =
      s.finishReason === "ruin"
        ? "The game is over — all of the bonus is gone."
        : "The game is over.";
    panel.append(el("h2", {}, headline));
    panel.append(el("p", {}, `Your final bonus: $${(s.finalBonus ?? 0).toFixed(2)}`));
    if (!s.postgameDone) panel.append(this.postgameForm());
    else panel.append(el("p", {}, "Thanks — your answers were recorded."));
    return panel;
  }

  private postgameForm(): HTMLElement {
    const form = el("div", { class: "postgame" });
    form.append(
      el(
        "p",
        {},
        "Imagine you could have agreed beforehand with your colleague about a " +
          "point in time where it is safe to go to the canteen. What time would that be?",
      ),
    );
    const safeTime = el("select", { id: "safe-time" });
    for (const option of SAFE_TIME_OPTIONS) safeTime.append(el("option", {}, option));
    form.append(safeTime);
    form.append(
      el(
        "p",
        {},
        "Imagine you arrive at 8:10 am. Is it common knowledge between you and " +
          "your colleague that it is safe to go to the canteen, that is, you both " +
          "arrived before 9:00 am?",
      ),
    );
    const commonKnowledge = el("select", { id: "common-knowledge" });
    for (const option of COMMON_KNOWLEDGE_OPTIONS) commonKnowledge.append(el("option", {}, option));
    form.append(commonKnowledge);
    form.append(el("p", {}, "What strategy did you use while playing this game?"));
    const strategy = el("textarea", { id: "strategy", rows: "3" });
    form.append(strategy);
    const submit = el("button", { class: "submit" }, "submit answers");
    submit.addEventListener("click", () => {
      void this.client.submitPostgame({
        cutoff: safeTime.value,
        simple: commonKnowledge.value,
        ...(strategy.value ? { strategy: strategy.value } : {}),
      });
    });
    form.append(submit);
    return form;
  }

  private renderCountdown(): void {
    const node = document.getElementById("countdown");
    if (!node) return;
    const deadline = this.client.state.deadlineAt;
    if (deadline === null) {
      node.textContent = "";
      return;
    }
    const remaining = Math.max(0, Math.ceil((deadline - Date.now()) / 1000));
    node.textContent = `${remaining}s left`;
  }
}
