// Entry point: seat configuration comes from query parameters
// (?server=...&session=...&seat=...&token=...); server defaults to the
// page's own origin.

import { GameClient } from "./client.js";
import { GameView } from "./dom.js";
import { PollTransport } from "./transport.js";

function fail(message: string): void {
  const root = document.getElementById("app");
  if (root) {
    root.replaceChildren();
    const banner = document.createElement("p");
    banner.className = "error";
    banner.textContent = message;
    root.append(banner);
  }
}

window.addEventListener("load", () => {
  const params = new URLSearchParams(window.location.search);
  const session = params.get("session");
  const token = params.get("token");
  const seat = Number(params.get("seat") ?? "1");
  const server = params.get("server") ?? window.location.origin;
  const root = document.getElementById("app");
  if (!root) return;
  if (!session || !token || !(seat === 1 || seat === 2)) {
    fail("missing connection parameters: ?session=<id>&seat=<1|2>&token=<token>");
    return;
  }
  const client = new GameClient(new PollTransport({ server, session, seat, token }));
  new GameView(root, client);
  client.connect().catch((error: unknown) => fail(`could not join: ${String(error)}`));
});
