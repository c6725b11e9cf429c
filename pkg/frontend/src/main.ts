// Browser entry point: URL parameters pick the live session endpoint
// (?host=...&port=...&window=10), a native WebSocket backs the transport.

import { ConsoleSession, type TransportFactory } from "./session.js";
import { buildConsole } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const host = params.get("host") ?? "127.0.0.1";
const port = params.get("port") ?? "8765";
const windowS = Number(params.get("window") ?? "10");

const webSocketTransport: TransportFactory = (url, handlers) => {
  const ws = new WebSocket(url);
  ws.addEventListener("open", handlers.onopen);
  ws.addEventListener("message", (event) => handlers.onmessage(String(event.data)));
  ws.addEventListener("close", handlers.onclose);
  ws.addEventListener("error", () => ws.close());
  return {
    send: (text) => ws.send(text),
    close: () => ws.close(),
  };
};

const session = new ConsoleSession(`ws://${host}:${port}`, webSocketTransport, {
  windowS,
  retryMs: 2000,
});

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app container");
buildConsole(root, session);
session.connect();
