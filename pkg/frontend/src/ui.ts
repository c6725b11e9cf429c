// DOM construction and rendering for the tuning console. Logic lives in
// session.ts; this file only reflects session state into elements and
// forwards operator actions.

import type { ConsoleSession } from "./session.js";
import {
  ACTIVITIES,
  type Activity,
  type ImpedanceCell,
  type Phase,
  cellKey,
  phasesFor,
} from "./protocol.js";
import { type ChartSpec, drawPhaseBand, drawStrip } from "./charts.js";

const CHART_SPECS: ChartSpec[] = [
  { label: "knee angle (deg)", accessor: (p) => p.theta, yMin: -5, yMax: 125, color: "#6fb1ff" },
  { label: "knee velocity (deg/s)", accessor: (p) => p.theta_dot, yMin: -500, yMax: 500, color: "#7ee0a3" },
  { label: "vertical force (N)", accessor: (p) => p.f_vertical, yMin: -20, yMax: 1200, color: "#ffd166" },
  { label: "sagittal moment (Nm)", accessor: (p) => p.m_sagittal, yMin: -50, yMax: 10, color: "#ef8996" },
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function buildConsole(root: HTMLElement, session: ConsoleSession): void {
  root.innerHTML = "";

  const header = el("header", "bar");
  const connBadge = el("span", "badge conn", "disconnected");
  const placementBadge = el("span", "badge placement", "placement: ?");
  const modeBadge = el("span", "badge mode", "mode: ?");
  const dropBadge = el("span", "badge drops", "dropped: 0");
  header.append(el("h1", "", "powered knee tuning console"),
                connBadge, placementBadge, modeBadge, dropBadge);
  root.append(header);

  const main = el("div", "layout");
  root.append(main);

  // strip charts + phase band
  const chartsBox = el("section", "charts");
  const canvases: HTMLCanvasElement[] = [];
  for (const spec of CHART_SPECS) {
    const canvas = el("canvas", "strip");
    canvas.width = 760;
    canvas.height = 110;
    canvas.title = spec.label;
    chartsBox.append(canvas);
    canvases.push(canvas);
  }
  const bandCanvas = el("canvas", "band");
  bandCanvas.width = 760;
  bandCanvas.height = 18;
  chartsBox.append(bandCanvas, el("div", "hint", "gait phase band"));
  main.append(chartsBox);

  const side = el("aside", "side");
  main.append(side);

  // key fob
  const fob = el("section", "fob");
  fob.append(el("h2", "", "key fob"));
  const fobButtons = new Map<Activity, HTMLButtonElement>();
  for (const mode of ACTIVITIES) {
    const button = el("button", "fob-btn", mode.replace("_", " "));
    button.disabled = true;
    button.addEventListener("click", () => {
      button.classList.add("pending");
      session
        .sendModeRequest(mode)
        .catch(() => undefined)
        .finally(() => button.classList.remove("pending"));
    });
    fobButtons.set(mode, button);
    fob.append(button);
  }
  side.append(fob);

  // parameter editor
  const editor = el("section", "editor");
  editor.append(el("h2", "", "impedance parameters"));
  const activitySelect = el("select") as HTMLSelectElement;
  for (const mode of ACTIVITIES) {
    const option = el("option", "", mode) as HTMLOptionElement;
    option.value = mode;
    activitySelect.append(option);
  }
  editor.append(activitySelect);
  const grid = el("div", "grid");
  editor.append(grid);
  const status = el("div", "status", "");
  editor.append(status);
  side.append(editor);

  function renderEditor(): void {
    const activity = activitySelect.value as Activity;
    grid.innerHTML = "";
    for (const phase of phasesFor(activity)) {
      const confirmed = session.confirmedParams.get(cellKey(activity, phase));
      const row = el("div", "row");
      row.append(el("span", "cell-name", phase.replace("_", " ")));
      const inputs: Record<string, HTMLInputElement> = {};
      for (const field of ["k", "b", "theta_eq"] as const) {
        const input = el("input") as HTMLInputElement;
        input.type = "number";
        input.step = "0.1";
        // drafts start from the confirmed value; they are not state
        input.value = confirmed ? String(confirmed[field]) : "";
        input.disabled = session.state !== "ready" || !session.isTunable(activity, phase);
        inputs[field] = input;
        const wrap = el("label", "field", field);
        wrap.append(input);
        row.append(wrap);
      }
      const apply = el("button", "apply", "apply");
      apply.disabled = session.state !== "ready" || !session.isTunable(activity, phase);
      apply.addEventListener("click", () => {
        const draft: ImpedanceCell = {
          k: Number(inputs["k"]!.value),
          b: Number(inputs["b"]!.value),
          theta_eq: Number(inputs["theta_eq"]!.value),
        };
        status.textContent = `sending ${cellKey(activity, phase)}...`;
        session
          .sendParamUpdate(activity, phase, draft)
          .then(() => {
            status.textContent = `confirmed ${cellKey(activity, phase)}`;
          })
          .catch((err: Error) => {
            status.textContent = `rejected: ${err.message}`;
            renderEditor(); // revert drafts to the confirmed values
          });
      });
      row.append(apply);
      grid.append(row);
    }
  }
  activitySelect.addEventListener("change", renderEditor);

  session.on("state", () => {
    connBadge.textContent = session.state;
    connBadge.dataset["state"] = session.state;
    const ready = session.state === "ready";
    for (const button of fobButtons.values()) button.disabled = !ready;
    renderEditor();
  });
  session.on("snapshot", () => {
    placementBadge.textContent = `placement: ${session.placement ?? "?"}`;
    renderEditor();
  });
  session.on("params", renderEditor);
  session.on("telemetry", () => {
    modeBadge.textContent = `mode: ${session.currentMode ?? "?"} / ${session.currentPhase ?? "?"}`;
    dropBadge.textContent = `dropped: ${session.buffer.droppedOutOfOrder}`;
  });

  // rendering loop, throttled to the display refresh
  function paint(): void {
    const latest = session.buffer.latest;
    if (latest !== undefined) {
      const tNow = latest.t;
      const samples = session.buffer.samples();
      canvases.forEach((canvas, i) => {
        const ctx = canvas.getContext("2d");
        if (ctx) drawStrip(ctx, samples, CHART_SPECS[i]!, tNow, session.buffer.windowS);
      });
      const bandCtx = bandCanvas.getContext("2d");
      if (bandCtx) drawPhaseBand(bandCtx, samples, tNow, session.buffer.windowS);
    }
    requestAnimationFrame(paint);
  }
  requestAnimationFrame(paint);
  renderEditor();
}
