/** Browser wiring: one WebSocket, one state object, and a render pass.
 * The touchpad pane on the left captures pointer gestures and streams
 * them to the server; everything on the right renders server messages.
 * No decoding happens here. */

import type { ClientMessage, HelloMessage, Thumb } from "./protocol.js";
import { parseServerMessage, touchMessage } from "./protocol.js";
import type { UiState } from "./state.js";
import {
  displayText,
  initialState,
  noteClientMessage,
  noteConnection,
  reduceServer,
  visibleSuggestions,
} from "./state.js";
import { ContactTracker } from "./touch.js";
import { functionTapPoint, keyPlacements, layoutBounds } from "./keyboard.js";
import { formatPercent, formatWpm, liveWpm } from "./wpm.js";

interface PhraseSets {
  [name: string]: string[];
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const banner = el<HTMLDivElement>("banner");
const pane = el<HTMLDivElement>("touchpad");
const keyboardEl = el<HTMLDivElement>("keyboard");
const textOut = el<HTMLDivElement>("text-out");
const phrasePresented = el<HTMLDivElement>("phrase-presented");
const phraseLiveWpm = el<HTMLSpanElement>("phrase-live-wpm");
const suggestionsEl = el<HTMLDivElement>("suggestions");
const metricsBody = el<HTMLTableSectionElement>("metrics-body");
const noticesEl = el<HTMLUListElement>("notices");
const errorLine = el<HTMLDivElement>("error-line");
const phraseSetSel = el<HTMLSelectElement>("phrase-set");
const btnStart = el<HTMLButtonElement>("btn-start");
const btnEnd = el<HTMLButtonElement>("btn-end");
const btnSpace = el<HTMLButtonElement>("btn-space");
const btnBackspace = el<HTMLButtonElement>("btn-backspace");
const btnEnter = el<HTMLButtonElement>("btn-enter");
const optPredictions = el<HTMLInputElement>("opt-predictions");
const optHidePad = el<HTMLInputElement>("opt-hide-pad");

let state: UiState = initialState();
let ws: WebSocket | null = null;
const tracker = new ContactTracker();
let phraseSets: PhraseSets = {};
let phraseIndex = 0;
// keep synthetic taps clear of real pointer ids and the service's own
// bridged pointer range
let syntheticPointer = 900_001;
const cursorMarkers: Record<Thumb, HTMLDivElement> = {
  left: document.createElement("div"),
  right: document.createElement("div"),
};

function connect(): void {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  ws = new WebSocket(`${proto}://${location.host}/ws`);
  state = noteConnection(state, "connecting");
  render();
  ws.onopen = () => {
    tracker.reset();
    state = noteConnection(state, "open");
    render();
  };
  ws.onmessage = (ev) => {
    if (typeof ev.data !== "string") return;
    const msg = parseServerMessage(ev.data);
    if (!msg) {
      console.warn("dropped malformed frame", ev.data);
      return;
    }
    const hadHello = state.hello !== null;
    state = reduceServer(state, msg);
    if (msg.kind === "hello" && !hadHello) buildKeyboard(msg);
    if (msg.kind === "hello") optPredictions.checked = msg.predictions_enabled;
    render();
  };
  ws.onclose = () => {
    ws = null;
    tracker.reset();
    state = noteConnection(state, "closed");
    render();
    setTimeout(connect, 1000);
  };
}

function send(msg: ClientMessage): void {
  if (!ws || ws.readyState !== WebSocket.OPEN) return;
  ws.send(JSON.stringify(msg));
  state = noteClientMessage(state, msg, performance.now());
  render();
}

// -- keyboard rendering ----------------------------------------------------

interface GridMap {
  toLeftPct(x: number): number;
  toTopPct(y: number): number;
  keyWidthPct: number;
  keyHeightPct: number;
}

let grid: GridMap | null = null;

function buildKeyboard(hello: HelloMessage): void {
  const placements = keyPlacements(hello.layout);
  const b = layoutBounds(placements);
  const spanX = b.maxX - b.minX + 1;
  const spanY = b.maxY - b.minY + 1;
  grid = {
    toLeftPct: (x) => ((x - b.minX + 0.5) / spanX) * 100,
    toTopPct: (y) => ((y - b.minY + 0.5) / spanY) * 100,
    keyWidthPct: (1 / spanX) * 100,
    keyHeightPct: (1 / spanY) * 100,
  };
  keyboardEl.style.aspectRatio = `${spanX} / ${spanY}`;
  keyboardEl.replaceChildren();
  for (const p of placements) {
    const key = document.createElement("div");
    key.className = `key thumb-${p.thumb}${p.isStart ? " start" : ""}`;
    key.textContent = p.key;
    key.style.left = `${grid.toLeftPct(p.x)}%`;
    key.style.top = `${grid.toTopPct(p.y)}%`;
    key.style.width = `${grid.keyWidthPct - 1}%`;
    key.style.height = `${grid.keyHeightPct - 4}%`;
    keyboardEl.appendChild(key);
  }
  for (const thumb of ["left", "right"] as const) {
    const marker = cursorMarkers[thumb];
    marker.className = `cursor-marker thumb-${thumb}`;
    marker.style.display = "none";
    keyboardEl.appendChild(marker);
  }
  pane.style.aspectRatio = `${hello.pad.width} / ${hello.pad.height}`;
}

// -- render ----------------------------------------------------------------

function render(): void {
  banner.textContent =
    state.connection === "open"
      ? "connected"
      : state.connection === "connecting"
        ? "connecting..."
        : "disconnected - retrying";
  banner.className = `banner ${state.connection}`;
  const interactive = state.connection === "open";
  pane.classList.toggle("disabled", !interactive);
  for (const btn of [btnStart, btnEnd, btnSpace, btnBackspace, btnEnter]) {
    btn.disabled = !interactive;
  }
  optPredictions.disabled = !interactive;

  const text = displayText(state);
  textOut.textContent = text;
  textOut.appendChild(caret());

  if (state.phrase) {
    phrasePresented.textContent = state.phrase.presented;
    phrasePresented.classList.remove("idle");
  } else {
    phrasePresented.textContent = "no phrase in progress";
    phrasePresented.classList.add("idle");
  }
  renderLiveWpm();

  suggestionsEl.replaceChildren();
  visibleSuggestions(state).forEach((word, slot) => {
    const chip = document.createElement("button");
    chip.className = "chip";
    chip.textContent = word;
    chip.disabled = !interactive;
    chip.addEventListener("click", () => sendFunctionTap(`suggest${slot + 1}`));
    suggestionsEl.appendChild(chip);
  });

  for (const thumb of ["left", "right"] as const) {
    const marker = cursorMarkers[thumb];
    const cur = state.cursors[thumb];
    if (cur && grid) {
      marker.style.display = "block";
      marker.style.left = `${grid.toLeftPct(cur.x)}%`;
      marker.style.top = `${grid.toTopPct(cur.y)}%`;
    } else {
      marker.style.display = "none";
    }
  }

  metricsBody.replaceChildren();
  for (const m of state.metricsHistory) {
    const row = document.createElement("tr");
    for (const cell of [
      m.presented,
      m.transcribed,
      formatWpm(m.wpm),
      formatPercent(m.uncorrected_error_rate),
      formatPercent(m.corrected_error_rate),
    ]) {
      const td = document.createElement("td");
      td.textContent = cell;
      row.appendChild(td);
    }
    metricsBody.appendChild(row);
  }

  noticesEl.replaceChildren();
  for (const note of state.notices) {
    const li = document.createElement("li");
    li.textContent = note;
    noticesEl.appendChild(li);
  }

  errorLine.textContent = state.lastError ?? "";
}

function caret(): HTMLSpanElement {
  const span = document.createElement("span");
  span.className = "caret";
  return span;
}

function renderLiveWpm(): void {
  if (state.phrase && state.phrase.startedAtMs !== null) {
    const elapsed = (performance.now() - state.phrase.startedAtMs) / 1000;
    phraseLiveWpm.textContent = formatWpm(liveWpm(displayText(state).length, elapsed));
  } else {
    const last = state.metricsHistory[state.metricsHistory.length - 1];
    phraseLiveWpm.textContent = last ? formatWpm(last.wpm) : "0.00";
  }
}

// the live readout ticks between messages while a phrase is running
setInterval(renderLiveWpm, 250);

// -- touch capture ----------------------------------------------------------

function paneRect() {
  const r = pane.getBoundingClientRect();
  return { left: r.left, top: r.top, width: r.width, height: r.height };
}

pane.addEventListener("pointerdown", (ev) => {
  if (state.connection !== "open") return;
  const msg = tracker.down(ev.pointerId, paneRect(), ev.clientX, ev.clientY, ev.timeStamp);
  if (msg) {
    pane.setPointerCapture(ev.pointerId);
    ev.preventDefault();
    send(msg);
  }
});

pane.addEventListener("pointermove", (ev) => {
  const msg = tracker.move(ev.pointerId, paneRect(), ev.clientX, ev.clientY, ev.timeStamp);
  if (msg) send(msg);
});

for (const type of ["pointerup", "pointercancel"] as const) {
  pane.addEventListener(type, (ev) => {
    const msg = tracker.up(ev.pointerId, paneRect(), ev.clientX, ev.clientY, ev.timeStamp);
    if (msg) send(msg);
  });
}

// -- synthetic taps (suggestion chips, function buttons) ---------------------

function sendFunctionTap(name: string): void {
  if (!state.hello) return;
  const point = functionTapPoint(state.hello.layout, name);
  if (!point) return;
  const pointer = syntheticPointer++;
  const t = performance.now();
  send(touchMessage("touch_down", pointer, point.x, point.y, t));
  send(touchMessage("touch_up", pointer, point.x, point.y, t + 60));
}

btnSpace.addEventListener("click", () => sendFunctionTap("space"));
btnBackspace.addEventListener("click", () => sendFunctionTap("backspace"));
btnEnter.addEventListener("click", () => sendFunctionTap("enter"));

// -- phrase tasks -------------------------------------------------------------

async function loadPhraseSets(): Promise<void> {
  try {
    const res = await fetch("phrases.json");
    phraseSets = (await res.json()) as PhraseSets;
  } catch {
    phraseSets = { fallback: ["the dog ran home"] };
  }
  phraseSetSel.replaceChildren();
  for (const name of Object.keys(phraseSets)) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name.replace(/_/g, " ");
    phraseSetSel.appendChild(opt);
  }
}

btnStart.addEventListener("click", () => {
  const set = phraseSets[phraseSetSel.value];
  if (!set || set.length === 0) return;
  const text = set[phraseIndex % set.length] as string;
  phraseIndex += 1;
  send({ kind: "start_phrase", text });
});

btnEnd.addEventListener("click", () => send({ kind: "end_phrase" }));

// -- options ------------------------------------------------------------------

optPredictions.addEventListener("change", () => {
  send({ kind: "set_options", predictions_enabled: optPredictions.checked });
});

optHidePad.addEventListener("change", () => {
  // rendering only: the pane keeps capturing exactly the same events
  pane.classList.toggle("blank", optHidePad.checked);
});

void loadPhraseSets();
connect();
