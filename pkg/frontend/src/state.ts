/** The UI's single state object and its reducer.
 *
 * Text, suggestions, and cursors change only in reduceServer: the browser
 * never decodes gestures itself, it renders what the server said. Client
 * messages feed noteClientMessage, which does phrase bookkeeping (what was
 * presented, when typing started) and nothing else.
 */

import type {
  ClientMessage,
  CursorMessage,
  DecoderEvent,
  HelloMessage,
  MetricsMessage,
  ServerMessage,
  Thumb,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface CursorPoint {
  x: number;
  y: number;
  t: number;
}

export interface PhraseTask {
  presented: string;
  /** Wall-clock ms of the first touch after start, for the live WPM
   * readout; null until the first contact. */
  startedAtMs: number | null;
}

export interface UiState {
  connection: ConnectionStatus;
  hello: HelloMessage | null;
  committedText: string;
  currentWord: string;
  suggestions: string[];
  cursors: Record<Thumb, CursorPoint | null>;
  phrase: PhraseTask | null;
  metricsHistory: MetricsMessage[];
  lastError: string | null;
  /** Human-readable feed of correction events, newest last. */
  notices: string[];
}

export function initialState(): UiState {
  return {
    connection: "connecting",
    hello: null,
    committedText: "",
    currentWord: "",
    suggestions: [],
    cursors: { left: null, right: null },
    phrase: null,
    metricsHistory: [],
    lastError: null,
    notices: [],
  };
}

const NOTICE_LIMIT = 6;

function noticeFor(ev: DecoderEvent): string | null {
  switch (ev.kind) {
    case "autocorrect_applied":
      return `corrected "${ev.original}" to "${ev.replacement}"`;
    case "autocorrect_reverted":
      return `reverted to "${ev.original}"`;
    case "suggest_accepted":
      return `accepted "${ev.word}"`;
    default:
      return null;
  }
}

export function reduceServer(state: UiState, msg: ServerMessage): UiState {
  switch (msg.kind) {
    case "hello":
      return { ...state, hello: msg };
    case "state": {
      const notices = [...state.notices];
      for (const ev of msg.events) {
        const note = noticeFor(ev);
        if (note) notices.push(note);
      }
      return {
        ...state,
        committedText: msg.committed_text,
        currentWord: msg.current_word,
        suggestions: msg.suggestions,
        // a state message means a gesture ended; stale markers would
        // float over the keyboard forever otherwise
        cursors: { left: null, right: null },
        notices: notices.slice(-NOTICE_LIMIT),
      };
    }
    case "cursor":
      return { ...state, cursors: withCursor(state.cursors, msg) };
    case "metrics":
      return {
        ...state,
        metricsHistory: [...state.metricsHistory, msg],
        phrase: null,
      };
    case "error":
      return { ...state, lastError: msg.message };
  }
}

function withCursor(
  cursors: Record<Thumb, CursorPoint | null>,
  msg: CursorMessage,
): Record<Thumb, CursorPoint | null> {
  return { ...cursors, [msg.thumb]: { x: msg.x, y: msg.y, t: msg.t } };
}

export function noteConnection(
  state: UiState,
  status: ConnectionStatus,
): UiState {
  if (status === "open") {
    // fresh server session: nothing from the old one survives
    return { ...initialState(), connection: "open" };
  }
  return { ...state, connection: status };
}

export function noteClientMessage(
  state: UiState,
  msg: ClientMessage,
  nowMs: number,
): UiState {
  switch (msg.kind) {
    case "start_phrase":
      return { ...state, phrase: { presented: msg.text, startedAtMs: null } };
    case "touch_down":
      if (state.phrase && state.phrase.startedAtMs === null) {
        return {
          ...state,
          phrase: { ...state.phrase, startedAtMs: nowMs },
        };
      }
      return state;
    default:
      return state;
  }
}

/** What the text pane shows: committed text plus the word in progress. */
export function displayText(state: UiState): string {
  return state.committedText + state.currentWord;
}

/** The suggestion bar renders at most two chips. */
export function visibleSuggestions(state: UiState): string[] {
  return state.suggestions.slice(0, 2);
}
