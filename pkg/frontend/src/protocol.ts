/** Message types for the typing service's JSON protocol, with runtime
 * guards for everything the server can send. The browser trusts nothing:
 * a frame that fails its guard is dropped by the caller, never rendered. */

export type Thumb = "left" | "right";

export interface PadSize {
  width: number;
  height: number;
}

export interface LayoutInfo {
  rows: string[];
  offsets: number[];
  start_left: string;
  start_right: string;
  /** "row,col" cell id -> function key name, row 0 at the top. */
  tap_map: Record<string, string>;
  thumb_map: Record<string, Thumb>;
}

export interface HelloMessage {
  kind: "hello";
  version: number;
  pad: PadSize;
  layout: LayoutInfo;
  predictions_enabled: boolean;
}

export interface CharEvent {
  kind: "char";
  t: number;
  char: string;
  thumb: Thumb;
}

export interface PlainEvent {
  kind: "space" | "backspace" | "enter";
  t: number;
}

export interface SuggestAcceptedEvent {
  kind: "suggest_accepted";
  t: number;
  word: string;
  slot: number;
  replaced: string;
}

export interface AutocorrectEvent {
  kind: "autocorrect_applied" | "autocorrect_reverted";
  t: number;
  original: string;
  replacement: string;
}

export type DecoderEvent =
  | CharEvent
  | PlainEvent
  | SuggestAcceptedEvent
  | AutocorrectEvent;

export interface StateMessage {
  kind: "state";
  committed_text: string;
  current_word: string;
  suggestions: string[];
  events: DecoderEvent[];
}

export interface CursorMessage {
  kind: "cursor";
  thumb: Thumb;
  /** Key units on the layout grid, not pad millimetres. */
  x: number;
  y: number;
  t: number;
}

export interface MetricsMessage {
  kind: "metrics";
  presented: string;
  transcribed: string;
  seconds: number;
  wpm: number;
  uncorrected_error_rate: number;
  corrected_error_rate: number;
  gestures: number;
}

export interface ErrorMessage {
  kind: "error";
  message: string;
}

export type ServerMessage =
  | HelloMessage
  | StateMessage
  | CursorMessage
  | MetricsMessage
  | ErrorMessage;

export interface TouchMessage {
  kind: "touch_down" | "touch_move" | "touch_up";
  pointer: number;
  x: number;
  y: number;
  t: number;
}

export interface StartPhraseMessage {
  kind: "start_phrase";
  text: string;
}

export interface EndPhraseMessage {
  kind: "end_phrase";
}

export interface SetOptionsMessage {
  kind: "set_options";
  predictions_enabled: boolean;
}

export type ClientMessage =
  | TouchMessage
  | StartPhraseMessage
  | EndPhraseMessage
  | SetOptionsMessage;

// booleans are valid JSON numbers to a careless check; the wire format
// never uses them where a number belongs
function isNum(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isStr(v: unknown): v is string {
  return typeof v === "string";
}

function isStrArray(v: unknown): v is string[] {
  return Array.isArray(v) && v.every(isStr);
}

function isThumb(v: unknown): v is Thumb {
  return v === "left" || v === "right";
}

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function isPad(v: unknown): v is PadSize {
  return isRecord(v) && isNum(v.width) && isNum(v.height) &&
    v.width > 0 && v.height > 0;
}

function isStrMap(v: unknown, value: (x: unknown) => boolean): boolean {
  return isRecord(v) && Object.values(v).every(value);
}

function isLayout(v: unknown): v is LayoutInfo {
  return isRecord(v) &&
    isStrArray(v.rows) && v.rows.length > 0 &&
    Array.isArray(v.offsets) && v.offsets.every(isNum) &&
    v.offsets.length === v.rows.length &&
    isStr(v.start_left) && isStr(v.start_right) &&
    isStrMap(v.tap_map, isStr) &&
    isStrMap(v.thumb_map, isThumb);
}

function isEvent(v: unknown): v is DecoderEvent {
  if (!isRecord(v) || !isNum(v.t)) return false;
  switch (v.kind) {
    case "char":
      return isStr(v.char) && isThumb(v.thumb);
    case "space":
    case "backspace":
    case "enter":
      return true;
    case "suggest_accepted":
      return isStr(v.word) && isNum(v.slot) && isStr(v.replaced);
    case "autocorrect_applied":
    case "autocorrect_reverted":
      return isStr(v.original) && isStr(v.replacement);
    default:
      return false;
  }
}

export function isServerMessage(v: unknown): v is ServerMessage {
  if (!isRecord(v)) return false;
  switch (v.kind) {
    case "hello":
      return isNum(v.version) && isPad(v.pad) && isLayout(v.layout) &&
        typeof v.predictions_enabled === "boolean";
    case "state":
      return isStr(v.committed_text) && isStr(v.current_word) &&
        isStrArray(v.suggestions) &&
        Array.isArray(v.events) && v.events.every(isEvent);
    case "cursor":
      return isThumb(v.thumb) && isNum(v.x) && isNum(v.y) && isNum(v.t);
    case "metrics":
      return isStr(v.presented) && isStr(v.transcribed) &&
        isNum(v.seconds) && isNum(v.wpm) &&
        isNum(v.uncorrected_error_rate) && isNum(v.corrected_error_rate) &&
        isNum(v.gestures);
    case "error":
      return isStr(v.message);
    default:
      return false;
  }
}

/** Parse one wire frame; null for anything that is not a valid message. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let value: unknown;
  try {
    value = JSON.parse(raw);
  } catch {
    return null;
  }
  return isServerMessage(value) ? value : null;
}

export function touchMessage(
  kind: TouchMessage["kind"],
  pointer: number,
  x: number,
  y: number,
  t: number,
): TouchMessage {
  return { kind, pointer, x, y, t };
}
