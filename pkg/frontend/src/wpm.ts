/** WPM display helpers. One word = five characters; a transcription of
 * length n counts n - 1 keystrokes of progress, mirroring the server's
 * per-phrase figure so the live readout converges to the reported one. */

export function liveWpm(transcribedLength: number, elapsedSeconds: number): number {
  if (elapsedSeconds <= 0 || transcribedLength < 2) return 0;
  return ((transcribedLength - 1) / 5) / (elapsedSeconds / 60);
}

export function formatWpm(wpm: number): string {
  return wpm.toFixed(2);
}

export function formatPercent(rate: number): string {
  return (rate * 100).toFixed(1) + "%";
}
