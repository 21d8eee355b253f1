"""Regenerates the golden WebSocket transcript fixture.

The fixture records every client message a UI sends while typing the word
"dog" inside one phrase, paired with the exact server messages the service
answers with. The Python service tests replay the client side and diff
against the recorded server side; the frontend unit tests replay the server
side through their reducer and check the rendered result. Regenerate after
changing the decoder, the synthesizer, or the wire format:

    python tools/make_golden.py
"""

from __future__ import annotations

import json
from pathlib import Path

from dusk.calibration import synth_profile
from dusk.core import PadSpec
from dusk.layout import default_layout
from dusk.lexicon import builtin_lexicon
from dusk.service import ClientState, ServiceConfig
from dusk.simulate import StrokeSynthesizer

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "golden_transcript.json"


def touch_messages(gesture, pad: PadSpec, pointer: int) -> list[dict]:
    msgs = []
    for i, s in enumerate(gesture.samples):
        kind = ("touch_down" if i == 0
                else "touch_up" if i == len(gesture.samples) - 1
                else "touch_move")
        msgs.append({"kind": kind, "pointer": pointer,
                     "x": s.x / pad.width, "y": s.y / pad.height, "t": s.t})
    return msgs


def main() -> None:
    layout = default_layout()
    pad = PadSpec()
    profile = synth_profile(layout, pad)
    synth = StrokeSynthesizer(profile, layout)
    state = ClientState(ServiceConfig(profile=profile, layout=layout,
                                      lexicon=builtin_lexicon()))

    client: list[dict] = [{"kind": "start_phrase", "text": "dog"}]
    t = 0.0
    for pointer, ch in enumerate("dog ", start=1):
        g = synth.gesture_for_char(ch, t)
        client.extend(touch_messages(g, pad, pointer))
        t = g.up_t + 150.0
    client.append({"kind": "end_phrase"})

    steps = [{"client": None, "server": [state.hello_message()]}]
    for msg in client:
        steps.append({"client": msg, "server": state.handle(msg)})

    metrics = steps[-1]["server"][0]
    assert metrics["kind"] == "metrics", metrics
    assert metrics["transcribed"] == "dog", metrics

    fixture = {
        "comment": "typing the word dog inside one phrase; regenerate with tools/make_golden.py",
        "pad": {"width": pad.width, "height": pad.height},
        "steps": steps,
        "wpm_display": f"{metrics['wpm']:.2f}",
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixture, indent=1) + "\n")
    n_server = sum(len(s["server"]) for s in steps)
    print(f"{OUT.name}: {len(client)} client messages, {n_server} server messages, "
          f"wpm {fixture['wpm_display']}")


if __name__ == "__main__":
    main()
