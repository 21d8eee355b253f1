"""Dual-handed stroke keyboard: gesture decoding, autocorrect, metrics, service."""

from .core import (
    Gesture,
    NormalizedEndpoint,
    PadSpec,
    Thumb,
    TouchSample,
    normalized_endpoint,
    path_length,
)
from .layout import Layout, default_layout
from .recognizer import (
    ContactClass,
    StrokeTemplate,
    angle_sequence,
    classify_contact,
    default_templates,
    dtw_deviation,
    infer_thumb,
    recognize_stroke,
    recognize_tap,
)
from .calibration import (
    CalibrationProfile,
    GestureLogRecord,
    KeyEndpointModel,
    TimingTable,
    TransferFn,
    fit_profile,
    load_profile,
    save_profile,
    synth_profile,
)
from .lexicon import Lexicon, builtin_lexicon, load_lexicon
from .decoder import EventKind, KeyEvent, Session
from .metrics import StreamCounts, classify_stream, error_rates, wpm
from .expert import CorpusStats, corpus_prediction, word_time
from .replay import replay_log
from .sessionlog import PhraseMarker, read_session_log, write_session_log
from .simulate import StrokeSynthesizer

__version__ = "0.1.0"
