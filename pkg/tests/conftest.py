from __future__ import annotations

import pytest

from dusk.calibration import synth_profile
from dusk.core import PadSpec
from dusk.layout import default_layout
from dusk.lexicon import Lexicon
from dusk.simulate import StrokeSynthesizer


@pytest.fixture(scope="session")
def pad() -> PadSpec:
    return PadSpec()


@pytest.fixture(scope="session")
def layout():
    return default_layout()


@pytest.fixture(scope="session")
def profile(layout, pad):
    return synth_profile(layout, pad)


@pytest.fixture()
def synth(profile, layout) -> StrokeSynthesizer:
    return StrokeSynthesizer(profile, layout)


def make_lexicon(counts: dict[str, int]) -> Lexicon:
    return Lexicon(counts=dict(counts))


@pytest.fixture()
def tiny_lexicon() -> Lexicon:
    return make_lexicon({"the": 6000, "they": 400, "thy": 4, "of": 3000, "dog": 120})
