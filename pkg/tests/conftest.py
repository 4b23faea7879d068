import numpy as np
import pytest

from tablegrid.ocr import OcrConfig, save_fixture
from tablegrid.synthgen import render


def grid_from_strings(*rows):
    """Binary image from strings: '#' is ink, anything else background."""
    return np.array([[ch == "#" for ch in r] for r in rows], dtype=bool)


@pytest.fixture
def rendered(tmp_path):
    """Render a spec and return (image, truth, fixture OCR config)."""
    def _render(spec):
        img, truth = render(spec)
        path = tmp_path / f"words-{spec.seed}-{spec.style}.json"
        save_fixture(truth.word_fixture, path)
        return img, truth, OcrConfig(engine="fixture", fixture_path=path)
    return _render
