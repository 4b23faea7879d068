import json
import logging
import sys
import textwrap

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tablegrid.errors import FormatError, InvalidInputError, OcrEngineError
from tablegrid.ocr import (
    CMD_ENV_VAR,
    OcrConfig,
    WordBox,
    load_fixture,
    parse_tsv,
    recognize,
    recognize_region,
    save_fixture,
    serialize_tsv,
    words_from_fixture,
)
from tablegrid.raster import BoxRect

HEADER = "level\tpage_num\tblock_num\tpar_num\tline_num\tword_num\tleft\ttop\twidth\theight\tconf\ttext"
BLANK = np.full((100, 300), 255, dtype=np.uint8)


def tsv(*rows):
    return "\n".join([HEADER, *("\t".join(r.split(" ", 11)) for r in rows)]) + "\n"


def write_fixture(path, items):
    path.write_text(json.dumps(items))
    return OcrConfig(engine="fixture", fixture_path=path)


def item(left, top, width, height, text, conf=95):
    return {"left": left, "top": top, "width": width, "height": height, "text": text, "conf": conf,
            "block": 1, "para": 1, "line": 1, "word": 1}


def test_parse_tsv_word_row():
    (w,) = parse_tsv(tsv("5 1 1 1 2 1 100 50 40 12 91.5 Total"))
    assert w == WordBox(BoxRect(100, 50, 40, 12), "Total", 91.5, 1, 1, 2, 1)


def test_parse_tsv_ignores_other_levels_and_non_text():
    text = tsv(
        "4 1 1 1 2 0 100 50 200 12 -1 ",
        "5 1 1 1 2 1 100 50 40 12 -1 ghost",
        "5 1 1 1 2 2 150 50 40 12 88 Net",
    )
    assert [w.text for w in parse_tsv(text)] == ["Net"]


def test_parse_tsv_wrong_column_count_names_line():
    bad = HEADER + "\n5\t1\t1\t1\t1\t1\t0\t0\t5\t5\t90\tok\n5\t1\t1\t1\n"
    with pytest.raises(FormatError, match="line 3"):
        parse_tsv(bad)


def test_parse_tsv_confidence_filter_is_monotone():
    text = tsv(*(f"5 1 1 1 1 {i} {i * 10} 0 8 8 {c} w{i}" for i, c in enumerate([10, 30, 55, 80, 99])))
    counts = [len(parse_tsv(text, m)) for m in (0, 30, 50, 90, 100)]
    assert counts == sorted(counts, reverse=True) == [5, 4, 3, 1, 0]


word_boxes = st.builds(
    WordBox,
    st.builds(BoxRect, st.integers(0, 500), st.integers(0, 500), st.integers(1, 80), st.integers(1, 40)),
    st.text(alphabet=st.characters(blacklist_categories=("Cc", "Cs", "Zs", "Zl", "Zp"),
                                   blacklist_characters="\t\n\r\x85"), min_size=1, max_size=8),
    st.floats(30, 100).map(lambda c: round(c, 2)),
    st.integers(1, 9), st.integers(1, 9), st.integers(1, 9), st.integers(1, 9),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(word_boxes, max_size=10))
def test_tsv_round_trip(words):
    assert parse_tsv(serialize_tsv(words), 0) == words


@settings(max_examples=50, deadline=None)
@given(st.lists(word_boxes, max_size=10))
def test_fixture_round_trip(tmp_path_factory, words):
    path = tmp_path_factory.mktemp("fx") / "w.json"
    save_fixture(words, path)
    assert load_fixture(path) == words


def test_recognize_fixture_filters_confidence(tmp_path):
    cfg = write_fixture(tmp_path / "f.json", [
        item(10, 10, 30, 10, "a", 90), item(50, 10, 30, 10, "b", 95), item(90, 10, 30, 10, "c", 10),
    ])
    assert [w.text for w in recognize(BLANK, cfg)] == ["a", "b"]


def test_recognize_fixture_drops_blank_text(tmp_path):
    cfg = write_fixture(tmp_path / "f.json", [item(10, 10, 30, 10, "  "), item(50, 10, 30, 10, " x ")])
    assert [w.text for w in recognize(BLANK, cfg)] == ["x"]


def test_recognize_clamps_out_of_bounds(tmp_path, caplog):
    cfg = write_fixture(tmp_path / "f.json", [item(280, 90, 40, 20, "edge")])
    with caplog.at_level(logging.WARNING):
        (w,) = recognize(BLANK, cfg)
    assert w.box == BoxRect(280, 90, 20, 10)
    assert "clamped" in caplog.text


def test_malformed_fixture(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('[{"left": 1}]')
    with pytest.raises(FormatError):
        recognize(BLANK, OcrConfig(engine="fixture", fixture_path=path))
    with pytest.raises(FormatError):
        words_from_fixture({"not": "a list"})


def test_recognize_region_fixture(tmp_path):
    cfg = write_fixture(tmp_path / "f.json", [
        item(10, 10, 40, 12, "Total"), item(100, 40, 25, 12, "Net"), item(130, 40, 40, 12, "Sales"),
    ])
    assert recognize_region(BLANK, BoxRect(8, 8, 50, 16), cfg) == "Total"
    assert recognize_region(BLANK, BoxRect(95, 35, 80, 20), cfg) == "Net Sales"
    assert recognize_region(BLANK, BoxRect(200, 70, 50, 20), cfg) == ""


def test_recognize_region_out_of_bounds(tmp_path):
    cfg = write_fixture(tmp_path / "f.json", [])
    with pytest.raises(InvalidInputError):
        recognize_region(BLANK, BoxRect(290, 0, 20, 10), cfg)


def test_config_validation():
    with pytest.raises(InvalidInputError):
        OcrConfig(min_confidence=120, engine="fixture", fixture_path="x")
    with pytest.raises(InvalidInputError):
        OcrConfig(engine="cloud")
    with pytest.raises(InvalidInputError):
        OcrConfig(engine="fixture")


# -- external process adapter, exercised with a stand-in engine script

FAKE_ENGINE = textwrap.dedent('''
    import sys
    from PIL import Image
    im = Image.open(sys.argv[1])
    print("level\\tpage_num\\tblock_num\\tpar_num\\tline_num\\tword_num\\tleft\\ttop\\twidth\\theight\\tconf\\ttext")
    print(f"1\\t1\\t0\\t0\\t0\\t0\\t0\\t0\\t{im.width}\\t{im.height}\\t-1\\t")
    if im.getextrema()[0] < 128:
        print("5\\t1\\t1\\t1\\t1\\t1\\t2\\t2\\t10\\t8\\t93.2\\tink")
        print("5\\t1\\t1\\t1\\t1\\t2\\t14\\t2\\t10\\t8\\t12.0\\tunsure")
''')


@pytest.fixture
def fake_engine(tmp_path):
    script = tmp_path / "fake_engine.py"
    script.write_text(FAKE_ENGINE)
    return f"{sys.executable} {script} {{input}}"


def test_external_engine_blank_image(fake_engine):
    cfg = OcrConfig(engine="external-process", command_template=fake_engine)
    assert recognize(BLANK, cfg) == []


def test_external_engine_reads_words(fake_engine):
    img = BLANK.copy()
    img[2:10, 2:12] = 0
    cfg = OcrConfig(engine="external-process", command_template=fake_engine)
    (w,) = recognize(img, cfg)
    assert (w.text, w.confidence, w.box) == ("ink", 93.2, BoxRect(2, 2, 10, 8))
    assert recognize_region(img, BoxRect(0, 0, 20, 20), cfg) == "ink"


def test_external_engine_failure(tmp_path):
    cfg = OcrConfig(engine="external-process",
                    command_template=f"{sys.executable} -c \"import sys; sys.stderr.write('boom'); sys.exit(3)\"")
    with pytest.raises(OcrEngineError, match="boom") as info:
        recognize(BLANK, cfg)
    assert info.value.returncode == 3


def test_env_var_overrides_template(monkeypatch, fake_engine):
    monkeypatch.setenv(CMD_ENV_VAR, fake_engine)
    cfg = OcrConfig(engine="external-process", command_template="definitely-not-installed {input}")
    assert recognize(BLANK, cfg) == []


def test_missing_engine_binary():
    cfg = OcrConfig(engine="external-process", command_template="definitely-not-installed-ocr {input}")
    with pytest.raises(OcrEngineError):
        recognize(BLANK, cfg)
