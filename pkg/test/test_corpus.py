import json

import pytest

from bitextkit.corpus import (
    RecordFormat,
    compute_stats,
    count_lines,
    format_record,
    guess_format,
    read_mono,
    read_records,
    write_mono,
    write_records,
)
from bitextkit.exc import ConfigurationError, RecordFormatError
from bitextkit.sentence import Provenance, SentencePair


def test_guess_format():
    assert guess_format("a/b.tsv") is RecordFormat.TSV
    assert guess_format("a/b.TSV") is RecordFormat.TSV
    assert guess_format("a/b.jsonl") is RecordFormat.JSONL
    assert guess_format("a/b") is RecordFormat.JSONL


def test_record_format_parse_unknown():
    with pytest.raises(ConfigurationError):
        RecordFormat.parse("csv")


def test_jsonl_write_read(tmp_path):
    pairs = [
        SentencePair("hello", "你好", src_lang="en", tgt_lang="zh"),
        SentencePair("a b", "c", Provenance.FT, {"qe": 0.25}),
    ]
    path = tmp_path / "out" / "pairs.jsonl"
    assert write_records(pairs, path) == 2
    assert list(read_records(path)) == pairs


def test_jsonl_line_layout():
    pair = SentencePair("hello", "你好", src_lang="en", tgt_lang="zh")
    assert json.loads(format_record(pair)) == {
        "src": "hello",
        "tgt": "你好",
        "lang_src": "en",
        "lang_tgt": "zh",
        "provenance": "AUTHENTIC",
        "scores": {},
    }
    assert "你好" in format_record(pair)


def test_tsv_write_read(tmp_path):
    pairs = [SentencePair("a", "b"), SentencePair("c", "d", Provenance.BT_BEAM)]
    path = tmp_path / "pairs.tsv"
    write_records(pairs, path, "tsv")
    with open(path, encoding="utf-8") as f:
        assert f.read() == "a\tb\nc\td\tBT_BEAM\n"
    read = list(read_records(path, "tsv", lang_src="en", lang_tgt="de"))
    assert [p.provenance for p in read] == [Provenance.AUTHENTIC, Provenance.BT_BEAM]
    assert read[0].src.lang == "en" and read[0].tgt.lang == "de"


def test_tsv_rejects_tabs():
    with pytest.raises(RecordFormatError):
        format_record(SentencePair("a\tb", "c"), "tsv")


def test_malformed_lines_are_skipped(write_jsonl, tmp_path):
    rows = [{"src": "s%d" % i, "tgt": "t%d" % i} for i in range(10)]
    path = write_jsonl("pairs.jsonl", rows)
    with open(path, "a", encoding="utf-8") as f:
        f.write("{not json\n")
    reader = read_records(path)
    pairs = list(reader)
    assert len(pairs) == 10
    assert reader.skipped == 1
    assert reader.malformed_lines == [11]


def test_too_many_malformed_lines(tmp_path):
    path = tmp_path / "pairs.jsonl"
    with open(path, "w", encoding="utf-8") as f:
        f.write('{"src": "a", "tgt": "b"}\n')
        f.write("garbage\n")
        f.write('{"src": "a"}\n')
    with pytest.raises(RecordFormatError) as excinfo:
        list(read_records(path))
    assert list(excinfo.value.line_numbers) == [2, 3]


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        list(read_records(tmp_path / "missing.jsonl"))


def test_mono_write_read(tmp_path):
    path = tmp_path / "mono.txt"
    assert write_mono(["a b", "", "c"], path) == 3
    assert [s.text for s in read_mono(path, "en")] == ["a b", "c"]
    assert count_lines(path) == 2


def test_mono_rejects_newlines(tmp_path):
    with pytest.raises(RecordFormatError):
        write_mono(["a\nb"], tmp_path / "mono.txt")


def test_compute_stats():
    pairs = [
        SentencePair("a b c d", "x y"),
        SentencePair("a", "x y", Provenance.FT),
        SentencePair("a", "x y z"),
    ]
    stats = compute_stats(pairs)
    assert stats.as_dict() == {
        "pair_count": 3,
        "src_tokens": 6,
        "tgt_tokens": 7,
        "provenance": {"AUTHENTIC": 2, "FT": 1},
        "ratio_histogram": {"0": 1, "0.5": 1, "2": 1},
    }


def test_compute_stats_empty_target():
    stats = compute_stats([SentencePair("a", "")])
    assert stats.as_dict()["ratio_histogram"] == {"inf": 1}
