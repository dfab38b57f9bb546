import pytest

from bitextkit.exc import ConfigurationError
from bitextkit.preprocess import (
    NormalizePunct,
    NormalizeWidth,
    StripInvisible,
    T2SConvert,
    load_t2s_mapping,
    normalize_punct,
    normalize_width,
    strip_invisible,
    t2s_convert,
)
from bitextkit.sentence import Provenance, SentencePair


@pytest.mark.parametrize("text, expected", [
    ("a\u200bb", "ab"),
    ("a\u0007b", "ab"),
    ("a\tb", "a\tb"),
    ("a\ufeffb", "ab"),
    ("&lt;tag&gt; &quot;x&quot; &apos;y&apos;", "<tag> \"x\" 'y'"),
    ("&#65;&#x42;", "AB"),
    ("&amp;amp;", "&amp;"),
    ("&#x200b;x", "x"),
    ("plain", "plain"),
])
def test_strip_invisible(text, expected):
    assert strip_invisible(text) == expected


def test_strip_invisible_keeps_unknown_entities():
    assert strip_invisible("&nbsp; &#99999999999;") == "&nbsp; &#99999999999;"


@pytest.mark.parametrize("text, expected", [
    ("（ｘ）中文", "(x)中文"),
    ("ＡＢＣ１２３", "ABC123"),
    ("a\u3000b", "a b"),
    ("ascii", "ascii"),
])
def test_normalize_width(text, expected):
    assert normalize_width(text) == expected


@pytest.mark.parametrize("text, expected", [
    ("“a” — b  c", '"a" - b c'),
    ("«x»", '"x"'),
    ("it’s", "it's"),
    ("wait…", "wait..."),
    ("1–2", "1-2"),
    ("a   b", "a b"),
])
def test_normalize_punct(text, expected):
    assert normalize_punct(text) == expected


@pytest.mark.parametrize("func, text", [
    (normalize_width, "（ｘ）\u3000ＡＢ"),
    (normalize_punct, "“a” —  b…"),
])
def test_normalizers_are_idempotent(func, text):
    once = func(text)
    assert func(once) == once


def test_default_t2s_mapping():
    mapping = load_t2s_mapping()
    assert mapping["國"] == "国"
    assert mapping["們"] == "们"
    assert t2s_convert("這個國家", mapping) == "这个国家"


def test_t2s_convert_ascii_untouched():
    assert t2s_convert("abc", {"a": "b"}) == "abc"


def test_load_t2s_mapping_malformed(tmp_path):
    path = tmp_path / "t2s.tsv"
    path.write_text("國\t国\n國国\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_t2s_mapping(path)


def test_load_t2s_mapping_conflict(tmp_path):
    path = tmp_path / "t2s.tsv"
    path.write_text("# comment\n\n國\t国\n國\t囯\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_t2s_mapping(path)


def test_t2s_filter_converts_chinese_sides_only():
    pair = SentencePair("國", "國", src_lang="zh", tgt_lang="ja")
    out = list(T2SConvert(mapping={"國": "国"})([pair]))
    assert out[0].src.text == "国"
    assert out[0].tgt.text == "國"


def test_t2s_filter_all_languages():
    pair = SentencePair("國", "國")
    out = list(T2SConvert(mapping={"國": "国"}, langs=None)([pair]))
    assert (out[0].src.text, out[0].tgt.text) == ("国", "国")


def test_normalizer_keeps_provenance_scores_and_languages():
    pair = SentencePair(
        "ＡＢ", "x", Provenance.FT, {"qe": 0.5}, src_lang="en", tgt_lang="de"
    )
    out = list(NormalizeWidth()([pair]))[0]
    assert out.src.text == "AB"
    assert out.provenance is Provenance.FT
    assert dict(out.scores) == {"qe": 0.5}
    assert (out.src.lang, out.tgt.lang) == ("en", "de")


def test_normalizer_returns_unchanged_pair():
    pair = SentencePair("a", "b")
    assert list(StripInvisible()([pair]))[0] is pair
    assert list(NormalizePunct()([pair]))[0] is pair


@pytest.mark.parametrize("normalizer, src", [
    (NormalizeWidth(), "＜BT＞ hello"),
    (NormalizeWidth(), "<ＢＴ> hello"),
    (NormalizePunct(), "<BT>\u00a0hello"),
    (NormalizePunct(), "<BT>\u202fhello"),
    (StripInvisible(), "&lt;BT&gt; hello"),
    (StripInvisible(), "<B\u200bT> hello"),
])
def test_authentic_source_normalized_into_tag_is_dropped(normalizer, src):
    pairs = [SentencePair(src, "x"), SentencePair("hello", "x")]
    out = list(normalizer(pairs))
    assert [(p.src.text, p.provenance) for p in out] == [
        ("hello", Provenance.AUTHENTIC)
    ]


@pytest.mark.parametrize("normalizer, src, expected", [
    (NormalizeWidth(), "hello ＜BT＞", "hello <BT>"),
    (NormalizePunct(), "hello\u00a0<BT>", "hello <BT>"),
    (StripInvisible(), "hello &lt;BT&gt;", "hello <BT>"),
])
def test_tag_inside_authentic_source_is_kept(normalizer, src, expected):
    out = list(normalizer([SentencePair(src, "x")]))
    assert [p.src.text for p in out] == [expected]


def test_tagged_back_translation_is_normalized():
    pair = SentencePair("＜BT＞ hello", "x", Provenance.BT_TAGGED)
    out = list(NormalizeWidth()([pair]))
    assert out[0].src.text == "<BT> hello"
    assert out[0].provenance is Provenance.BT_TAGGED
