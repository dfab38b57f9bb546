import math

import pytest

from bitextkit.exc import ConfigurationError, TranslatorNotFound
from bitextkit.translators import (
    DecodeMode,
    DecodeSpec,
    DictTranslator,
    IdentityTranslator,
    dict_translate,
    get_translator_for_name,
    load_lexicon,
)

LEXICON = {
    "a": [("x", 0.9), ("y", 0.1)],
    "b": [("u", 0.6), ("v", 0.4)],
    "c": [("p", 0.5), ("q", 0.5)],
}


@pytest.fixture
def translator():
    return DictTranslator(LEXICON)


def test_best_hypotheses():
    nbest = DictTranslator({"a": [("x", 0.9), ("y", 0.1)]}).translate("a", n=2)
    assert [(h.text, round(h.logprob, 4)) for h in nbest] == [
        ("x", -0.1054), ("y", -2.3026),
    ]
    assert [h.rank for h in nbest] == [1, 2]


def test_beam_ties_keep_lexicon_order(translator):
    assert translator.translate("a a", DecodeSpec.beam(4), n=2).texts() == [
        "x x", "x y",
    ]
    assert translator.translate("c", n=2).texts() == ["p", "q"]


def test_full_beam_is_exhaustive(translator):
    nbest = translator.translate("a b c", DecodeSpec.beam(8), n=8)
    assert len(nbest) == 8
    assert len(set(nbest.texts())) == 8
    lps = [h.logprob for h in nbest]
    assert lps == sorted(lps, reverse=True)
    assert math.isclose(lps[0], math.log(0.9 * 0.6 * 0.5))
    assert math.isclose(lps[-1], math.log(0.1 * 0.4 * 0.5))


def test_n_caps_the_list(translator):
    assert len(translator.translate("a b", DecodeSpec.beam(4), n=1)) == 1
    assert len(translator.translate("a b", DecodeSpec.beam(2), n=10)) == 2


def test_unknown_tokens_are_copied(translator):
    nbest = translator.translate("a zzz")
    assert nbest.best.text == "x zzz"
    assert math.isclose(nbest.best.logprob, math.log(0.9))


def test_sampling_is_seeded(translator):
    spec = DecodeSpec.sampling(5, seed=13)
    first = translator.translate("a b c a b", spec, n=5)
    assert DictTranslator(LEXICON).translate("a b c a b", spec, n=5) == first


def test_samples_are_unique_and_scored(translator):
    nbest = translator.translate("a b c", DecodeSpec.sampling(50, seed=1), n=50)
    assert len(set(nbest.texts())) == len(nbest) <= 8
    probs = dict(LEXICON["a"] + LEXICON["b"] + LEXICON["c"])
    for hyp in nbest:
        expected = sum(math.log(probs[t]) for t in hyp.text.split())
        assert math.isclose(hyp.logprob, expected)


def test_low_temperature_picks_the_mode(translator):
    spec = DecodeSpec.sampling(20, temperature=0.01, seed=3)
    assert translator.translate("a b", spec, n=20).texts() == ["x u"]


def test_identity_translator():
    nbest = IdentityTranslator().translate("hello  world")
    assert nbest.texts() == ["hello world"]
    assert nbest.best.logprob == 0.0


def test_dict_translate():
    assert dict_translate(LEXICON, "b").best.text == "u"


def test_load_lexicon(tmp_path):
    path = tmp_path / "lex.tsv"
    path.write_text(
        "# comment\na\ty\t0.1\na\tx\t0.9\n\nb\tu\t1\n", encoding="utf-8"
    )
    lexicon = load_lexicon(path)
    assert lexicon == {"a": (("x", 0.9), ("y", 0.1)), "b": (("u", 1.0),)}
    assert DictTranslator(str(path)).one_best("a b") == "x u"


@pytest.mark.parametrize("content", [
    "a\tx\n",
    "a\tx\tnope\n",
    "a\tx\t0.5\n",
    "a\tx\t0\na\ty\t1\n",
    "a\tx y\t1\n",
])
def test_load_lexicon_invalid(tmp_path, content):
    path = tmp_path / "lex.tsv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_lexicon(path)


@pytest.mark.parametrize("kwargs", [
    {"width": 0},
    {"temperature": 0},
    {"mode": "greedy"},
])
def test_decode_spec_invalid(kwargs):
    with pytest.raises(ConfigurationError):
        DecodeSpec(**kwargs)


def test_decode_spec_defaults():
    spec = DecodeSpec()
    assert spec.mode is DecodeMode.BEAM
    assert spec.as_dict() == {
        "mode": "beam", "width": 4, "temperature": 1.0, "seed": 0,
    }
    assert DecodeSpec("SAMPLING", 2) == DecodeSpec.sampling(2)


def test_translate_invalid_n(translator):
    with pytest.raises(ConfigurationError):
        translator.translate("a", n=0)


def test_get_translator_for_name():
    assert get_translator_for_name("LEXICON") is DictTranslator
    assert get_translator_for_name("identity") is IdentityTranslator
    with pytest.raises(TranslatorNotFound):
        get_translator_for_name("nmt")
