import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bitextkit.exc import ConfigurationError, DecodeError, RecordFormatError
from bitextkit.sentence import Sentence
from bitextkit.subword import (
    END_OF_WORD,
    BpeModel,
    bpe_apply,
    bpe_apply_text,
    bpe_decode,
    bpe_decode_text,
    bpe_learn,
)
from test.conftest import file_bytes

TEXT = [
    "low lower lowest newer newest",
    "wider low new newer",
    "the lowest and the newest",
]


@pytest.fixture(scope="module")
def model():
    return bpe_learn([TEXT], 20)


def test_learn_and_apply():
    model = bpe_learn([["ab", "ab", "abc"]], 1)
    assert model.merges == [("a", "b")]
    assert bpe_apply(model, ["ab", "xyz"]) == ["ab</w>", "x", "y", "z</w>"]
    assert bpe_decode(["ab</w>", "x", "y", "z</w>"]) == ["ab", "xyz"]


def test_learn_accepts_sentences_and_strings():
    expected = bpe_learn([[["ab", "ab", "abc"]]], 1)
    assert bpe_learn([["ab ab abc"]], 1) == expected
    assert bpe_learn([[Sentence("ab ab abc")]], 1) == expected


def test_ties_go_to_smallest_pair():
    model = bpe_learn([["cd", "ab"]], 1, min_frequency=1)
    assert model.merges == [("a", "b")]


def test_min_frequency_stops_learning():
    assert len(bpe_learn([["ab"]], 10)) == 0
    assert len(bpe_learn([["ab"]], 10, min_frequency=1)) == 2


def test_counts_are_pooled_over_corpora():
    assert len(bpe_learn([["ab"]], 1)) == 0
    assert bpe_learn([["ab"], ["ab"]], 1).merges == [("a", "b")]


def test_learning_is_order_independent(model):
    assert bpe_learn([list(reversed(TEXT))], 20) == model
    assert bpe_learn([TEXT], 20).digest() == model.digest()


def test_merges_apply_in_rank_order():
    model = BpeModel([("b", "c"), ("a", "b")])
    assert model.segment("abc") == ("a", "bc</w>")


def test_protected_tokens_are_kept(model):
    pieces = bpe_apply(model, ["<BT>", "lowest"])
    assert pieces[0] == "<BT>"
    assert bpe_decode(pieces) == ["<BT>", "lowest"]
    assert bpe_apply(model, ["@@"], protected={"@@"}) == ["@@"]


def test_protected_tokens_are_not_learned():
    model = bpe_learn([["<BT> ab <BT> ab"]], 5)
    assert model.merges == [("a", "b"), ("ab", END_OF_WORD)]


@given(st.lists(st.text(alphabet="lowernst", min_size=1, max_size=12), max_size=10))
def test_decode_inverts_apply(model, words):
    assert bpe_decode(bpe_apply(model, words)) == words


def test_pieces_carry_end_of_word(model):
    for word in ["lowest", "x", "newer"]:
        pieces = model.segment(word)
        assert pieces[-1].endswith(END_OF_WORD)
        assert all(not p.endswith(END_OF_WORD) for p in pieces[:-1])
        assert "".join(pieces) == word + END_OF_WORD


@pytest.mark.parametrize("pieces", [
    ["lo"],
    [END_OF_WORD],
    [""],
    ["lo", "<BT>", "w</w>"],
])
def test_decode_invalid(pieces):
    with pytest.raises(DecodeError):
        bpe_decode(pieces)


def test_apply_and_decode_text(model):
    text = bpe_apply_text(model, "the newest low")
    assert bpe_decode_text(text) == "the newest low"
    assert bpe_decode_text(bpe_apply_text(model, "低的 lower", "zh"), "zh") == "低的 lower"


@pytest.mark.parametrize("num_merges, corpora", [
    (-1, [["ab"]]),
    (1, [[]]),
    (1, [["<BT>"]]),
])
def test_learn_invalid(num_merges, corpora):
    with pytest.raises(ConfigurationError):
        bpe_learn(corpora, num_merges)


@pytest.mark.parametrize("merges", [
    [("a",)],
    [("a", "")],
    [("a", "b"), ("a", "b")],
])
def test_invalid_model(merges):
    with pytest.raises(ConfigurationError):
        BpeModel(merges)


def test_dumps():
    assert BpeModel([("a", "b"), ("ab", "c")]).dumps() == (
        "bpe-v1 2 6\na b\nab c\n</w>\na\nab\nabc\nb\nc\n"
    )


def test_save_and_load(model, tmp_path):
    path = tmp_path / "bpe.model"
    model.save(path)
    loaded = BpeModel.load(path)
    assert loaded == model
    assert loaded.merges == model.merges
    assert loaded.vocab == model.vocab


def test_character_model_keeps_its_vocabulary():
    model = bpe_learn([["abc abd"]], 0)
    assert model.merges == []
    assert model.vocab == {END_OF_WORD, "a", "b", "c", "d"}
    loaded = BpeModel.loads(model.dumps())
    assert loaded.vocab == model.vocab
    assert loaded == model


def test_loads_header_without_symbol_count():
    model = BpeModel.loads("bpe-v1 1\na b\n")
    assert model.merges == [("a", "b")]
    assert model.vocab == {END_OF_WORD, "a", "b", "ab"}


@pytest.mark.parametrize("text, line_numbers", [
    ("", ()),
    ("bpe 1\na b\n", (1,)),
    ("bpe-v1 1 x\na b\n", (1,)),
    ("bpe-v1 2\na b\n", ()),
    ("bpe-v1 1 2\na b\na\n", ()),
    ("bpe-v1 1\nab\n", (2,)),
    ("bpe-v1 1 2\na b\na\na b\n", (4,)),
    ("bpe-v1 1 2\na b\na\na\n", (4,)),
    ("bpe-v1 2\na b\na b\n", ()),
])
def test_loads_invalid(text, line_numbers):
    with pytest.raises(RecordFormatError) as excinfo:
        BpeModel.loads(text)
    assert excinfo.value.line_numbers == line_numbers


def test_round_trip_on_random_sentences():
    rng = np.random.default_rng(42)
    letters = list("abcdefghij")

    def word():
        return "".join(rng.choice(letters, int(rng.integers(1, 7))))

    sentences = [
        " ".join(word() for _ in range(int(rng.integers(1, 12))))
        for _ in range(1000)
    ]
    model = bpe_learn([sentences], 200)
    for sentence in sentences:
        assert bpe_decode_text(bpe_apply_text(model, sentence)) == sentence


def test_model_file_is_byte_exact(model, tmp_path):
    path = tmp_path / "bpe.model"
    model.save(path)
    assert file_bytes(path) == model.dumps().encode("utf-8")
    BpeModel.load(path).save(tmp_path / "copy.model")
    assert file_bytes(tmp_path / "copy.model") == file_bytes(path)
