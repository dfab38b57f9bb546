import json

import pytest
import yaml
from click.testing import CliRunner

from bitextkit import __version__, tokenization
from bitextkit.cli import cli
from bitextkit.corpus import compute_stats, read_records
from bitextkit.curriculum import CurriculumBins
from bitextkit.translators import NgramLM, lm_train
from test.conftest import read_jsonl

PAIRS = [
    {"src": "the house", "tgt": "das haus", "lang_src": "en", "lang_tgt": "de",
     "scores": {"qe": 0.9}},
    {"src": "the book", "tgt": "das buch", "lang_src": "en", "lang_tgt": "de",
     "scores": {"qe": 0.5}},
    {"src": "a house", "tgt": "ein haus", "lang_src": "en", "lang_tgt": "de",
     "scores": {"qe": 0.95}},
    {"src": "the house", "tgt": "das haus", "lang_src": "en", "lang_tgt": "de",
     "scores": {"qe": 0.9}},
]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def corpus(write_jsonl):
    return write_jsonl("train.jsonl", PAIRS)


@pytest.fixture
def lexicon(write_text):
    return write_text("lex.de-en.tsv", [
        "das\tthe\t1.0",
        "ein\ta\t1.0",
        "haus\thouse\t0.75",
        "haus\thome\t0.25",
        "buch\tbook\t1.0",
    ])


def invoke(runner, *args):
    return runner.invoke(cli, [str(a) for a in args], catch_exceptions=False)


def test_version(runner):
    result = invoke(runner, "--version")
    assert result.exit_code == 0
    assert __version__ in result.output


def test_unknown_command_is_a_usage_error(runner):
    assert invoke(runner, "frobnicate").exit_code == 2


def test_missing_option_is_a_usage_error(runner, corpus):
    assert invoke(runner, "preprocess", "split", corpus).exit_code == 2


def test_runtime_error_exits_with_1(runner, write_text, tmp_path):
    mono = write_text("mono.en", ["a", "b"])
    result = invoke(
        runner, "augment", "ft", mono, "--sample-size", 5,
        "--out", tmp_path / "ft.jsonl",
    )
    assert result.exit_code == 1
    assert "Can't sample" in result.output


def test_malformed_config_exits_with_1(runner, corpus, tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text("- a\n- b\n", encoding="utf-8")
    result = invoke(runner, "stats", corpus, "--config", config)
    assert result.exit_code == 1


def test_stats(runner, corpus):
    result = invoke(runner, "stats", corpus)
    assert result.exit_code == 0
    expected = compute_stats(read_records(str(corpus))).as_dict()
    assert json.loads(result.output) == json.loads(json.dumps(expected))
    assert json.loads(result.output)["pair_count"] == 4


def test_config_tokenizers_apply_to_one_command(runner, corpus, tmp_path):
    config = tmp_path / "config.yaml"
    with open(config, "w", encoding="utf-8") as f:
        yaml.safe_dump({"tokenizers": {"de": "char"}}, f)
    result = invoke(runner, "stats", corpus, "--config", config)
    assert result.exit_code == 0
    assert json.loads(result.output)["tgt_tokens"] == 28
    assert "de" not in tokenization.options.language_tokenizers
    result = invoke(runner, "stats", corpus)
    assert json.loads(result.output)["tgt_tokens"] == 8


def test_stats_text(runner, corpus):
    result = invoke(runner, "stats", corpus, "--format", "text")
    assert result.exit_code == 0
    assert "pair_count\t4" in result.output.splitlines()


def test_clean(runner, corpus, tmp_path):
    out = tmp_path / "clean.jsonl"
    report = tmp_path / "report.json"
    result = invoke(
        runner, "preprocess", "clean", corpus, "--out", out, "--report", report
    )
    assert result.exit_code == 0
    assert len(read_jsonl(out)) == 3
    with open(report, encoding="utf-8") as f:
        data = json.load(f)
    assert (data["input"], data["output"]) == (4, 3)


def test_clean_with_config(runner, corpus, tmp_path):
    config = tmp_path / "config.yaml"
    with open(config, "w", encoding="utf-8") as f:
        yaml.safe_dump({"filters": [{"name": "max_tokens", "max_tokens": 1}]}, f)
    out = tmp_path / "clean.tsv"
    result = invoke(
        runner, "preprocess", "clean", corpus, "--config", config, "--out", out
    )
    assert result.exit_code == 0
    assert out.read_text(encoding="utf-8") == ""


def test_split(runner, write_text):
    mono = write_text("long.en", ["a b . c d", "e"])
    result = invoke(runner, "preprocess", "split", mono, "--max-len", 3)
    assert result.exit_code == 0
    assert result.output.splitlines() == ["a b .", "c d", "e"]


def test_bt_tagged(runner, write_text, lexicon, tmp_path):
    words = ["das haus", "ein buch", "das buch", "ein haus", "das haus"] * 2
    mono = write_text("mono.de", words)
    out = tmp_path / "bt.jsonl"
    result = invoke(
        runner, "augment", "bt", mono, "--tagged", "--tag", "<BT>",
        "--lexicon", lexicon, "--src-lang", "en", "--tgt-lang", "de",
        "--out", out,
    )
    assert result.exit_code == 0
    rows = read_jsonl(out)
    assert len(rows) == 10
    assert [r["tgt"] for r in rows] == words
    assert rows[0]["src"] == "<BT> the house"
    assert all(r["src"].split()[0] == "<BT>" for r in rows)
    assert all(r["src"].split().count("<BT>") == 1 for r in rows)
    assert {r["provenance"] for r in rows} == {"BT_TAGGED"}
    assert {r["lang_src"] for r in rows} == {"en"}


def test_bt_sampling_is_seeded(runner, write_text, lexicon, tmp_path):
    mono = write_text("mono.de", ["das haus"] * 20)
    outputs = []
    for name, seed in [("a", 1), ("b", 1)]:
        out = tmp_path / ("%s.jsonl" % name)
        result = invoke(
            runner, "augment", "bt", mono, "--mode", "sampling",
            "--lexicon", lexicon, "--seed", seed, "--out", out,
        )
        assert result.exit_code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]


def test_bit(runner, corpus):
    result = invoke(runner, "augment", "bit", corpus)
    assert result.exit_code == 0
    rows = [json.loads(line) for line in result.output.splitlines()]
    assert len(rows) == 8
    assert [r["src"] for r in rows[:4]] == [p["src"] for p in PAIRS]
    assert (rows[4]["src"], rows[4]["tgt"]) == ("das haus", "the house")
    assert rows[4]["provenance"] == "BIT_REVERSED"


def test_dd_identity(runner, corpus):
    result = invoke(runner, "augment", "dd", corpus, "--dedup")
    assert result.exit_code == 0
    rows = [json.loads(line) for line in result.output.splitlines()]
    assert [r["provenance"] for r in rows] == ["AUTHENTIC", "DD_FWD", "DD_BWD"] * 3
    assert (rows[1]["src"], rows[1]["tgt"]) == ("the house", "the house")


def test_hypo_sft(runner, write_text, tmp_path, corpus):
    lex = write_text("lex.en-de.tsv", [
        "the\tdas\t0.5", "the\tdie\t0.5", "house\thaus\t1.0", "a\tein\t1.0",
        "book\tbuch\t1.0",
    ])
    out = tmp_path / "sft.jsonl"
    result = invoke(
        runner, "augment", "hypo", corpus, "--lexicon", lex, "--n", 2,
        "--sft", "--out", out,
    )
    assert result.exit_code == 0
    rows = read_jsonl(out)
    assert len(rows) == 3
    assert all(set(r) == {"prompt", "completion"} for r in rows)
    assert rows[0]["completion"] == "das haus"


def test_schedule(runner, write_jsonl, tmp_path):
    authentic = write_jsonl("auth.jsonl", PAIRS[:1])
    synthetic = write_jsonl("bt.jsonl", PAIRS[1:2])
    result = invoke(runner, "augment", "schedule", authentic, synthetic, "--rounds", 2)
    assert result.exit_code == 0
    phases = json.loads(result.output)["phases"]
    assert len(phases) == 4
    result = invoke(runner, "augment", "schedule", authentic, "--kind", "bit")
    assert result.exit_code == 2


def test_bpe_round_trip(runner, write_text, tmp_path):
    mono = write_text("mono.en", ["low lower lowest", "newer newest"])
    model = tmp_path / "bpe.model"
    result = invoke(
        runner, "bpe", "learn", mono, "--merges", 5, "--min-frequency", 1,
        "--out", model,
    )
    assert result.exit_code == 0
    assert model.read_text(encoding="utf-8").startswith("bpe-v1 ")
    segmented = tmp_path / "mono.bpe"
    result = invoke(runner, "bpe", "apply", mono, "--model", model, "--out", segmented)
    assert result.exit_code == 0
    result = invoke(runner, "bpe", "decode", segmented)
    assert result.exit_code == 0
    assert result.output.splitlines() == ["low lower lowest", "newer newest"]


def test_curriculum(runner, corpus, write_text, tmp_path):
    in_lm = tmp_path / "in.json"
    out_lm = tmp_path / "out.json"
    lm_train(["das haus", "ein haus"], 2, 0.5).save(in_lm)
    lm_train(["das buch", "ein buch"], 2, 0.5).save(out_lm)
    result = invoke(
        runner, "curriculum", "score", corpus, "--in-lm", in_lm, "--out-lm", out_lm
    )
    assert result.exit_code == 0
    rows = [json.loads(line) for line in result.output.splitlines()]
    assert len(rows) == 4
    assert all({"q", "logprob_in", "logprob_out"} <= set(r["scores"]) for r in rows)
    assert rows[0]["scores"]["q"] > rows[1]["scores"]["q"]

    scored = tmp_path / "scored.jsonl"
    scored.write_text(result.output, encoding="utf-8")
    bins = tmp_path / "bins.json"
    result = invoke(
        runner, "curriculum", "bins", scored, "--bins", 2, "--phases", 2, "--out", bins
    )
    assert result.exit_code == 0
    assert CurriculumBins.load(bins).num_records == 4

    result = invoke(
        runner, "curriculum", "sample", bins, "--phase", 0, "--batch-size", 3,
        "--num-batches", 2,
    )
    assert result.exit_code == 0
    batches = [json.loads(line) for line in result.output.splitlines()]
    assert [b["batch"] for b in batches] == [0, 1]
    assert all(len(b["indices"]) == 3 for b in batches)


def test_curriculum_score_needs_models(runner, corpus):
    assert invoke(runner, "curriculum", "score", corpus).exit_code == 2


def test_lm_train(runner, write_text, tmp_path):
    mono = write_text("mono.de", ["das haus", "das buch"])
    out = tmp_path / "lm.json"
    result = invoke(runner, "lm", "train", mono, "--order", 2, "--out", out)
    assert result.exit_code == 0
    assert NgramLM.load(out) == lm_train(["das haus", "das buch"], 2, 1.0)


def test_lid_train_bad_sample(runner):
    result = invoke(runner, "preprocess", "lid-train", "--sample", "en")
    assert result.exit_code == 2


def test_bleu(runner, write_text):
    hyp = write_text("hyp.txt", ["the cat sat on the mat"])
    ref = write_text("ref.txt", ["the cat sat on the mat"])
    result = invoke(runner, "score", "bleu", hyp, ref)
    assert result.exit_code == 0
    assert json.loads(result.output)["bleu"] == pytest.approx(100.0)


def test_run(runner, corpus, tmp_path):
    config = tmp_path / "pipeline.yaml"
    with open(config, "w", encoding="utf-8") as f:
        yaml.safe_dump({
            "seed": 5,
            "stages": [
                {"op": "dedup", "input": "train.jsonl", "output": "dedup.jsonl"},
            ],
        }, f)
    result = invoke(runner, "run", config)
    assert result.exit_code == 0
    manifest = json.loads(result.output)
    assert manifest["stages"][0]["outputs"][0]["records"] == 3
    assert (tmp_path / "manifest.json").exists()

    result = invoke(runner, "run", config, "--format", "text")
    assert result.exit_code == 0
    name, path, records, digest = result.output.splitlines()[0].split("\t")
    assert (name, path, records) == ("dedup", "dedup.jsonl", "3")
    assert len(digest) == 64


def test_run_unknown_op(runner, tmp_path):
    config = tmp_path / "pipeline.yaml"
    config.write_text(
        "seed: 1\nstages:\n  - {op: frobnicate, input: a.jsonl, output: b.jsonl}\n",
        encoding="utf-8",
    )
    result = invoke(runner, "run", config)
    assert result.exit_code == 1
    assert "frobnicate" in result.output
