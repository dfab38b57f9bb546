import json
import os

import pytest
import yaml

from bitextkit.augment import Schedule
from bitextkit.curriculum import CurriculumBins
from bitextkit.exc import ConfigurationError, StageError, StageNotFound
from bitextkit.pipeline import (
    CONFIG_DIR_ENV,
    STAGE_OPS,
    Manifest,
    PipelineConfig,
    resolve_config_path,
    run_pipeline,
)
from bitextkit.preprocess import LidModel, TranslationTable
from bitextkit.subword import BpeModel
from bitextkit.translators import NgramLM
from bitextkit.util import derive_seed, file_digest
from test.conftest import file_bytes, read_jsonl

TRAIN = [
    ("the house", "das haus", 0.9),
    ("the book", "das buch", 0.95),
    ("a book", "ein buch", 0.5),
    ("a house", "ein haus", 0.85),
    ("the house", "das haus", 0.9),
    (" ".join(["the"] * 10), "das", 0.9),
    ("a big house", "ein grosses haus", 0.1),
]

MONO_EN = ["the house", "a book", "the book", "a house"]
MONO_DE = ["das haus", "ein buch", "das buch"]

LEXICON_EN_DE = [
    ("the", "das", 0.7), ("the", "die", 0.3),
    ("a", "ein", 1.0),
    ("house", "haus", 1.0),
    ("book", "buch", 0.6), ("book", "heft", 0.4),
]
LEXICON_DE_EN = [
    ("das", "the", 1.0),
    ("ein", "a", 0.8), ("ein", "one", 0.2),
    ("haus", "house", 1.0),
    ("buch", "book", 1.0),
]


def _write_lines(path, lines):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line)
            f.write("\n")
    return path


def _write_config(root, config, name="pipeline.yaml"):
    path = root / name
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(config, f, sort_keys=False)
    return path


def make_workspace(root):
    _write_lines(root / "train.jsonl", [
        json.dumps({
            "src": src, "tgt": tgt, "lang_src": "en", "lang_tgt": "de",
            "scores": {"qe": qe},
        })
        for src, tgt, qe in TRAIN
    ])
    _write_lines(root / "mono.en", MONO_EN)
    _write_lines(root / "mono.de", MONO_DE)
    _write_lines(
        root / "lex.en-de.tsv", ["%s\t%s\t%r" % row for row in LEXICON_EN_DE]
    )
    _write_lines(
        root / "lex.de-en.tsv", ["%s\t%s\t%r" % row for row in LEXICON_DE_EN]
    )
    return root


TRANSLATORS = {
    "en-de": {
        "type": "lexicon", "lexicon": "lex.en-de.tsv",
        "src_lang": "en", "tgt_lang": "de",
    },
    "de-en": {
        "type": "lexicon", "lexicon": "lex.de-en.tsv",
        "src_lang": "de", "tgt_lang": "en",
    },
}

FULL_STAGES = [
    {"op": "dedup", "input": "train.jsonl", "output": "work/dedup.jsonl"},
    {"op": "filter_chain", "input": "work/dedup.jsonl", "output": "work/clean.jsonl",
     "params": {"report": "work/report.json"}},
    {"op": "ibm1_train", "input": "work/clean.jsonl", "output": "work/ibm1.tsv",
     "params": {"iterations": 3}},
    {"op": "bpe_learn", "inputs": ["work/clean.jsonl", "mono.en"],
     "output": "work/bpe.model", "params": {"num_merges": 10, "min_frequency": 1}},
    {"op": "bpe_apply", "input": "work/clean.jsonl", "output": "work/clean.bpe.jsonl",
     "params": {"model": "work/bpe.model"}},
    {"name": "lm_in", "op": "lm_train", "input": "work/clean.jsonl",
     "output": "work/lm.in.json", "params": {"side": "tgt", "order": 2}},
    {"name": "lm_out", "op": "lm_train", "input": "mono.de",
     "output": "work/lm.out.json", "params": {"order": 2}},
    {"op": "ft", "input": "mono.en", "output": "work/ft.jsonl",
     "params": {"teacher": "en-de", "sample_size": 2}},
    {"op": "bt", "input": "mono.de", "output": "work/bt.jsonl",
     "params": {"reverse": "de-en", "mode": "sampling", "tagged": True}},
    {"op": "dd", "input": "work/clean.jsonl", "output": "work/dd.jsonl",
     "params": {"fwd": ["en-de"], "bwd": ["de-en"]}},
    {"op": "tel", "input": "mono.en", "output": "work/tel.jsonl",
     "params": {"models": ["en-de"]}},
    {"op": "bit", "input": "work/clean.jsonl", "output": "work/bit.jsonl"},
    {"op": "at_schedule",
     "inputs": ["work/clean.jsonl", "work/ft.jsonl", "work/bt.jsonl"],
     "output": "work/at.json", "params": {"rounds": 2}},
    {"op": "bit_schedule", "inputs": ["work/bit.jsonl", "work/clean.jsonl"],
     "output": "work/bit.schedule.json"},
    {"op": "curriculum_score", "input": "work/clean.jsonl",
     "output": "work/scored.jsonl",
     "params": {"in_lm": "work/lm.in.json", "out_lm": "work/lm.out.json",
                "table": "work/ibm1.tsv"}},
    {"op": "curriculum_bins", "input": "work/scored.jsonl", "output": "work/bins.json",
     "params": {"bins": 2, "phases": 3}},
    {"op": "curriculum_sample", "input": "work/bins.json",
     "output": "work/batches.jsonl",
     "params": {"phase": 0, "batch_size": 2, "num_batches": 3}},
    {"op": "hypo_build", "input": "work/clean.jsonl", "output": "work/ape.jsonl",
     "params": {"base": "en-de", "threshold": 0.8, "n": 2, "sft": "work/sft.jsonl"}},
    {"op": "stats", "input": "work/clean.jsonl", "output": "work/stats.json"},
    {"op": "split_long", "input": "mono.en", "output": "work/split.en",
     "params": {"max_len": 1, "lang": "en"}},
    {"op": "lid_train", "inputs": ["mono.en", "mono.de"], "output": "work/lid.json",
     "params": {"langs": ["en", "de"]}},
]


def full_config(**extra):
    config = {"seed": 13, "shard_size": 2, "translators": TRANSLATORS,
              "stages": FULL_STAGES}
    config.update(extra)
    return config


def _stage(manifest, name):
    return next(s for s in manifest.stages if s["name"] == name)


def _records(manifest, name):
    return _stage(manifest, name)["outputs"][0]["records"]


@pytest.fixture
def workspace(tmp_path):
    return make_workspace(tmp_path)


def test_stage_ops_are_registered():
    assert {
        "dedup", "filter_chain", "split_long", "lid_train", "ibm1_train",
        "bpe_learn", "bpe_apply", "lm_train", "bit", "dd", "ft", "bt", "tel",
        "at_schedule", "bit_schedule", "curriculum_score", "curriculum_bins",
        "curriculum_sample", "hypo_build", "stats",
    } <= set(STAGE_OPS)


def test_three_stages(workspace):
    path = _write_config(workspace, {
        "seed": 7,
        "stages": [
            {"op": "dedup", "input": "train.jsonl", "output": "work/dedup.jsonl"},
            {"op": "filter_chain", "input": "work/dedup.jsonl",
             "output": "work/clean.jsonl"},
            {"name": "short", "op": "filter_chain", "input": "work/clean.jsonl",
             "output": "work/short.jsonl",
             "params": {"filters": [{"name": "max_tokens", "max_tokens": 2}]}},
        ],
    })
    manifest = run_pipeline(path)
    assert [s["name"] for s in manifest.stages] == ["dedup", "filter_chain", "short"]
    counts = [s["outputs"][0]["records"] for s in manifest.stages]
    assert counts == [6, 5, 4]
    assert counts == sorted(counts, reverse=True)
    assert _stage(manifest, "dedup")["inputs"][0]["records"] == 7
    assert Manifest.load(workspace / "manifest.json") == manifest

    for stage in manifest.stages:
        assert stage["seed"] == derive_seed(7, stage["name"])
        for item in stage["outputs"]:
            assert not os.path.isabs(item["path"])
            assert item["sha256"] == file_digest(workspace / item["path"])

    rows = read_jsonl(workspace / "work/short.jsonl")
    assert [(r["src"], r["tgt"]) for r in rows] == [
        ("the house", "das haus"), ("the book", "das buch"),
        ("a book", "ein buch"), ("a house", "ein haus"),
    ]
    report = _stage(manifest, "short")["report"]
    assert report["input"] == 5
    assert report["output"] == 4


def test_rerun_is_byte_identical(workspace):
    path = _write_config(workspace, {
        "seed": 7,
        "stages": [
            {"op": "dedup", "input": "train.jsonl", "output": "work/dedup.jsonl"},
            {"op": "filter_chain", "input": "work/dedup.jsonl",
             "output": "work/clean.jsonl"},
        ],
    })
    first = run_pipeline(path)
    first_bytes = file_bytes(workspace / "manifest.json")
    second = run_pipeline(path)
    assert second == first
    assert second.digests() == first.digests()
    assert file_bytes(workspace / "manifest.json") == first_bytes


def test_unknown_operation_runs_nothing(workspace):
    path = _write_config(workspace, {
        "seed": 1,
        "stages": [
            {"op": "dedup", "input": "train.jsonl", "output": "work/dedup.jsonl"},
            {"name": "mystery", "op": "frobnicate", "input": "work/dedup.jsonl",
             "output": "work/out.jsonl"},
        ],
    })
    with pytest.raises(StageNotFound) as excinfo:
        run_pipeline(path)
    assert excinfo.value.name == "frobnicate"
    assert "mystery" in str(excinfo.value)
    assert "frobnicate" in str(excinfo.value)
    assert not (workspace / "work").exists()
    assert not (workspace / "manifest.json").exists()


def test_stage_failure_stops_the_pipeline(workspace):
    path = _write_config(workspace, {
        "seed": 1,
        "translators": TRANSLATORS,
        "stages": [
            {"op": "dedup", "input": "train.jsonl", "output": "work/dedup.jsonl"},
            {"op": "ft", "input": "mono.en", "output": "work/ft.jsonl",
             "params": {"teacher": "en-de", "sample_size": 100}},
            {"op": "stats", "input": "work/dedup.jsonl", "output": "work/stats.json"},
        ],
    })
    with pytest.raises(StageError) as excinfo:
        run_pipeline(path)
    assert excinfo.value.stage == "ft"
    assert isinstance(excinfo.value.__cause__, ConfigurationError)
    assert (workspace / "work/dedup.jsonl").exists()
    assert not (workspace / "work/stats.json").exists()
    assert not (workspace / "manifest.json").exists()


def test_missing_input_is_a_stage_error(workspace):
    path = _write_config(workspace, {
        "seed": 1,
        "stages": [{"op": "dedup", "input": "nope.jsonl", "output": "out.jsonl"}],
    })
    with pytest.raises(StageError) as excinfo:
        run_pipeline(path)
    assert excinfo.value.stage == "dedup"


def _dedup_stage(**kwargs):
    stage = {"op": "dedup", "input": "train.jsonl", "output": "out.jsonl"}
    stage.update(kwargs)
    return stage


@pytest.mark.parametrize("data", [
    [],
    {"stages": [_dedup_stage()]},
    {"seed": 1},
    {"seed": 1, "stages": []},
    {"seed": "1", "stages": [_dedup_stage()]},
    {"seed": True, "stages": [_dedup_stage()]},
    {"seed": 1, "stages": [_dedup_stage()], "bogus": 1},
    {"seed": 1, "stages": [_dedup_stage()], "jobs": 0},
    {"seed": 1, "stages": [_dedup_stage()], "shard_size": -1},
    {"seed": 1, "stages": [_dedup_stage()], "tokenizers": {"zh": "nope"}},
    {"seed": 1, "stages": [_dedup_stage(), _dedup_stage()]},
    {"seed": 1, "stages": [_dedup_stage(output=None)]},
    {"seed": 1, "stages": [_dedup_stage(params={"bogus": 1})]},
    {"seed": 1, "stages": [_dedup_stage(extra=1)]},
    {"seed": 1, "stages": [_dedup_stage(inputs=["a.jsonl", "b.jsonl"])]},
    {"seed": 1, "stages": [_dedup_stage(inputs=["a.jsonl", "b.jsonl"], input=None)]},
    {"seed": 1, "stages": [{"input": "train.jsonl", "output": "out.jsonl"}]},
    {"seed": 1, "stages": ["dedup"]},
    {"seed": 1, "stages": [{"op": "split_long", "input": "mono.en",
                            "output": "out.en"}]},
    {"seed": 1, "stages": [{"op": "ft", "input": "mono.en", "output": "ft.jsonl",
                            "params": {"teacher": "en-de", "sample_size": 1}}]},
    {"seed": 1, "translators": {"x": {"lexicon": "lex.tsv"}},
     "stages": [_dedup_stage()]},
    {"seed": 1, "translators": {"x": {"type": "nope"}}, "stages": [_dedup_stage()]},
])
def test_invalid_config(data):
    with pytest.raises(ConfigurationError):
        PipelineConfig.from_dict(data)


def test_invalid_yaml(tmp_path):
    path = tmp_path / "pipeline.yaml"
    path.write_text("stages: [\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        run_pipeline(path)


def test_config_dir_env(workspace, tmp_path_factory, monkeypatch):
    _write_config(workspace, {
        "seed": 3,
        "stages": [{"op": "dedup", "input": "train.jsonl", "output": "dedup.jsonl"}],
    })
    elsewhere = tmp_path_factory.mktemp("elsewhere")
    monkeypatch.chdir(elsewhere)
    with pytest.raises(ConfigurationError):
        resolve_config_path("pipeline.yaml")
    monkeypatch.setenv(CONFIG_DIR_ENV, str(workspace))
    assert resolve_config_path("pipeline.yaml") == os.path.join(
        str(workspace), "pipeline.yaml"
    )
    manifest = run_pipeline("pipeline.yaml")
    assert _records(manifest, "dedup") == 6
    assert (workspace / "dedup.jsonl").exists()
    assert not (elsewhere / "dedup.jsonl").exists()


def test_manifest_path_override(workspace):
    path = _write_config(workspace, {
        "seed": 3,
        "manifest": "runs/m.json",
        "stages": [{"op": "dedup", "input": "train.jsonl", "output": "dedup.jsonl"}],
    })
    run_pipeline(path)
    assert (workspace / "runs/m.json").exists()
    run_pipeline(path, manifest_path=str(workspace / "other.json"))
    assert file_bytes(workspace / "other.json") == file_bytes(workspace / "runs/m.json")


def test_tokenizers_are_restored(workspace):
    from bitextkit import tokenization

    before = dict(tokenization.options.language_tokenizers)
    path = _write_config(workspace, {
        "seed": 3,
        "tokenizers": {"de": "char"},
        "stages": [{"op": "stats", "input": "train.jsonl", "output": "stats.json"}],
    })
    manifest = run_pipeline(path)
    assert manifest.tokenizers["de"] == "char"
    assert "default" in manifest.tokenizers
    assert tokenization.options.language_tokenizers == before


def test_full_pipeline(workspace):
    manifest = run_pipeline(_write_config(workspace, full_config()))
    assert [s["name"] for s in manifest.stages] == [
        s.get("name", s["op"]) for s in FULL_STAGES
    ]
    assert _records(manifest, "dedup") == 6
    assert _records(manifest, "filter_chain") == 5
    assert _records(manifest, "bpe_apply") == 5
    assert _records(manifest, "dd") == 15
    assert _records(manifest, "bit") == 10
    assert _records(manifest, "tel") == 4
    assert _records(manifest, "ft") == 2
    assert _records(manifest, "bt") == 3
    assert _records(manifest, "curriculum_score") == 5
    assert _records(manifest, "curriculum_sample") == 3
    assert _records(manifest, "hypo_build") == 3
    assert _records(manifest, "split_long") == 8
    sft = _stage(manifest, "hypo_build")["outputs"][1]
    assert sft["path"] == "work/sft.jsonl"
    assert sft["records"] == 3
    assert _stage(manifest, "filter_chain")["outputs"][1]["path"] == "work/report.json"
    assert _records(manifest, "stats") is None

    work = workspace / "work"
    bt = read_jsonl(work / "bt.jsonl")
    assert all(r["src"].startswith("<BT> ") for r in bt)
    assert {r["provenance"] for r in bt} == {"BT_TAGGED"}
    assert [r["tgt"] for r in bt] == MONO_DE
    assert {r["provenance"] for r in read_jsonl(work / "dd.jsonl")} == {
        "AUTHENTIC", "DD_FWD", "DD_BWD",
    }
    assert [r["qe_score"] for r in read_jsonl(work / "ape.jsonl")] == [0.9, 0.95, 0.85]
    assert all("q" in r["scores"] for r in read_jsonl(work / "scored.jsonl"))
    batches = read_jsonl(work / "batches.jsonl")
    assert [b["batch"] for b in batches] == [0, 1, 2]
    assert all(len(b["indices"]) == 2 for b in batches)

    table = TranslationTable.load(work / "ibm1.tsv")
    log_likelihoods = _stage(manifest, "ibm1_train")["log_likelihoods"]
    assert len(log_likelihoods) == 4
    assert table.rows
    assert len(BpeModel.load(work / "bpe.model")) <= 10
    assert NgramLM.load(work / "lm.in.json").order == 2
    assert CurriculumBins.load(work / "bins.json").num_records == 5
    assert LidModel.load(work / "lid.json").classify("das buch")[0] == "de"
    assert len(Schedule.load(work / "at.json").phases) == 4
    assert len(Schedule.load(work / "bit.schedule.json").phases) == 2
    with open(work / "split.en", encoding="utf-8") as f:
        assert f.read().split("\n")[:4] == ["the", "house", "a", "book"]


def test_full_pipeline_is_reproducible(tmp_path_factory):
    first_dir = make_workspace(tmp_path_factory.mktemp("first"))
    second_dir = make_workspace(tmp_path_factory.mktemp("second"))
    first = run_pipeline(_write_config(first_dir, full_config()), jobs=1)
    rerun = run_pipeline(_write_config(first_dir, full_config()), jobs=1)
    second = run_pipeline(_write_config(second_dir, full_config()), jobs=8)
    assert rerun == first
    assert second == first
    assert file_bytes(first_dir / "manifest.json") == file_bytes(
        second_dir / "manifest.json"
    )
    for path in first.digests():
        assert file_bytes(first_dir / path) == file_bytes(second_dir / path)


def test_seed_changes_sampled_stages(tmp_path_factory):
    first_dir = make_workspace(tmp_path_factory.mktemp("a"))
    second_dir = make_workspace(tmp_path_factory.mktemp("b"))
    first = run_pipeline(_write_config(first_dir, full_config()))
    second = run_pipeline(_write_config(second_dir, full_config(seed=14)))
    assert _stage(first, "dedup")["outputs"] == _stage(second, "dedup")["outputs"]
    assert _stage(first, "ft")["seed"] != _stage(second, "ft")["seed"]


@pytest.mark.slow
def test_large_corpus(tmp_path):
    lines = (
        json.dumps({"src": "sentence number %d" % (i % 500000),
                    "tgt": "satz nummer %d" % (i % 500000)})
        for i in range(1000000)
    )
    _write_lines(tmp_path / "big.jsonl", lines)
    path = _write_config(tmp_path, {
        "seed": 1,
        "stages": [
            {"op": "dedup", "input": "big.jsonl", "output": "dedup.jsonl"},
            {"op": "filter_chain", "input": "dedup.jsonl", "output": "clean.jsonl"},
        ],
    })
    manifest = run_pipeline(path)
    assert _records(manifest, "dedup") == 500000
    assert _records(manifest, "filter_chain") == 500000
