import json
import os

import pytest

from bitextkit import tokenization


def pytest_report_header(config):
    slow = "enabled" if _run_slow(config) else "skipped"
    return "bitextkit:\n    slow tests: %s" % slow


def pytest_addoption(parser):
    parser.addoption(
        "--run-slow",
        action="store_true",
        help="Run slow tests (throughput over large synthetic corpora).",
    )


def _run_slow(config):
    return config.getoption("--run-slow")


def pytest_collection_modifyitems(config, items):
    if _run_slow(config):
        return
    skip = pytest.mark.skip(reason="Slow test; pass --run-slow to run it")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(autouse=True)
def restore_tokenizers():
    # Commands and pipelines may override the per-language tokenizers.
    saved = dict(tokenization.options.language_tokenizers)
    yield
    tokenization.options.language_tokenizers = saved


@pytest.fixture
def write_jsonl(tmp_path):
    def write_jsonl(name, rows):
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for row in rows:
                f.write(json.dumps(row, ensure_ascii=False))
                f.write("\n")
        return path
    return write_jsonl


@pytest.fixture
def write_text(tmp_path):
    def write_text(name, lines):
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for line in lines:
                f.write(line)
                f.write("\n")
        return path
    return write_text


def read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def file_bytes(path):
    with open(os.fspath(path), "rb") as f:
        return f.read()
