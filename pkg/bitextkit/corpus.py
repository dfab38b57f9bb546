"""
Streaming record IO and corpus statistics.

The canonical record format is JSONL, one object per line::

    {"src": "hello", "tgt": "你好", "lang_src": "en", "lang_tgt": "zh",
     "provenance": "AUTHENTIC", "scores": {}}

TSV (``src<TAB>tgt[<TAB>provenance]``, no header) is accepted for import
and export; it can't carry scores or text containing tabs and newlines.

Reading is lazy: :func:`read_records` returns a :class:`RecordReader`,
which yields pairs in file order and holds at most one record in memory.
Malformed lines are logged, counted and skipped; when more than
:data:`MAX_MALFORMED_RATIO` of the lines are malformed, the reader raises
:class:`bitextkit.exc.RecordFormatError` at the end of the stream.
"""

import collections
import enum
import json
import math
import os

from bitextkit.exc import ConfigurationError, RecordFormatError
from bitextkit.sentence import Provenance, Sentence, SentencePair
from bitextkit.util import logger

__all__ = (
    "CorpusStats",
    "RecordFormat",
    "RecordReader",
    "compute_stats",
    "count_lines",
    "format_record",
    "guess_format",
    "read_mono",
    "read_records",
    "write_mono",
    "write_records",
)

MAX_MALFORMED_RATIO = 0.1

# Only so many offending line numbers are kept for the error message.
_MAX_REPORTED_LINES = 20


class RecordFormat(enum.Enum):
    JSONL = "jsonl"
    TSV = "tsv"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(
                "Unknown record format %r; options are: jsonl, tsv" % (value,)
            )


def guess_format(path):
    """
    ``TSV`` for ``*.tsv`` files, ``JSONL`` otherwise.
    """
    if str(path).lower().endswith(".tsv"):
        return RecordFormat.TSV
    return RecordFormat.JSONL


def _parse_jsonl(line, lang_src, lang_tgt):
    obj = json.loads(line)
    if not isinstance(obj, dict):
        raise ValueError("not an object")
    src, tgt = obj["src"], obj["tgt"]
    if not isinstance(src, str) or not isinstance(tgt, str):
        raise ValueError("src and tgt must be strings")
    scores = obj.get("scores") or {}
    if not isinstance(scores, dict):
        raise ValueError("scores must be an object")
    return SentencePair(
        src,
        tgt,
        obj.get("provenance", Provenance.AUTHENTIC.value),
        scores,
        src_lang=obj.get("lang_src") or lang_src,
        tgt_lang=obj.get("lang_tgt") or lang_tgt,
    )


def _parse_tsv(line, lang_src, lang_tgt):
    columns = line.split("\t")
    if len(columns) == 2:
        src, tgt = columns
        provenance = Provenance.AUTHENTIC
    elif len(columns) == 3:
        src, tgt, provenance = columns
    else:
        raise ValueError("expected 2 or 3 columns, got %d" % len(columns))
    return SentencePair(
        src, tgt, provenance, src_lang=lang_src, tgt_lang=lang_tgt
    )


_PARSERS = {
    RecordFormat.JSONL: _parse_jsonl,
    RecordFormat.TSV: _parse_tsv,
}


class RecordReader:
    """
    Iterable over the :class:`bitextkit.sentence.SentencePair` records of
    a file. Iterating twice re-reads the file.

    After a complete iteration ``lines``, ``skipped`` and
    ``malformed_lines`` describe the file.
    """

    def __init__(self, path, format=RecordFormat.JSONL, *, lang_src="",
                 lang_tgt="", max_malformed_ratio=MAX_MALFORMED_RATIO):
        """
        :param path: File path.

        :param format: :class:`RecordFormat` or its name.

        :param str lang_src: Source language for records which don't
            specify one (all TSV records).

        :param str lang_tgt: Target language for records which don't
            specify one.

        :param float max_malformed_ratio: Tolerated share of malformed
            lines.
        """
        self.path = path
        self.format = RecordFormat.parse(format)
        self.lang_src = lang_src
        self.lang_tgt = lang_tgt
        self.max_malformed_ratio = max_malformed_ratio
        self.lines = 0
        self.skipped = 0
        self.malformed_lines = []

    def __iter__(self):
        parse = _PARSERS[self.format]
        self.lines = 0
        self.skipped = 0
        self.malformed_lines = []
        with open(self.path, encoding="utf-8", newline="\n") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\n")
                if line.endswith("\r"):
                    line = line[:-1]
                if not line and self.format is RecordFormat.JSONL:
                    continue
                self.lines += 1
                try:
                    pair = parse(line, self.lang_src, self.lang_tgt)
                except (ValueError, KeyError, TypeError) as error:
                    self.skipped += 1
                    if len(self.malformed_lines) < _MAX_REPORTED_LINES:
                        self.malformed_lines.append(lineno)
                    logger.warning(
                        "Skipping malformed line %s:%d: %s",
                        self.path, lineno, error,
                    )
                    continue
                yield pair
        self._check_malformed()

    def _check_malformed(self):
        if self.lines and self.skipped / self.lines > self.max_malformed_ratio:
            raise RecordFormatError(
                "%s: %d of %d lines are malformed (lines %s%s)" % (
                    self.path,
                    self.skipped,
                    self.lines,
                    ", ".join(str(n) for n in self.malformed_lines),
                    ", ..." if self.skipped > len(self.malformed_lines) else "",
                ),
                line_numbers=self.malformed_lines,
            )


def read_records(path, format=RecordFormat.JSONL, **kwargs):
    """
    Stream sentence pairs from a file.

    ``TSV`` line ``"hello\\t你好"`` yields an ``AUTHENTIC`` pair; a third
    column names the provenance.

    :param path: File path. An unreadable file raises :class:`OSError`
        once iteration starts.

    :param format: ``"jsonl"`` or ``"tsv"``.

    :param kwargs: See :class:`RecordReader`.

    :rtype: :class:`RecordReader`
    """
    return RecordReader(path, format, **kwargs)


def _dump_jsonl(pair):
    return json.dumps(
        {
            "src": pair.src.text,
            "tgt": pair.tgt.text,
            "lang_src": pair.src.lang,
            "lang_tgt": pair.tgt.lang,
            "provenance": pair.provenance.value,
            "scores": dict(pair.scores),
        },
        ensure_ascii=False,
    )


def _dump_tsv(pair):
    for text in (pair.src.text, pair.tgt.text):
        if "\t" in text or "\n" in text or "\r" in text:
            raise RecordFormatError(
                "TSV can't represent text with tabs or newlines: %r" % text
            )
    if pair.provenance is Provenance.AUTHENTIC:
        return "%s\t%s" % (pair.src.text, pair.tgt.text)
    return "%s\t%s\t%s" % (pair.src.text, pair.tgt.text, pair.provenance.value)


_DUMPERS = {
    RecordFormat.JSONL: _dump_jsonl,
    RecordFormat.TSV: _dump_tsv,
}


def format_record(pair, format=RecordFormat.JSONL):
    """
    One pair as a line of ``format``, without the newline.
    """
    return _DUMPERS[RecordFormat.parse(format)](pair)


def _ensure_parent(path):
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_records(records, path, format=RecordFormat.JSONL):
    """
    Write sentence pairs, one per line.

    :param records: Iterable of :class:`bitextkit.sentence.SentencePair`.

    :param path: Output file path. Missing parent directories are created.

    :param format: ``"jsonl"`` or ``"tsv"``.

    :rtype: int
    :return: Number of records written.
    """
    dump = _DUMPERS[RecordFormat.parse(format)]
    _ensure_parent(path)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for pair in records:
            f.write(dump(pair))
            f.write("\n")
            count += 1
    return count


def read_mono(path, lang=""):
    """
    Stream :class:`bitextkit.sentence.Sentence` objects from a plain text
    file with one sentence per line. Empty lines are skipped.
    """
    with open(path, encoding="utf-8", newline="\n") as f:
        for line in f:
            line = line.rstrip("\r\n")
            if line.strip():
                yield Sentence(line, lang)


def write_mono(sentences, path):
    """
    Write sentences (or strings), one per line.

    :rtype: int
    """
    _ensure_parent(path)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for sentence in sentences:
            text = getattr(sentence, "text", sentence)
            if "\n" in text:
                raise RecordFormatError(
                    "A monolingual line can't contain a newline: %r" % text
                )
            f.write(text)
            f.write("\n")
            count += 1
    return count


def count_lines(path):
    """
    Number of non-empty lines of a text file.
    """
    count = 0
    with open(path, "rb") as f:
        for line in f:
            if line.strip():
                count += 1
    return count


class CorpusStats:
    """
    Counts describing a parallel corpus: pairs, tokens per side,
    a provenance histogram and a histogram of source/target token ratios.

    Ratios are bucketed down to a multiple of ``ratio_bucket_width``
    (10 source tokens for 5 target tokens fall in bucket ``2.0``); pairs with
    an empty target side are counted in the ``inf`` bucket.
    """

    def __init__(self, ratio_bucket_width=0.5):
        self.ratio_bucket_width = ratio_bucket_width
        self.pair_count = 0
        self.src_tokens = 0
        self.tgt_tokens = 0
        self.provenance = collections.Counter()
        self.ratio_histogram = collections.Counter()

    def add(self, pair):
        src_len, tgt_len = len(pair.src), len(pair.tgt)
        self.pair_count += 1
        self.src_tokens += src_len
        self.tgt_tokens += tgt_len
        self.provenance[pair.provenance] += 1
        self.ratio_histogram[self.ratio_bucket(src_len, tgt_len)] += 1

    def ratio_bucket(self, src_len, tgt_len):
        if tgt_len == 0:
            return math.inf
        width = self.ratio_bucket_width
        return math.floor(src_len / tgt_len / width) * width

    def as_dict(self):
        """
        JSON-friendly representation with deterministic key order.
        """
        def bucket_key(bucket):
            return "inf" if math.isinf(bucket) else "%g" % bucket

        return {
            "pair_count": self.pair_count,
            "src_tokens": self.src_tokens,
            "tgt_tokens": self.tgt_tokens,
            "provenance": {
                p.value: self.provenance[p]
                for p in Provenance if self.provenance[p]
            },
            "ratio_histogram": {
                bucket_key(b): self.ratio_histogram[b]
                for b in sorted(self.ratio_histogram)
            },
        }

    def __repr__(self):
        return "CorpusStats(pair_count=%d, src_tokens=%d, tgt_tokens=%d)" % (
            self.pair_count, self.src_tokens, self.tgt_tokens
        )


def compute_stats(records, *, ratio_bucket_width=0.5):
    """
    Single-pass statistics over a stream of sentence pairs.

    :rtype: :class:`CorpusStats`
    """
    stats = CorpusStats(ratio_bucket_width)
    for pair in records:
        stats.add(pair)
    return stats
