"""
Automatic post-editing datasets: sources with the base model's n-best
hypotheses and a reference, gated by a quality estimate, rendered into
prompt/completion pairs for supervised fine-tuning of a language model.
"""

import json
import os
import string

from bitextkit.exc import RecordFormatError, ScoreError, TemplateError, TranslationError
from bitextkit.sentence import NBestList, Sentence
from bitextkit.translators.base import DecodeMode, DecodeSpec
from bitextkit.translators.qe import StoredScoreQE
from bitextkit.util import logger

__all__ = (
    "DEFAULT_NBEST",
    "DEFAULT_QE_THRESHOLD",
    "DEFAULT_TEMPLATE",
    "ApeRecord",
    "ape_prompt",
    "hypo_build",
    "read_ape_records",
    "sft_records",
    "write_ape_records",
    "write_sft",
)

#: Pairs need a quality estimate strictly above this.
DEFAULT_QE_THRESHOLD = 0.8

#: Beam width and n-best size.
DEFAULT_NBEST = 10

DEFAULT_TEMPLATE = (
    "Improve the {tgt_lang} translation of the {src_lang} text below. "
    "Use the candidate translations as hints.\n"
    "Source: {source}\n"
    "Candidates:\n"
    "{nbest}\n"
    "Translation:"
)

_REQUIRED_FIELDS = frozenset({"source", "nbest"})
_OPTIONAL_FIELDS = frozenset({"src_lang", "tgt_lang"})


class ApeRecord:
    """
    A post-editing example.
    """

    __slots__ = ("source", "nbest", "reference", "qe_score")

    def __init__(self, source, nbest, reference, qe_score):
        """
        :param source: :class:`bitextkit.sentence.Sentence`.
        :param nbest: :class:`bitextkit.sentence.NBestList` of ``source``.
        :param reference: :class:`bitextkit.sentence.Sentence`, the
            fine-tuning target.
        :param float qe_score: Quality estimate of ``(source, reference)``.
        """
        self.source = source
        self.nbest = nbest
        self.reference = reference
        self.qe_score = float(qe_score)

    def to_dict(self):
        return {
            "source": self.source.text,
            "nbest": [
                {"text": h.text, "logprob": h.logprob, "rank": h.rank}
                for h in self.nbest
            ],
            "reference": self.reference.text,
            "qe_score": self.qe_score,
            "src_lang": self.source.lang,
            "tgt_lang": self.reference.lang,
        }

    @classmethod
    def from_dict(cls, data):
        src_lang = data.get("src_lang", "")
        source = Sentence(data["source"], src_lang)
        nbest = NBestList(
            source,
            [(h["text"], h["logprob"], h["rank"]) for h in data["nbest"]],
        )
        return cls(
            source,
            nbest,
            Sentence(data["reference"], data.get("tgt_lang", "")),
            data["qe_score"],
        )

    def __eq__(self, other):
        return isinstance(other, ApeRecord) and self.to_dict() == other.to_dict()

    def __ne__(self, other):
        return not (self == other)

    def __repr__(self):
        return "ApeRecord(%r, %d hypotheses, qe_score=%r)" % (
            self.source.text, len(self.nbest), self.qe_score
        )


def hypo_build(pairs, base, qe=None, threshold=DEFAULT_QE_THRESHOLD,
               n=DEFAULT_NBEST, *, stats=None):
    """
    Build post-editing records from pairs whose quality estimate is strictly
    greater than ``threshold``; each gets the base model's n-best list of
    its source (beam search of width ``n``) and its target as reference.

    :param pairs: Iterable of :class:`bitextkit.sentence.SentencePair`.
    :param base: The :class:`bitextkit.translators.Translator` to decode
        with.
    :param qe: A callable scoring a pair, e.g.
        :class:`bitextkit.translators.LengthRatioQE`. Defaults to the
        ``"qe"`` score stored on each pair.
    :param float threshold: Exclusive lower bound of kept quality estimates.
    :param int n: n-best size and beam width.
    :param stats: An :class:`bitextkit.augment.AugmentStats` to count
        skipped pairs in.
    """
    if qe is None:
        qe = StoredScoreQE()
    spec = DecodeSpec(DecodeMode.BEAM, n)
    for pair in pairs:
        try:
            score = float(qe(pair))
        except ScoreError as error:
            logger.warning("Skipping %r: %s", pair, error)
            if stats is not None:
                stats.skipped += 1
            continue
        if not score > threshold:
            continue
        try:
            nbest = base.translate(pair.src, spec, n)
        except TranslationError as error:
            if stats is not None:
                stats.skip(pair.src.text, error)
            continue
        yield ApeRecord(pair.src, nbest, pair.tgt, score)


def _check_template(template):
    try:
        parsed = [
            (field, spec, conversion)
            for _, field, spec, conversion in string.Formatter().parse(template)
            if field is not None
        ]
    except ValueError as error:
        raise TemplateError("Malformed template: %s" % error)
    fields = {field for field, _, _ in parsed}
    missing = _REQUIRED_FIELDS - fields
    if missing:
        raise TemplateError(
            "Template lacks placeholders: %s"
            % ", ".join("{%s}" % f for f in sorted(missing))
        )
    unknown = fields - _REQUIRED_FIELDS - _OPTIONAL_FIELDS
    if unknown:
        raise TemplateError(
            "Template uses unknown placeholders: %s"
            % ", ".join("{%s}" % f for f in sorted(unknown))
        )
    if any(spec or conversion for _, spec, conversion in parsed):
        raise TemplateError("Template placeholders can't carry format specs")


def render_nbest(nbest):
    """
    ``1. hyp`` lines in rank order.
    """
    return "\n".join("%d. %s" % (h.rank, h.text) for h in nbest)


def ape_prompt(record, template=DEFAULT_TEMPLATE):
    """
    Fill ``template`` for a record. ``{source}`` and ``{nbest}`` are
    required; ``{src_lang}`` and ``{tgt_lang}`` are optional::

        >>> ape_prompt(record, "{source}\\n{nbest}")
        'a b\\n1. x y\\n2. x z'

    :raises bitextkit.exc.TemplateError: for missing or unknown
        placeholders.
    """
    _check_template(template)
    return template.format(
        source=record.source.text,
        nbest=render_nbest(record.nbest),
        src_lang=record.source.lang,
        tgt_lang=record.reference.lang,
    )


def sft_records(records, template=DEFAULT_TEMPLATE):
    """
    Yield ``{"prompt": ..., "completion": reference}`` dicts.
    """
    _check_template(template)
    for record in records:
        yield {
            "prompt": ape_prompt(record, template),
            "completion": record.reference.text,
        }


def _ensure_parent(path):
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_sft(records, path, template=DEFAULT_TEMPLATE):
    """
    Write :func:`sft_records` as JSONL.

    :rtype: int
    """
    _ensure_parent(path)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for item in sft_records(records, template):
            f.write(json.dumps(item, ensure_ascii=False))
            f.write("\n")
            count += 1
    return count


def write_ape_records(records, path):
    """
    Write records as JSONL ``{source, nbest: [{text, logprob, rank}],
    reference, qe_score, src_lang, tgt_lang}``.

    :rtype: int
    """
    _ensure_parent(path)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(json.dumps(record.to_dict(), ensure_ascii=False))
            f.write("\n")
            count += 1
    return count


def read_ape_records(path):
    with open(path, encoding="utf-8", newline="\n") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            try:
                yield ApeRecord.from_dict(json.loads(line))
            except (KeyError, TypeError, ValueError) as error:
                raise RecordFormatError(
                    "%s:%d: invalid post-editing record: %s" % (path, lineno, error),
                    line_numbers=[lineno],
                )
