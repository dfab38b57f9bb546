"""
Synthetic corpus generators. Every generated pair carries a synthetic
:class:`bitextkit.sentence.Provenance`; authentic input pairs are passed
through unchanged where a generator merges them with its output.
"""

import collections

import numpy as np

from bitextkit import tokenization
from bitextkit.exc import ConfigurationError, RecordError, TranslationError
from bitextkit.preprocess.filters import dedup_key
from bitextkit.sentence import Provenance, Sentence, SentencePair
from bitextkit.translators.base import DecodeMode, DecodeSpec, options
from bitextkit.util import DEFAULT_SENTINEL, logger, resolve_option

__all__ = (
    "AugmentStats",
    "bit_reconstruct",
    "bt_generate",
    "dd_generate",
    "ft_generate",
    "tel_build",
)


class AugmentStats:
    """
    Counts of produced pairs per provenance and of records skipped because
    a translator failed.
    """

    def __init__(self):
        self.produced = collections.Counter()
        self.skipped = 0
        self.deduplicated = 0

    def add(self, pair):
        self.produced[pair.provenance] += 1

    def skip(self, what, error):
        self.skipped += 1
        logger.warning("Skipping %r: translation failed: %s", what, error)

    def as_dict(self):
        return {
            "produced": {
                p.value: self.produced[p] for p in Provenance if self.produced[p]
            },
            "skipped": self.skipped,
            "deduplicated": self.deduplicated,
        }

    def __repr__(self):
        return "AugmentStats(produced=%d, skipped=%d)" % (
            sum(self.produced.values()), self.skipped
        )


def _as_list(translators):
    if isinstance(translators, (list, tuple)):
        return list(translators)
    return [translators]


def _emit(records, stats, dedup):
    seen = set()
    for pair in records:
        if dedup:
            key = dedup_key(pair)
            if key in seen:
                if stats is not None:
                    stats.deduplicated += 1
                continue
            seen.add(key)
        if stats is not None:
            stats.add(pair)
        yield pair


def _sentence(item, lang=""):
    if isinstance(item, Sentence):
        return item
    return Sentence(item, lang)


def bit_reconstruct(pairs, *, stats=None):
    """
    Bidirectional training data: the input pairs in order, followed by
    their direction-reversed copies tagged ``BIT_REVERSED``::

        >>> pairs = [SentencePair("s1", "t1")]
        >>> list(bit_reconstruct(pairs))
        [SentencePair('s1', 't1', AUTHENTIC), SentencePair('t1', 's1', BIT_REVERSED)]

    The input is materialized, so it may be any iterable.

    :raises bitextkit.exc.RecordError: if a pair has an empty side.
    """
    pairs = list(pairs)
    for pair in pairs:
        if not pair.src or not pair.tgt:
            raise RecordError(
                "Bidirectional reconstruction needs both sides: %r" % (pair,)
            )

    def generate():
        yield from pairs
        for pair in pairs:
            yield pair.swapped(Provenance.BIT_REVERSED)

    return _emit(generate(), stats, False)


def dd_generate(pairs, fwd, bwd, *, spec=None, dedup=False, stats=None):
    """
    Data diversification: every original pair, followed by the forward
    models' translations of its source (``DD_FWD``) and the backward
    models' translations of its target (``DD_BWD``).

    Without dedup, ``N`` pairs become ``(1 + len(fwd) + len(bwd)) * N``
    minus records whose translation failed.

    :param fwd: A :class:`bitextkit.translators.Translator` (source to
        target) or a list of them.
    :param bwd: Target to source translator(s).
    :param spec: :class:`bitextkit.translators.DecodeSpec` for both
        directions.
    :param bool dedup: Drop pairs with a repeated
        :func:`bitextkit.preprocess.dedup_key`.
    :param stats: An :class:`AugmentStats` to fill.
    """
    forward = _as_list(fwd)
    backward = _as_list(bwd)

    def generate():
        for pair in pairs:
            yield pair
            for translator in forward:
                try:
                    hyp = translator.one_best(pair.src, spec)
                except TranslationError as error:
                    if stats is not None:
                        stats.skip(pair.src.text, error)
                    continue
                yield SentencePair(
                    pair.src, Sentence(hyp, pair.tgt.lang), Provenance.DD_FWD
                )
            for translator in backward:
                try:
                    hyp = translator.one_best(pair.tgt, spec)
                except TranslationError as error:
                    if stats is not None:
                        stats.skip(pair.tgt.text, error)
                    continue
                yield SentencePair(
                    Sentence(hyp, pair.src.lang), pair.tgt, Provenance.DD_BWD
                )

    return _emit(generate(), stats, dedup)


def ft_generate(mono_src, teacher, sample_size, seed, *, spec=None, stats=None):
    """
    Forward translation: sample ``sample_size`` source sentences uniformly
    without replacement and pair each with the teacher's 1-best (``FT``).
    Output follows corpus order. Merging with authentic data is left to the
    caller (or to :func:`bitextkit.augment.at_schedule`).

    :param mono_src: Iterable of :class:`bitextkit.sentence.Sentence` or
        strings; it is materialized.
    :param teacher: Source to target translator.
    :param int sample_size: Number of sentences to sample.
    :param int seed: Sampling seed.

    :raises bitextkit.exc.ConfigurationError: if ``sample_size`` exceeds
        the corpus size.
    """
    sentences = [_sentence(s, teacher.src_lang) for s in mono_src]
    if not 0 <= sample_size <= len(sentences):
        raise ConfigurationError(
            "Can't sample %r sentences from a corpus of %d"
            % (sample_size, len(sentences))
        )
    rng = np.random.default_rng(seed)
    indices = np.sort(rng.choice(len(sentences), size=sample_size, replace=False))

    def generate():
        for index in indices:
            source = sentences[int(index)]
            try:
                hyp = teacher.one_best(source, spec)
            except TranslationError as error:
                if stats is not None:
                    stats.skip(source.text, error)
                continue
            yield SentencePair(
                source, Sentence(hyp, teacher.tgt_lang), Provenance.FT
            )

    return _emit(generate(), stats, False)


def _tag_source(text, tag):
    tokens = [t for t in text.split() if t != tag]
    return " ".join([tag] + tokens)


def bt_generate(
        mono_tgt,
        reverse,
        mode=DecodeMode.BEAM,
        tagged=False,
        tag=DEFAULT_SENTINEL,
        seed=0,
        *,
        width=DEFAULT_SENTINEL,
        temperature=DEFAULT_SENTINEL,
        stats=None
):
    """
    Back translation: translate target-side monolingual sentences with a
    reverse model to obtain synthetic sources.

    With ``tagged`` the synthetic source starts with ``tag`` (exactly one
    occurrence, any tag produced by the model is removed) and the provenance
    is ``BT_TAGGED``; otherwise it is ``BT_BEAM`` or ``BT_SAMPLING`` after
    the decoding mode::

        >>> reverse = DictTranslator({"aime": [("love", 1.0)]})
        >>> next(bt_generate(["aime"], reverse, tagged=True)).src.text
        '<BT> love'

    :param mono_tgt: Iterable of target sentences or strings.
    :param reverse: Target to source translator.
    :param mode: ``"beam"`` or ``"sampling"``.
    :param bool tagged: Prepend the tag.
    :param str tag: Tag token, default
        :attr:`bitextkit.translators.options.default_bt_tag`.
    :param int seed: Sampling seed (unused with beam search).
    :param int width: Beam width.
    :param float temperature: Sampling temperature.
    """
    mode = DecodeMode.parse(mode)
    if mode is DecodeMode.BEAM:
        spec = DecodeSpec(DecodeMode.BEAM, width)
        provenance = Provenance.BT_BEAM
    else:
        spec = DecodeSpec(DecodeMode.SAMPLING, 1, temperature, seed)
        provenance = Provenance.BT_SAMPLING
    if tagged:
        tag = resolve_option(tag, options.default_bt_tag)
        if not tag or any(c.isspace() for c in tag):
            raise ConfigurationError(
                "The back-translation tag must be a non-empty token, got %r" % tag
            )
        if tag not in tokenization.options.protected_tokens:
            logger.warning(
                "Back-translation tag %r is not a protected token; tokenizers "
                "and BPE may split it", tag,
            )
        provenance = Provenance.BT_TAGGED

    def generate():
        for item in mono_tgt:
            target = _sentence(item, reverse.src_lang)
            try:
                hyp = reverse.one_best(target, spec)
            except TranslationError as error:
                if stats is not None:
                    stats.skip(target.text, error)
                continue
            if tagged:
                hyp = _tag_source(hyp, tag)
            yield SentencePair(
                Sentence(hyp, reverse.tgt_lang), target, provenance
            )

    return _emit(generate(), stats, False)


def tel_build(test_sources, models, *, spec=None, dedup=False, stats=None):
    """
    Transductive ensemble data: every model's 1-best translation of every
    test source (``TEL``), model by model in source order.

    :param test_sources: Iterable of source sentences; materialized.
    :param models: Non-empty list of translators.
    :param bool dedup: Drop pairs with a repeated key.
    """
    models = _as_list(models)
    if not models:
        raise ConfigurationError("TEL needs at least one model")
    sources = [_sentence(s, models[0].src_lang) for s in test_sources]

    def generate():
        for model in models:
            for source in sources:
                try:
                    hyp = model.one_best(source, spec)
                except TranslationError as error:
                    if stats is not None:
                        stats.skip(source.text, error)
                    continue
                yield SentencePair(
                    source, Sentence(hyp, model.tgt_lang), Provenance.TEL
                )

    return _emit(generate(), stats, dedup)
