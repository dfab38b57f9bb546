"""
:class:`.Sentence`, :class:`.SentencePair` and :class:`.NBestList` data
structures shared by every pipeline stage.
"""

import collections
import enum
import math
import types
import unicodedata

from bitextkit import tokenization
from bitextkit.exc import RecordError

__all__ = (
    "Hypothesis",
    "NBestList",
    "Provenance",
    "Sentence",
    "SentencePair",
)


class Provenance(enum.Enum):
    """
    Where a sentence pair comes from. Everything except ``AUTHENTIC`` is
    synthetic, i.e. produced by a model.
    """

    AUTHENTIC = "AUTHENTIC"
    FT = "FT"
    BT_BEAM = "BT_BEAM"
    BT_SAMPLING = "BT_SAMPLING"
    BT_TAGGED = "BT_TAGGED"
    DD_FWD = "DD_FWD"
    DD_BWD = "DD_BWD"
    BIT_REVERSED = "BIT_REVERSED"
    TEL = "TEL"

    @classmethod
    def parse(cls, value):
        """
        Accept a :class:`Provenance` or its (case-insensitive) name.

        :raises ValueError: for unknown names.
        """
        if isinstance(value, cls):
            return value
        try:
            return cls[str(value).strip().upper()]
        except KeyError:
            raise ValueError("Unknown provenance %r" % (value,))

    @property
    def is_synthetic(self):
        return self is not Provenance.AUTHENTIC


class Sentence:
    """
    A sentence in a language.

    The text is NFC-normalized and stripped of surrounding whitespace on
    construction. Tokens are computed on first access with the tokenizer
    configured for ``lang`` (see :mod:`bitextkit.tokenization`) and cached::

        >>> s = Sentence("hello  world", "en")
        >>> s.tokens
        ('hello', 'world')
        >>> len(s)
        2

    Sentences are immutable and compare equal when both text and language
    are equal.
    """

    __slots__ = ("_text", "_lang", "_tokens")

    def __init__(self, text, lang=""):
        """
        :param str text: Sentence text.
        :param str lang: Language code, e.g. ``"en"`` or ``"zh"``. May be
            empty when unknown.
        """
        if isinstance(text, Sentence):
            lang = lang or text.lang
            text = text.text
        if not isinstance(text, str):
            raise TypeError("`text` must be a string, got %r" % type(text))
        text = text.strip()
        if not text.isascii() and not unicodedata.is_normalized("NFC", text):
            text = unicodedata.normalize("NFC", text)
        self._text = text
        self._lang = lang or ""
        self._tokens = None

    @classmethod
    def from_tokens(cls, tokens, lang=""):
        """
        Build a sentence by joining tokens with the language's tokenizer.
        """
        tokenizer = tokenization.tokenizer_for_lang(lang)
        return cls(tokenizer.detokenize(list(tokens)), lang)

    @property
    def text(self):
        """
        :rtype: str
        """
        return self._text

    @property
    def lang(self):
        """
        :rtype: str
        """
        return self._lang

    @property
    def tokens(self):
        """
        Tokens of the sentence; empty iff the text is empty.

        :rtype: tuple
        """
        if self._tokens is None:
            tokenizer = tokenization.tokenizer_for_lang(self._lang)
            self._tokens = tuple(tokenizer.tokenize(self._text))
        return self._tokens

    def __len__(self):
        return len(self.tokens)

    def __bool__(self):
        return bool(self._text)

    def __str__(self):
        return self._text

    def __repr__(self):
        return "Sentence(%r, %r)" % (self._text, self._lang)

    def __getstate__(self):
        return self._text, self._lang

    def __setstate__(self, state):
        self._text, self._lang = state
        self._tokens = None

    def __eq__(self, other):
        return (
            isinstance(other, Sentence) and
            self._text == other._text and
            self._lang == other._lang
        )

    def __ne__(self, other):
        return not (self == other)

    def __hash__(self):
        return hash((self._text, self._lang))


def _coerce_sentence(value, lang):
    if isinstance(value, Sentence):
        if lang and not value.lang:
            return Sentence(value.text, lang)
        return value
    return Sentence(value, lang or "")


class SentencePair:
    """
    One bilingual record: a source and a target :class:`.Sentence`,
    a :class:`.Provenance` tag and a mapping of named scores.

    Sides may be given as strings::

        >>> pair = SentencePair("hello", "你好", src_lang="en", tgt_lang="zh")
        >>> pair.provenance
        <Provenance.AUTHENTIC: 'AUTHENTIC'>

    Pairs are immutable; :meth:`with_scores` and :meth:`swapped` return
    new pairs.
    """

    __slots__ = ("_src", "_tgt", "_provenance", "_scores")

    def __init__(
            self,
            src,
            tgt,
            provenance=Provenance.AUTHENTIC,
            scores=None,
            *,
            src_lang=None,
            tgt_lang=None
    ):
        """
        :param src: Source sentence.
        :type src: :class:`.Sentence` or str

        :param tgt: Target sentence.
        :type tgt: :class:`.Sentence` or str

        :param provenance: Provenance tag or its name.

        :param dict scores: Score name to real number.

        :param str src_lang: Language of ``src`` when given as a string.

        :param str tgt_lang: Language of ``tgt`` when given as a string.
        """
        self._src = _coerce_sentence(src, src_lang)
        self._tgt = _coerce_sentence(tgt, tgt_lang)
        self._provenance = Provenance.parse(provenance)
        self._scores = types.MappingProxyType(
            {str(k): float(v) for k, v in (scores or {}).items()}
        )
        if self._provenance is Provenance.AUTHENTIC:
            head = self._src.text.split(" ", 1)[0]
            if head in tokenization.options.protected_tokens:
                raise RecordError(
                    "Authentic pair carries the synthetic source tag %r: %r"
                    % (head, self._src.text)
                )

    @property
    def src(self):
        """
        :rtype: :class:`.Sentence`
        """
        return self._src

    @property
    def tgt(self):
        """
        :rtype: :class:`.Sentence`
        """
        return self._tgt

    @property
    def provenance(self):
        """
        :rtype: :class:`.Provenance`
        """
        return self._provenance

    @property
    def scores(self):
        """
        Read-only mapping of score names to values.
        """
        return self._scores

    def with_scores(self, **scores):
        """
        Copy of the pair with ``scores`` added (existing keys are replaced).
        """
        merged = dict(self._scores)
        merged.update(scores)
        return SentencePair(self._src, self._tgt, self._provenance, merged)

    def with_provenance(self, provenance):
        return SentencePair(self._src, self._tgt, provenance, self._scores)

    def swapped(self, provenance):
        """
        Direction-reversed copy (target becomes source). Scores are dropped,
        because they were computed for the original direction.
        """
        return SentencePair(self._tgt, self._src, provenance)

    def __repr__(self):
        return "SentencePair(%r, %r, %s)" % (
            self._src.text, self._tgt.text, self._provenance.name
        )

    def __getstate__(self):
        return self._src, self._tgt, self._provenance, dict(self._scores)

    def __setstate__(self, state):
        self._src, self._tgt, self._provenance, scores = state
        self._scores = types.MappingProxyType(scores)

    def __eq__(self, other):
        return (
            isinstance(other, SentencePair) and
            self._src == other._src and
            self._tgt == other._tgt and
            self._provenance is other._provenance and
            dict(self._scores) == dict(other._scores)
        )

    def __ne__(self, other):
        return not (self == other)

    def __hash__(self):
        return hash((self._src, self._tgt, self._provenance))


Hypothesis = collections.namedtuple("Hypothesis", "text logprob rank")


class NBestList:
    """
    Ranked translation hypotheses of a source sentence.

    Hypotheses given as ``(text, logprob)`` are sorted by non-increasing
    log-probability (ties keep input order) and ranked from 1::

        >>> nbest = NBestList(Sentence("a"), [("y", -2.3), ("x", -0.1)])
        >>> [h.rank for h in nbest], nbest.best.text
        ([1, 2], 'x')

    Hypotheses given with ranks must already be consistent: ranks
    1..n in order of non-increasing log-probability.
    """

    __slots__ = ("_source", "_hypotheses")

    def __init__(self, source, hypotheses, *, max_size=None):
        """
        :param source: Source sentence.
        :type source: :class:`.Sentence` or str

        :param hypotheses: ``(text, logprob)`` or ``(text, logprob, rank)``
            items.

        :param int max_size: Beam size; more hypotheses raise
            :class:`bitextkit.exc.RecordError`.
        """
        self._source = _coerce_sentence(source, "")
        items = [tuple(h) for h in hypotheses]
        if not items:
            raise RecordError("An n-best list needs at least one hypothesis")
        if max_size is not None and len(items) > max_size:
            raise RecordError(
                "%d hypotheses exceed the beam size %d" % (len(items), max_size)
            )
        for item in items:
            if not math.isfinite(float(item[1])):
                raise RecordError("Non-finite hypothesis logprob: %r" % (item,))
        if all(len(item) == 3 for item in items):
            ranked = sorted(items, key=lambda h: int(h[2]))
            hyps = tuple(
                Hypothesis(str(t), float(lp), int(r)) for t, lp, r in ranked
            )
            if [h.rank for h in hyps] != list(range(1, len(hyps) + 1)):
                raise RecordError("Hypothesis ranks must be 1..n: %r" % (hyps,))
            if any(a.logprob < b.logprob for a, b in zip(hyps, hyps[1:])):
                raise RecordError(
                    "Hypotheses must be sorted by non-increasing logprob"
                )
        else:
            ordered = sorted(
                enumerate(items), key=lambda ih: (-float(ih[1][1]), ih[0])
            )
            hyps = tuple(
                Hypothesis(str(item[0]), float(item[1]), rank)
                for rank, (_, item) in enumerate(ordered, start=1)
            )
        self._hypotheses = hyps

    @property
    def source(self):
        """
        :rtype: :class:`.Sentence`
        """
        return self._source

    @property
    def hypotheses(self):
        """
        :rtype: tuple of :class:`.Hypothesis`
        """
        return self._hypotheses

    @property
    def best(self):
        """
        The rank-1 hypothesis.
        """
        return self._hypotheses[0]

    def texts(self):
        return [h.text for h in self._hypotheses]

    def __len__(self):
        return len(self._hypotheses)

    def __iter__(self):
        return iter(self._hypotheses)

    def __getitem__(self, index):
        return self._hypotheses[index]

    def __repr__(self):
        return "NBestList(%r, %r)" % (self._source.text, list(self._hypotheses))

    def __getstate__(self):
        return self._source, self._hypotheses

    def __setstate__(self, state):
        self._source, self._hypotheses = state

    def __eq__(self, other):
        return (
            isinstance(other, NBestList) and
            self._source == other._source and
            self._hypotheses == other._hypotheses
        )

    def __ne__(self, other):
        return not (self == other)
