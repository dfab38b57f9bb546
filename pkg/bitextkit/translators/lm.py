"""
Add-k smoothed n-gram language models.
"""

import collections
import json
import math

from bitextkit.exc import ConfigurationError, RecordFormatError
from bitextkit.sentence import Sentence
from bitextkit.translators.base import Scorer, options
from bitextkit.util import DEFAULT_SENTINEL, logger, resolve_option

__all__ = (
    "BOS",
    "EOS",
    "UNK",
    "LanguageModelScorer",
    "NgramLM",
    "lm_logprob",
    "lm_train",
)

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"


def _tokens(item):
    if isinstance(item, Sentence):
        return item.tokens
    if isinstance(item, str):
        return Sentence(item).tokens
    return tuple(item)


class NgramLM:
    """
    An n-gram model with add-k smoothing:

    ``P(w | h) = (c(h, w) + k) / (c(h) + k |V|)``

    where ``V`` is the training vocabulary plus :data:`UNK` (and
    :data:`EOS` for ``order >= 2``). Histories are padded with
    :data:`BOS`; unseen histories give the uniform distribution
    (``k > 0``) or the floor probability (``k == 0``).

    A unigram model predicts no end of sentence, so with the corpus
    ``a a b`` and ``k = 1`` ``P(a) = 3 / 6``.
    """

    def __init__(self, order, k, counts, vocab, *, floor=DEFAULT_SENTINEL):
        """
        :param int order: n-gram order.
        :param float k: Add-k constant.
        :param dict counts: ``{history tuple: {word: count}}``.
        :param vocab: Predictable tokens, :data:`UNK` included.
        """
        self.order = order
        self.k = k
        self.counts = counts
        self.vocab = frozenset(vocab)
        self.floor = resolve_option(floor, options.default_floor)
        self.history_totals = {h: sum(row.values()) for h, row in counts.items()}

    def prob(self, word, history=()):
        """
        ``P(word | history)``; only the last ``order - 1`` history tokens
        are used and out-of-vocabulary words are :data:`UNK`.
        """
        if word not in self.vocab:
            word = UNK
        history = self._history(history)
        total = self.history_totals.get(history, 0)
        denominator = total + self.k * len(self.vocab)
        if denominator == 0:
            return 0.0
        row = self.counts.get(history, {})
        return (row.get(word, 0) + self.k) / denominator

    def _history(self, history):
        size = self.order - 1
        if not size:
            return ()
        history = tuple(history)[-size:]
        history = tuple(h if h in self.vocab or h == BOS else UNK for h in history)
        return (BOS,) * (size - len(history)) + history

    def token_logprobs(self, tokens, *, eos=True):
        """
        Floored log-probability of every token given its history, plus the
        end of sentence when ``eos`` is set and the order is at least 2.
        """
        tokens = list(tokens)
        out = []
        for i, word in enumerate(tokens):
            out.append(math.log(max(self.prob(word, tokens[:i]), self.floor)))
        if eos and self.order >= 2:
            out.append(math.log(max(self.prob(EOS, tokens), self.floor)))
        return out

    def logprob(self, sentence):
        """
        Natural-log probability of a sentence (tokens, text or
        :class:`bitextkit.sentence.Sentence`).
        """
        return math.fsum(self.token_logprobs(_tokens(sentence)))

    def perplexity(self, corpus):
        total = 0.0
        events = 0
        for item in corpus:
            lps = self.token_logprobs(_tokens(item))
            total += math.fsum(lps)
            events += len(lps)
        if not events:
            raise ConfigurationError("Can't compute perplexity of an empty corpus")
        return math.exp(-total / events)

    def as_dict(self):
        return {
            "format": "ngram-v1",
            "order": self.order,
            "k": self.k,
            "vocab": sorted(self.vocab),
            "counts": [
                [list(history), word, count]
                for history in sorted(self.counts)
                for word, count in sorted(self.counts[history].items())
            ],
        }

    @classmethod
    def from_dict(cls, data, **kwargs):
        try:
            if data.get("format") != "ngram-v1":
                raise ValueError("unknown format %r" % data.get("format"))
            counts = collections.defaultdict(dict)
            for history, word, count in data["counts"]:
                counts[tuple(history)][word] = int(count)
            return cls(
                int(data["order"]), float(data["k"]), dict(counts),
                data["vocab"], **kwargs
            )
        except (AttributeError, KeyError, TypeError, ValueError) as error:
            raise RecordFormatError("Invalid n-gram model: %s" % error)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.as_dict(), f, ensure_ascii=False)
            f.write("\n")

    @classmethod
    def load(cls, path, **kwargs):
        with open(path, encoding="utf-8") as f:
            try:
                data = json.load(f)
            except ValueError as error:
                raise RecordFormatError("%s: %s" % (path, error))
        return cls.from_dict(data, **kwargs)

    def __eq__(self, other):
        return isinstance(other, NgramLM) and self.as_dict() == other.as_dict()

    def __repr__(self):
        return "NgramLM(order=%d, k=%r, vocab=%d)" % (
            self.order, self.k, len(self.vocab)
        )


def lm_train(corpus, order=3, k=1.0, *, floor=DEFAULT_SENTINEL):
    """
    Train an :class:`NgramLM`.

    :param corpus: Iterable of token lists, strings or
        :class:`bitextkit.sentence.Sentence` objects. Empty sentences are
        ignored.
    :param int order: n-gram order, at least 1.
    :param float k: Add-k constant, at least 0.
    """
    if order < 1:
        raise ConfigurationError("LM order must be >= 1, got %r" % order)
    if k < 0:
        raise ConfigurationError("LM smoothing k must be >= 0, got %r" % k)
    counts = collections.defaultdict(collections.Counter)
    vocab = {UNK}
    if order >= 2:
        vocab.add(EOS)
    sentences = 0
    for item in corpus:
        tokens = list(_tokens(item))
        if not tokens:
            continue
        sentences += 1
        vocab.update(tokens)
        padded = [BOS] * (order - 1) + tokens
        if order >= 2:
            padded.append(EOS)
        for i in range(order - 1, len(padded)):
            history = tuple(padded[i - order + 1:i])
            counts[history][padded[i]] += 1
    if not sentences:
        raise ConfigurationError("Can't train a language model on an empty corpus")
    logger.info(
        "Trained %d-gram LM on %d sentences, vocabulary %d",
        order, sentences, len(vocab),
    )
    return NgramLM(
        order, k, {h: dict(c) for h, c in counts.items()}, vocab, floor=floor
    )


def lm_logprob(lm, sentence):
    return lm.logprob(sentence)


class LanguageModelScorer(Scorer):
    """
    Scores a pair by the target-side language model alone; the source is
    ignored.
    """

    def __init__(self, lm):
        if not isinstance(lm, NgramLM):
            lm = NgramLM.load(lm)
        self.lm = lm

    def logprob(self, src, tgt):
        return math.fsum(self.lm.token_logprobs(self._target_tokens(tgt)))

    def __repr__(self):
        return "LanguageModelScorer(%r)" % (self.lm,)
