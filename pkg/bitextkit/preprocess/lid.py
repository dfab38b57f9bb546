"""
Character n-gram Naive Bayes language identification.
"""

import collections
import json
import math

from bitextkit.exc import ClassificationError, ConfigurationError, RecordFormatError
from bitextkit.preprocess.base import Filter, options
from bitextkit.util import DEFAULT_SENTINEL, logger, resolve_option

__all__ = (
    "LidFilter",
    "LidModel",
    "char_ngrams",
    "lid_classify",
    "lid_train",
)

UNK = "<unk>"


def char_ngrams(text, order):
    """
    Character n-grams of ``text`` padded with one space on each side::

        >>> char_ngrams("ab", 3)
        [' ab', 'ab ']

    A padded text shorter than ``order`` is a single n-gram.
    """
    padded = " %s " % text
    if len(padded) <= order:
        return [padded]
    return [padded[i:i + order] for i in range(len(padded) - order + 1)]


class LidModel:
    """
    Per-language add-k smoothed character n-gram distributions.

    The event space is every n-gram seen in training (over all languages)
    plus an unknown-n-gram event, so each language's distribution sums to 1.
    N-grams outside the event space get the unknown event's probability;
    a probability of 0 (possible when ``k == 0``) is replaced by ``floor``.
    """

    def __init__(self, counts, *, order, k, floor):
        """
        :param dict counts: Language code to a mapping of n-gram counts.
        :param int order: n-gram order.
        :param float k: Add-k smoothing constant.
        :param float floor: Probability floor.
        """
        self.order = order
        self.k = k
        self.floor = floor
        self.counts = {
            lang: dict(sorted(c.items())) for lang, c in sorted(counts.items())
        }
        events = set()
        for c in self.counts.values():
            events.update(c)
        events.add(UNK)
        self.event_count = len(events)
        self.totals = {
            lang: sum(c.values()) for lang, c in self.counts.items()
        }

    @property
    def languages(self):
        return list(self.counts)

    def prob(self, lang, ngram):
        """
        Smoothed probability of ``ngram`` under ``lang`` (before flooring).
        """
        count = self.counts[lang].get(ngram, 0)
        denominator = self.totals[lang] + self.k * self.event_count
        return (count + self.k) / denominator

    def logprob(self, lang, text):
        total = 0.0
        for ngram in char_ngrams(text, self.order):
            total += math.log(max(self.prob(lang, ngram), self.floor))
        return total

    def scores(self, text):
        """
        Log-probability of ``text`` under every language, in language order.
        """
        if not text:
            raise ClassificationError("Can't identify the language of empty text")
        return [(lang, self.logprob(lang, text)) for lang in self.counts]

    def classify(self, text):
        """
        :rtype: tuple
        :return: ``(lang, margin)``; ``margin`` is the difference between
            the best and the second best log-probability, per character.
        """
        ranked = sorted(
            self.scores(text), key=lambda item: -item[1]
        )
        (best, best_lp), (_, second_lp) = ranked[0], ranked[1]
        return best, (best_lp - second_lp) / len(text)

    def as_dict(self):
        return {
            "format": "lid-v1",
            "order": self.order,
            "k": self.k,
            "floor": self.floor,
            "counts": self.counts,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            if data.get("format") != "lid-v1":
                raise ValueError("unknown format %r" % data.get("format"))
            return cls(
                data["counts"], order=int(data["order"]),
                k=float(data["k"]), floor=float(data["floor"]),
            )
        except (AttributeError, KeyError, TypeError, ValueError) as error:
            raise RecordFormatError("Invalid LID model: %s" % error)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.as_dict(), f, ensure_ascii=False, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            try:
                data = json.load(f)
            except ValueError as error:
                raise RecordFormatError("%s: %s" % (path, error))
        return cls.from_dict(data)

    def __eq__(self, other):
        return isinstance(other, LidModel) and self.as_dict() == other.as_dict()

    def __repr__(self):
        return "LidModel(languages=%r, order=%d)" % (self.languages, self.order)


def lid_train(
        samples,
        order=DEFAULT_SENTINEL,
        k=DEFAULT_SENTINEL,
        *,
        floor=DEFAULT_SENTINEL
):
    """
    Train a language identification model.

    :param dict samples: Language code to training text: a string or an
        iterable of strings (lines).

    :param int order: n-gram order, default
        :attr:`bitextkit.preprocess.options.default_lid_order`.

    :param float k: Add-k constant, default
        :attr:`bitextkit.preprocess.options.default_lid_k`.

    :param float floor: Probability floor, default
        :attr:`bitextkit.preprocess.options.default_lid_floor`.

    :rtype: :class:`LidModel`
    """
    order = resolve_option(order, options.default_lid_order)
    k = resolve_option(k, options.default_lid_k)
    floor = resolve_option(floor, options.default_lid_floor)
    if order < 1:
        raise ConfigurationError("LID n-gram order must be >= 1, got %r" % order)
    if k < 0:
        raise ConfigurationError("LID smoothing k must be >= 0, got %r" % k)
    if len(samples) < 2:
        raise ConfigurationError(
            "LID needs at least two languages, got %r" % sorted(samples)
        )
    counts = {}
    for lang, sample in samples.items():
        lines = [sample] if isinstance(sample, str) else sample
        counter = collections.Counter()
        for line in lines:
            line = str(line).strip()
            if line:
                counter.update(char_ngrams(line, order))
        if not counter:
            raise ConfigurationError("Empty LID training sample for %r" % lang)
        counts[lang] = counter
    model = LidModel(counts, order=order, k=k, floor=floor)
    logger.info(
        "Trained LID model: %d languages, %d n-gram events",
        len(counts), model.event_count,
    )
    return model


def lid_classify(model, text):
    """
    Most probable language of ``text`` and the per-character margin to
    the runner-up.

    :raises bitextkit.exc.ClassificationError: for empty text.
    """
    return model.classify(text)


def _primary(lang):
    return lang.split("-")[0].lower()


class LidFilter(Filter):
    """
    Drops pairs where a side is identified as another language than the one
    it is labelled with, or identified with a margin below ``min_margin``.
    Sides labelled with a language the model doesn't know are not checked.
    """

    name = "lid"

    def __init__(self, model, *, min_margin=DEFAULT_SENTINEL):
        if not isinstance(model, LidModel):
            model = LidModel.load(model)
        self.model = model
        self.min_margin = resolve_option(
            min_margin, options.default_lid_min_margin
        )
        self._languages = {_primary(lang): lang for lang in model.languages}

    def _side_ok(self, sentence):
        lang = self._languages.get(_primary(sentence.lang)) if sentence.lang else None
        if lang is None:
            return True
        try:
            predicted, margin = self.model.classify(sentence.text)
        except ClassificationError:
            return False
        return predicted == lang and margin >= self.min_margin

    def keep(self, pair):
        return self._side_ok(pair.src) and self._side_ok(pair.tgt)
