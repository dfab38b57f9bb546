"""
Word-by-word lexicon translators.

A :class:`DictTranslator` maps every source token independently to one of
its lexicon entries (no reordering); tokens missing from the lexicon are
copied through with probability 1. Because positions are independent,
beam search of width ``w`` returns exactly the ``w`` most probable
translations.
"""

import math

import numpy as np

from bitextkit import tokenization
from bitextkit.exc import ConfigurationError
from bitextkit.sentence import NBestList
from bitextkit.translators.base import (
    DecodeMode,
    Translator,
    source_digest,
)

__all__ = (
    "DictTranslator",
    "IdentityTranslator",
    "dict_translate",
    "load_lexicon",
)

# Lexicon rows must sum to 1 within this tolerance.
ROW_TOLERANCE = 1e-9


def load_lexicon(path):
    """
    Read a lexicon file of ``src<TAB>tgt<TAB>prob`` lines.

    :raises bitextkit.exc.ConfigurationError: on malformed lines or rows
        not summing to 1.
    :rtype: dict
    """
    lexicon = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            try:
                src, tgt, prob = line.split("\t")
                prob = float(prob)
            except ValueError:
                raise ConfigurationError(
                    "%s:%d: expected `src<TAB>tgt<TAB>prob`, got %r"
                    % (path, lineno, line)
                )
            lexicon.setdefault(src, []).append((tgt, prob))
    return _validate(lexicon)


def _validate(lexicon):
    rows = {}
    for src, entries in lexicon.items():
        entries = [(str(tgt), float(prob)) for tgt, prob in entries]
        if not entries:
            raise ConfigurationError("Empty lexicon row for %r" % src)
        for tgt, prob in entries:
            if not tgt or any(c.isspace() for c in tgt):
                raise ConfigurationError(
                    "Lexicon target for %r must be a single token, got %r"
                    % (src, tgt)
                )
            if not 0.0 < prob <= 1.0:
                raise ConfigurationError(
                    "Lexicon probability of %r -> %r out of (0, 1]: %r"
                    % (src, tgt, prob)
                )
        total = math.fsum(prob for _, prob in entries)
        if abs(total - 1.0) > ROW_TOLERANCE:
            raise ConfigurationError(
                "Lexicon row for %r sums to %r, not 1" % (src, total)
            )
        # Most probable first; equal probabilities keep file order.
        order = sorted(range(len(entries)), key=lambda i: -entries[i][1])
        rows[src] = tuple(entries[i] for i in order)
    return rows


class DictTranslator(Translator):
    """
    Lexicon-based word-by-word translator::

        >>> t = DictTranslator({"a": [("x", 0.9), ("y", 0.1)]})
        >>> [(h.text, round(h.logprob, 4)) for h in t.translate("a", n=2)]
        [('x', -0.1054), ('y', -2.3026)]
    """

    def __init__(self, lexicon=None, *, src_lang="", tgt_lang=""):
        """
        :param lexicon: A dict mapping source tokens to lists of
            ``(target token, probability)``, or a path to a lexicon file.
            Each row must sum to 1.

        :param str src_lang: Language of the sources.

        :param str tgt_lang: Language of the hypotheses.
        """
        super().__init__(src_lang=src_lang, tgt_lang=tgt_lang)
        if lexicon is None:
            lexicon = {}
        elif not isinstance(lexicon, dict):
            lexicon = load_lexicon(lexicon)
        self.lexicon = _validate(lexicon)

    def _options(self, token):
        entries = self.lexicon.get(token)
        if entries is None:
            return ((token, 1.0),)
        return entries

    def _detokenize(self, tokens):
        return tokenization.tokenizer_for_lang(self.tgt_lang).detokenize(tokens)

    def _beam(self, tokens, width):
        # (logprob, option indices, target tokens)
        beam = [(0.0, (), ())]
        for token in tokens:
            entries = self._options(token)
            candidates = [
                (lp + math.log(prob), idx + (i,), out + (tgt,))
                for lp, idx, out in beam
                for i, (tgt, prob) in enumerate(entries)
            ]
            candidates.sort(key=lambda c: (-c[0], c[1]))
            beam = candidates[:width]
        return [(self._detokenize(out), lp) for lp, _, out in beam]

    def _sample(self, tokens, spec):
        rng = np.random.default_rng(
            np.random.SeedSequence([spec.seed, source_digest(" ".join(tokens))])
        )
        draws = []
        logprobs = np.zeros(spec.width)
        for token in tokens:
            entries = self._options(token)
            probs = np.array([prob for _, prob in entries], dtype=float)
            scaled = probs ** (1.0 / spec.temperature)
            scaled /= scaled.sum()
            choice = rng.choice(len(entries), size=spec.width, p=scaled)
            draws.append(choice)
            logprobs += np.log(probs[choice])
        samples = []
        seen = set()
        for s in range(spec.width):
            out = [
                self._options(token)[int(column[s])][0]
                for token, column in zip(tokens, draws)
            ]
            text = self._detokenize(out)
            if text not in seen:
                seen.add(text)
                samples.append((text, float(logprobs[s])))
        return samples

    def translate(self, source, spec=None, n=1):
        source, spec = self._coerce(source, spec, n)
        tokens = source.tokens
        if spec.mode is DecodeMode.BEAM:
            hypotheses = self._beam(tokens, spec.width)
        else:
            hypotheses = self._sample(tokens, spec)
        hypotheses = sorted(
            enumerate(hypotheses), key=lambda ih: (-ih[1][1], ih[0])
        )[:n]
        return NBestList(source, [h for _, h in hypotheses])


class IdentityTranslator(DictTranslator):
    """
    Copies every source token; the single hypothesis has log-probability 0.
    """

    def __init__(self, *, src_lang="", tgt_lang=""):
        super().__init__({}, src_lang=src_lang, tgt_lang=tgt_lang)


def dict_translate(lexicon, source, spec=None, n=1):
    """
    Translate ``source`` with a :class:`DictTranslator` over ``lexicon``.
    """
    translator = lexicon if isinstance(lexicon, DictTranslator) else DictTranslator(lexicon)
    return translator.translate(source, spec, n)
