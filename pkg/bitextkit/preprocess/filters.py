import hashlib
import unicodedata

from bitextkit import tokenization
from bitextkit.exc import ConfigurationError
from bitextkit.preprocess.base import Filter, options
from bitextkit.preprocess.normalize import normalize_width
from bitextkit.sentence import Sentence
from bitextkit.util import DEFAULT_SENTINEL, resolve_option

__all__ = (
    "SENTENCE_FINAL",
    "Dedup",
    "MaxTokens",
    "TokenRatio",
    "dedup",
    "dedup_key",
    "split_long",
)

KEY_SEPARATOR = "\x1f"

#: Tokens ending with one of these close a sentence for :func:`split_long`.
SENTENCE_FINAL = (".", "!", "?", "。", "！", "？")


def _key_text(text):
    return unicodedata.normalize("NFC", normalize_width(text))


def dedup_key(pair):
    """
    Deduplication key of a pair: a digest of both sides after width
    normalization and NFC, so ``("Ａ", "b")`` and ``("A", "b")`` collide.

    :rtype: bytes
    """
    key = _key_text(pair.src.text) + KEY_SEPARATOR + _key_text(pair.tgt.text)
    return hashlib.blake2b(key.encode("utf-8"), digest_size=16).digest()


class Dedup(Filter):
    """
    Keeps the first occurrence of every :func:`dedup_key`.

    Every stream returned by a call tracks its own seen keys, starting
    when it is first iterated, so sharded runs must put equal keys in
    the same shard. :meth:`keep` checks single pairs against keys kept
    by earlier :meth:`keep` calls on the instance.
    """

    name = "dedup"

    def __init__(self):
        self._seen = set()

    def keep(self, pair):
        key = dedup_key(pair)
        if key in self._seen:
            return False
        self._seen.add(key)
        return True

    def __call__(self, records, report=None, *, name=None):
        name = name or self.name
        seen = set()
        for pair in records:
            key = dedup_key(pair)
            if key in seen:
                if report is not None:
                    report.dropped(name, pair)
                continue
            seen.add(key)
            if report is not None:
                report.kept(name)
            yield pair


def dedup(records, report=None):
    """
    Drop repeated pairs, keeping first occurrences in input order.
    """
    return Dedup()(records, report)


class MaxTokens(Filter):
    """
    Drops pairs with more than ``max_tokens`` tokens on either side.
    """

    name = "max_tokens"

    def __init__(self, *, max_tokens=DEFAULT_SENTINEL):
        self.max_tokens = resolve_option(max_tokens, options.default_max_tokens)
        if self.max_tokens < 1:
            raise ConfigurationError(
                "max_tokens must be >= 1, got %r" % self.max_tokens
            )

    def keep(self, pair):
        return (
            len(pair.src) <= self.max_tokens and
            len(pair.tgt) <= self.max_tokens
        )


class TokenRatio(Filter):
    """
    Drops pairs whose source/target token ratio is strictly above
    ``ratio_hi`` or strictly below ``ratio_lo``, and pairs with an
    empty side.
    """

    name = "token_ratio"

    def __init__(self, *, ratio_lo=DEFAULT_SENTINEL, ratio_hi=DEFAULT_SENTINEL):
        self.ratio_lo = resolve_option(ratio_lo, options.default_ratio_lo)
        self.ratio_hi = resolve_option(ratio_hi, options.default_ratio_hi)
        if not 0 <= self.ratio_lo <= self.ratio_hi:
            raise ConfigurationError(
                "Invalid token ratio bounds: lo=%r, hi=%r"
                % (self.ratio_lo, self.ratio_hi)
            )

    def keep(self, pair):
        src_len, tgt_len = len(pair.src), len(pair.tgt)
        if not src_len or not tgt_len:
            return False
        ratio = src_len / tgt_len
        return self.ratio_lo <= ratio <= self.ratio_hi


def _is_sentence_final(token):
    return token.endswith(SENTENCE_FINAL)


def _split_tokens(tokens, max_len):
    start = 0
    while len(tokens) - start > max_len:
        window = tokens[start:start + max_len]
        cut = max_len
        for i in range(len(window) - 1, -1, -1):
            if _is_sentence_final(window[i]):
                cut = i + 1
                break
        yield window[:cut]
        start += cut
    if start < len(tokens):
        yield tokens[start:]


def split_long(sentences, max_len):
    """
    Split sentences longer than ``max_len`` tokens.

    A long sentence is cut after the last sentence-final token (one ending
    with ``. ! ? 。 ！ ？``) within the first ``max_len`` tokens, or after
    exactly ``max_len`` tokens if there is none; the rest is split the same
    way::

        >>> [s.text for s in split_long(["a b . c d"], 3)]
        ['a b .', 'c d']

    :param sentences: Iterable of :class:`bitextkit.sentence.Sentence` or
        strings.

    :param int max_len: Maximum segment length in tokens.
    """
    if max_len < 1:
        raise ConfigurationError("max_len must be >= 1, got %r" % max_len)
    for sentence in sentences:
        if not isinstance(sentence, Sentence):
            sentence = Sentence(sentence)
        tokens = sentence.tokens
        if len(tokens) <= max_len:
            if tokens:
                yield sentence
            continue
        tokenizer = tokenization.tokenizer_for_lang(sentence.lang)
        for segment in _split_tokens(tokens, max_len):
            yield Sentence(tokenizer.detokenize(segment), sentence.lang)
