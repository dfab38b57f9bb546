"""
Joint byte-pair encoding.

Words are split into characters followed by the word-final marker
:data:`END_OF_WORD`; learning repeatedly merges the most frequent adjacent
symbol pair, with word counts pooled over every corpus given (source and
target), so both languages share one merge table::

    >>> model = bpe_learn([["ab", "ab", "abc"]], 1)
    >>> model.merges
    [('a', 'b')]
    >>> bpe_apply(model, ["ab", "xyz"])
    ['ab</w>', 'x', 'y', 'z</w>']
    >>> bpe_decode(['ab</w>', 'x', 'y', 'z</w>'])
    ['ab', 'xyz']

Protected tokens (:attr:`bitextkit.tokenization.options.protected_tokens`)
are never split or merged.
"""

import collections
import hashlib
import heapq

from bitextkit import tokenization
from bitextkit.exc import ConfigurationError, DecodeError, RecordFormatError
from bitextkit.sentence import Sentence
from bitextkit.util import logger

__all__ = (
    "END_OF_WORD",
    "BpeModel",
    "bpe_apply",
    "bpe_apply_text",
    "bpe_decode",
    "bpe_decode_text",
    "bpe_learn",
)

END_OF_WORD = "</w>"

FILE_MAGIC = "bpe-v1"


def _protected(protected):
    if protected is None:
        return tokenization.options.protected_tokens
    return frozenset(protected)


class BpeModel:
    """
    An ordered list of merges. Merge ``i`` has rank ``i``; lower ranks are
    applied first.
    """

    def __init__(self, merges, vocab=None):
        """
        :param merges: ``(left, right)`` symbol pairs in learning order.

        :param vocab: Symbol set. Defaults to every symbol mentioned by
            the merges, their concatenations and :data:`END_OF_WORD`.
        """
        self.merges = [tuple(m) for m in merges]
        self.ranks = {}
        for rank, merge in enumerate(self.merges):
            if len(merge) != 2 or not all(merge):
                raise ConfigurationError("Invalid merge %r" % (merge,))
            if merge in self.ranks:
                raise ConfigurationError("Duplicate merge %r" % (merge,))
            self.ranks[merge] = rank
        if vocab is None:
            vocab = {END_OF_WORD}
            for left, right in self.merges:
                vocab.update((left, right, left + right))
        self.vocab = frozenset(vocab)
        self._cache = {}

    def segment(self, word):
        """
        Subword pieces of a single word; the last piece carries
        :data:`END_OF_WORD`.
        """
        pieces = self._cache.get(word)
        if pieces is not None:
            return pieces
        symbols = list(word) + [END_OF_WORD]
        ranks = self.ranks
        while len(symbols) > 1:
            best = None
            for pair in zip(symbols, symbols[1:]):
                rank = ranks.get(pair)
                if rank is not None and (best is None or rank < best[0]):
                    best = (rank, pair)
            if best is None:
                break
            left, right = best[1]
            merged = []
            i = 0
            while i < len(symbols):
                if (i < len(symbols) - 1 and symbols[i] == left
                        and symbols[i + 1] == right):
                    merged.append(left + right)
                    i += 2
                else:
                    merged.append(symbols[i])
                    i += 1
            symbols = merged
        if symbols[-1] == END_OF_WORD and len(symbols) > 1:
            symbols[-2:] = [symbols[-2] + END_OF_WORD]
        pieces = tuple(symbols)
        self._cache[word] = pieces
        return pieces

    def dumps(self):
        """
        Model file text: a ``bpe-v1 <num_merges> <num_symbols>`` header,
        one ``left right`` line per merge, then the symbols, sorted, one
        per line.
        """
        symbols = sorted(self.vocab)
        lines = ["%s %d %d" % (FILE_MAGIC, len(self.merges), len(symbols))]
        lines.extend("%s %s" % merge for merge in self.merges)
        lines.extend(symbols)
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text):
        """
        Parse :meth:`dumps` output. A header without a symbol count is
        accepted; the vocabulary is then derived from the merges.
        """
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise RecordFormatError("Empty BPE model file")
        header = lines[0].split(" ")
        if (len(header) not in (2, 3) or header[0] != FILE_MAGIC
                or not all(field.isdigit() for field in header[1:])):
            raise RecordFormatError(
                "Invalid BPE model header %r" % lines[0], line_numbers=[1]
            )
        num_merges = int(header[1])
        num_symbols = int(header[2]) if len(header) == 3 else 0
        if len(lines) - 1 != num_merges + num_symbols:
            raise RecordFormatError(
                "BPE header announces %d merges and %d symbols, file has %d lines"
                % (num_merges, num_symbols, len(lines) - 1)
            )
        merges = []
        for lineno, line in enumerate(lines[1:num_merges + 1], start=2):
            parts = line.split(" ")
            if len(parts) != 2 or not all(parts):
                raise RecordFormatError(
                    "Invalid merge line %d: %r" % (lineno, line),
                    line_numbers=[lineno],
                )
            merges.append(tuple(parts))
        vocab = None
        if len(header) == 3:
            vocab = set()
            for lineno, line in enumerate(lines[num_merges + 1:],
                                          start=num_merges + 2):
                if not line or " " in line or line in vocab:
                    raise RecordFormatError(
                        "Invalid symbol line %d: %r" % (lineno, line),
                        line_numbers=[lineno],
                    )
                vocab.add(line)
        try:
            return cls(merges, vocab)
        except ConfigurationError as error:
            raise RecordFormatError(str(error))

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.dumps())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8", newline="\n") as f:
            return cls.loads(f.read())

    def digest(self):
        """
        sha256 of :meth:`dumps`; equal for models with the same merges
        and symbols.
        """
        return hashlib.sha256(self.dumps().encode("utf-8")).hexdigest()

    def __len__(self):
        return len(self.merges)

    def __eq__(self, other):
        return (
            isinstance(other, BpeModel) and self.merges == other.merges
            and self.vocab == other.vocab
        )

    def __ne__(self, other):
        return not (self == other)

    def __repr__(self):
        return "BpeModel(%d merges)" % len(self.merges)


def _iter_tokens(item):
    if isinstance(item, Sentence):
        return item.tokens
    if isinstance(item, str):
        return Sentence(item).tokens
    return item


def _pairs(symbols):
    return zip(symbols, symbols[1:])


def bpe_learn(corpora, num_merges, *, min_frequency=2, protected=None):
    """
    Learn a joint BPE model.

    Ties between equally frequent pairs go to the lexicographically
    smallest ``(left, right)``. Learning stops early when no pair occurs at
    least ``min_frequency`` times.

    :param corpora: A list of corpora; each is an iterable of token lists,
        :class:`bitextkit.sentence.Sentence` objects or strings.

    :param int num_merges: Maximum number of merges.

    :param int min_frequency: Minimum count of a merged pair.

    :param protected: Tokens excluded from learning.

    :rtype: :class:`BpeModel`
    """
    if num_merges < 0:
        raise ConfigurationError("num_merges must be >= 0, got %r" % num_merges)
    protected = _protected(protected)
    word_counts = collections.Counter()
    for corpus in corpora:
        for item in corpus:
            for token in _iter_tokens(item):
                if token not in protected:
                    word_counts[token] += 1
    if not word_counts:
        raise ConfigurationError("Can't learn BPE from an empty corpus")

    words = []
    freqs = []
    vocab = {END_OF_WORD}
    for word in sorted(word_counts):
        words.append(list(word) + [END_OF_WORD])
        freqs.append(word_counts[word])
        vocab.update(word)

    stats = collections.Counter()
    index = collections.defaultdict(set)
    for wid, (symbols, freq) in enumerate(zip(words, freqs)):
        for pair in _pairs(symbols):
            stats[pair] += freq
            index[pair].add(wid)
    heap = [(-count, pair) for pair, count in stats.items()]
    heapq.heapify(heap)

    merges = []
    while len(merges) < num_merges and heap:
        neg_count, pair = heapq.heappop(heap)
        if stats.get(pair, 0) != -neg_count:
            continue
        if -neg_count < min_frequency:
            break
        left, right = pair
        new_symbol = left + right
        merges.append(pair)
        vocab.add(new_symbol)
        changed = set()
        for wid in sorted(index[pair]):
            symbols = words[wid]
            freq = freqs[wid]
            for old in _pairs(symbols):
                stats[old] -= freq
                changed.add(old)
            merged = []
            i = 0
            while i < len(symbols):
                if (i < len(symbols) - 1 and symbols[i] == left
                        and symbols[i + 1] == right):
                    merged.append(new_symbol)
                    i += 2
                else:
                    merged.append(symbols[i])
                    i += 1
            words[wid] = merged
            for new in _pairs(merged):
                stats[new] += freq
                index[new].add(wid)
                changed.add(new)
        del index[pair]
        for p in changed:
            count = stats[p]
            if count > 0:
                heapq.heappush(heap, (-count, p))
            else:
                del stats[p]
    if len(merges) < num_merges:
        logger.info(
            "BPE stopped after %d of %d merges (min_frequency=%d)",
            len(merges), num_merges, min_frequency,
        )
    else:
        logger.info("Learned %d BPE merges", len(merges))
    return BpeModel(merges, vocab)


def bpe_apply(model, tokens, *, protected=None):
    """
    Segment a token list into subwords.

    :param model: :class:`BpeModel`.
    :param tokens: Word tokens.
    :rtype: list
    """
    protected = _protected(protected)
    out = []
    for token in tokens:
        if token in protected:
            out.append(token)
        else:
            out.extend(model.segment(token))
    return out


def bpe_decode(subwords, *, protected=None):
    """
    Join subwords back into words: pieces accumulate until one ending with
    :data:`END_OF_WORD`.

    :raises bitextkit.exc.DecodeError: on an empty piece, a bare marker, a
        protected token inside a word, or trailing pieces without a marker.
    """
    protected = _protected(protected)
    words = []
    current = []
    for piece in subwords:
        if piece in protected:
            if current:
                raise DecodeError(
                    "Protected token %r inside a word: %r" % (piece, current)
                )
            words.append(piece)
            continue
        if not piece or piece == END_OF_WORD:
            raise DecodeError("Invalid subword %r" % (piece,))
        if piece.endswith(END_OF_WORD):
            current.append(piece[:-len(END_OF_WORD)])
            words.append("".join(current))
            current = []
        else:
            current.append(piece)
    if current:
        raise DecodeError(
            "Subwords %r are not terminated by %r" % (current, END_OF_WORD)
        )
    return words


def bpe_apply_text(model, text, lang=""):
    """
    Segment a sentence and join the subwords with spaces.
    """
    tokens = text.tokens if isinstance(text, Sentence) else Sentence(text, lang).tokens
    return " ".join(bpe_apply(model, tokens))


def bpe_decode_text(text, lang=""):
    """
    Inverse of :func:`bpe_apply_text`, rejoined with the language's
    tokenizer.
    """
    words = bpe_decode(text.split())
    return tokenization.tokenizer_for_lang(lang).detokenize(words)
