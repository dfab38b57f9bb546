"""
Tokenizers split sentence text into the tokens every length, ratio and
subword computation counts.

Space-delimited languages are split on whitespace. CJK text has no
word delimiters, so each CJK codepoint is a token of its own (this stands
in for a dictionary-based word segmenter). The default ``"auto"`` tokenizer
does both, so mixed text like ``"我爱 NLP"`` becomes
``["我", "爱", "NLP"]``::

    >>> from bitextkit.tokenization import get_tokenizer
    >>> get_tokenizer("auto").tokenize("我爱 NLP")
    ['我', '爱', 'NLP']

Protected tokens (e.g. the back-translation tag ``<BT>``) are never split.

The tokenizer of a language is chosen through
:attr:`bitextkit.tokenization.options.language_tokenizers`, and the choice is
recorded in pipeline manifests, so token ratios are reproducible.
"""

from bitextkit.exc import ConfigurationError

__all__ = (
    "CharTokenizer",
    "MixedTokenizer",
    "WhitespaceTokenizer",
    "get_tokenizer",
    "is_cjk",
    "options",
    "tokenizer_for_lang",
)

_CJK_RANGES = (
    (0x2E80, 0x2FDF),  # radicals
    (0x3000, 0x303F),  # CJK symbols and punctuation
    (0x3040, 0x30FF),  # hiragana, katakana
    (0x3100, 0x31BF),  # bopomofo
    (0x3400, 0x4DBF),  # extension A
    (0x4E00, 0x9FFF),  # unified ideographs
    (0xF900, 0xFAFF),  # compatibility ideographs
    (0xFF00, 0xFFEF),  # halfwidth and fullwidth forms
    (0x20000, 0x3134F),  # extensions B..G
)


def is_cjk(char):
    """
    Whether a single character is tokenized as a CJK codepoint.
    """
    cp = ord(char)
    if cp < 0x2E80:
        return False
    for lo, hi in _CJK_RANGES:
        if lo <= cp <= hi:
            return True
    return False


class options:
    """The `options` object contains default configuration values for
    tokenization.

    Attributes:
        default_tokenizer
            Name of the tokenizer used for languages missing from
            :attr:`language_tokenizers`. One of ``"auto"``, ``"whitespace"``
            and ``"char"``.

        language_tokenizers
            A dict mapping a language code (e.g. ``"zh"``) to a tokenizer
            name. Empty by default: the ``"auto"`` tokenizer handles both
            space-delimited and CJK text.

        protected_tokens
            Tokens which are never split by tokenizers and never merged
            by BPE. Contains the default back-translation tag.
    """

    default_tokenizer = "auto"
    language_tokenizers = {}
    protected_tokens = frozenset({"<BT>"})


class Tokenizer:
    """
    Template object for tokenizers.
    """

    name = None

    def __init__(self, *, protected=None):
        """
        :param protected: Tokens which must be kept intact. Defaults to
            :attr:`bitextkit.tokenization.options.protected_tokens`.
        """
        self.protected = frozenset(
            options.protected_tokens if protected is None else protected
        )

    def tokenize(self, text):
        raise NotImplementedError()

    def detokenize(self, tokens):
        """
        Join tokens back into text. For text in canonical form (single
        spaces, as produced by the normalizers) this is the inverse of
        :meth:`tokenize`.
        """
        return " ".join(tokens)

    def __repr__(self):
        return "%s()" % type(self).__name__


class WhitespaceTokenizer(Tokenizer):
    """Splits on runs of whitespace."""

    name = "whitespace"

    def tokenize(self, text):
        return text.split()


class CharTokenizer(Tokenizer):
    """One token per non-space codepoint, protected tokens excepted."""

    name = "char"

    def tokenize(self, text):
        tokens = []
        for chunk in text.split():
            if chunk in self.protected:
                tokens.append(chunk)
            else:
                tokens.extend(chunk)
        return tokens

    def detokenize(self, tokens):
        out = []
        for token in tokens:
            if token in self.protected:
                out.append(token + " ")
            else:
                out.append(token)
        return "".join(out).rstrip(" ")


class MixedTokenizer(Tokenizer):
    """Whitespace split, then every CJK codepoint becomes its own token."""

    name = "auto"

    def tokenize(self, text):
        if text.isascii():
            return text.split()
        tokens = []
        for chunk in text.split():
            if chunk in self.protected or chunk.isascii():
                tokens.append(chunk)
                continue
            run = []
            for char in chunk:
                if is_cjk(char):
                    if run:
                        tokens.append("".join(run))
                        run = []
                    tokens.append(char)
                else:
                    run.append(char)
            if run:
                tokens.append("".join(run))
        return tokens

    def detokenize(self, tokens):
        out = []
        prev_cjk = False
        for i, token in enumerate(tokens):
            cur_cjk = len(token) == 1 and is_cjk(token)
            if i and not (prev_cjk and cur_cjk):
                out.append(" ")
            out.append(token)
            prev_cjk = cur_cjk
        return "".join(out)


TOKENIZERS = {
    "auto": MixedTokenizer,
    "char": CharTokenizer,
    "whitespace": WhitespaceTokenizer,
}

_cache = {}


def get_tokenizer(name, *, protected=None):
    """
    Return a tokenizer instance by its name.

    If the string given is not recognized, a
    :class:`bitextkit.exc.ConfigurationError` exception is raised.
    """
    try:
        cls = TOKENIZERS[name.lower()]
    except (KeyError, AttributeError):
        raise ConfigurationError(
            "Unknown tokenizer '%s'; options are: %s"
            % (name, sorted(TOKENIZERS))
        )
    if protected is not None:
        return cls(protected=protected)
    key = (cls, frozenset(options.protected_tokens))
    tokenizer = _cache.get(key)
    if tokenizer is None:
        tokenizer = _cache[key] = cls()
    return tokenizer


def tokenizer_for_lang(lang):
    """
    Tokenizer configured for a language code. The primary subtag is used
    as a fallback, so ``"zh-Hant"`` picks up a tokenizer set for ``"zh"``.
    """
    table = options.language_tokenizers
    name = table.get(lang)
    if name is None and lang:
        name = table.get(lang.split("-")[0].lower())
    return get_tokenizer(name or options.default_tokenizer)
