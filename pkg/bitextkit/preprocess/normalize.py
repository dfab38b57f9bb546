"""
Text normalizers of the cleaning chain.

Each function maps a string to a string; the matching
:class:`bitextkit.preprocess.base.Normalizer` classes apply them to both
sides of every pair.
"""

import os
import re
import unicodedata

from bitextkit.exc import ConfigurationError
from bitextkit.preprocess.base import Normalizer

__all__ = (
    "PUNCT_RULES",
    "DEFAULT_T2S_MAPPING",
    "NormalizePunct",
    "NormalizeWidth",
    "StripInvisible",
    "T2SConvert",
    "load_t2s_mapping",
    "normalize_punct",
    "normalize_width",
    "strip_invisible",
    "t2s_convert",
)

DEFAULT_T2S_MAPPING = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "t2s.tsv"
)

_XML_ESCAPE = re.compile(r"&(amp|lt|gt|quot|apos|#[0-9]+|#[xX][0-9a-fA-F]+);")
_XML_NAMED = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}
_KEPT_CONTROLS = frozenset("\n\t")


def _decode_escape(match):
    entity = match.group(1)
    if entity[0] != "#":
        return _XML_NAMED[entity]
    try:
        if entity[1] in "xX":
            codepoint = int(entity[2:], 16)
        else:
            codepoint = int(entity[1:])
        return chr(codepoint)
    except (ValueError, OverflowError):
        return match.group(0)


def strip_invisible(text):
    """
    Decode XML escapes once, then remove control (``Cc``, except newline and
    tab) and format (``Cf``) characters::

        >>> strip_invisible("a\\u200bb &amp;amp; c")
        'ab &amp; c'

    Decoding is a single pass, so ``&amp;amp;`` becomes ``&amp;`` and not
    ``&``.
    """
    if "&" in text:
        text = _XML_ESCAPE.sub(_decode_escape, text)
    if text.isascii() and text.isprintable():
        return text
    return "".join(
        c for c in text
        if c in _KEPT_CONTROLS or unicodedata.category(c) not in ("Cc", "Cf")
    )


_WIDTH_TABLE = {cp: cp - 0xFEE0 for cp in range(0xFF01, 0xFF5F)}
_WIDTH_TABLE[0x3000] = 0x20


def normalize_width(text):
    """
    Map full-width ASCII forms (U+FF01..U+FF5E) and the ideographic space
    to their half-width counterparts. CJK ideographs are untouched::

        >>> normalize_width("（ｘ）中文")
        '(x)中文'
    """
    if text.isascii():
        return text
    return text.translate(_WIDTH_TABLE)


#: Punctuation rules, applied in this order. A subset of the moses
#: punctuation normalizer covering quotes, dashes, ellipses and spaces.
PUNCT_RULES = (
    (re.compile("[\u00a0\u2007\u202f]"), " "),
    (re.compile("[\u201c\u201d\u201e\u201f\u00ab\u00bb]"), '"'),
    (re.compile("[\u2018\u2019\u201a\u201b]"), "'"),
    (re.compile("[\u2013\u2014]"), "-"),
    (re.compile("\u2026"), "..."),
    (re.compile(" {2,}"), " "),
)


def normalize_punct(text):
    """
    Apply :data:`PUNCT_RULES` in order::

        >>> normalize_punct("\\u201ca\\u201d \\u2014 b\\u00a0 c")
        '"a" - b c'
    """
    for pattern, replacement in PUNCT_RULES:
        text = pattern.sub(replacement, text)
    return text


def load_t2s_mapping(path=DEFAULT_T2S_MAPPING):
    """
    Load a traditional to simplified Chinese mapping: one ``trad<TAB>simp``
    codepoint pair per line. Empty lines and lines starting with ``#`` are
    ignored.

    :raises bitextkit.exc.ConfigurationError: on a malformed line.
    :rtype: dict
    """
    mapping = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) != 2 or len(columns[0]) != 1 or len(columns[1]) != 1:
                raise ConfigurationError(
                    "%s:%d: expected `trad<TAB>simp` codepoint pair, got %r"
                    % (path, lineno, line)
                )
            trad, simp = columns
            if mapping.get(trad, simp) != simp:
                raise ConfigurationError(
                    "%s:%d: %r is mapped twice" % (path, lineno, trad)
                )
            mapping[trad] = simp
    return mapping


def t2s_convert(text, mapping):
    """
    Replace every mapped codepoint; other characters are unchanged::

        >>> t2s_convert("中國", {"國": "国"})
        '中国'

    :param dict mapping: As returned by :func:`load_t2s_mapping`.
    """
    if not mapping or text.isascii():
        return text
    return text.translate({ord(k): v for k, v in mapping.items()})


class StripInvisible(Normalizer):
    name = "strip_invisible"

    def normalize(self, text):
        return strip_invisible(text)


class NormalizeWidth(Normalizer):
    name = "normalize_width"

    def normalize(self, text):
        return normalize_width(text)


class NormalizePunct(Normalizer):
    name = "normalize_punct"

    def normalize(self, text):
        return normalize_punct(text)


class T2SConvert(Normalizer):
    """
    Traditional to simplified conversion. Only sides whose language is in
    ``langs`` are converted; with ``langs=None`` both sides are.
    """

    name = "t2s"

    def __init__(self, *, mapping=DEFAULT_T2S_MAPPING, langs=("zh",)):
        """
        :param mapping: A dict or a path to a mapping file.

        :param langs: Language codes (primary subtags) to convert,
            or ``None`` for all.
        """
        if not isinstance(mapping, dict):
            mapping = load_t2s_mapping(mapping)
        self.mapping = mapping
        self._table = {ord(k): v for k, v in mapping.items()}
        self.langs = None if langs is None else frozenset(langs)

    def normalize(self, text):
        if not self._table or text.isascii():
            return text
        return text.translate(self._table)

    def _applies(self, sentence):
        return (
            self.langs is None or
            sentence.lang.split("-")[0].lower() in self.langs
        )

    def transform(self, pair):
        src = self.normalize(pair.src.text) if self._applies(pair.src) else None
        tgt = self.normalize(pair.tgt.text) if self._applies(pair.tgt) else None
        if src in (None, pair.src.text) and tgt in (None, pair.tgt.text):
            return pair
        return type(pair)(
            pair.src.text if src is None else src,
            pair.tgt.text if tgt is None else tgt,
            pair.provenance, pair.scores,
            src_lang=pair.src.lang, tgt_lang=pair.tgt.lang,
        )
