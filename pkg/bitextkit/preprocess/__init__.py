"""
The cleaning and filtering chain applied to parallel corpora before
training. Each step is a :class:`bitextkit.preprocess.base.Filter`; the
default order is:

1. ``dedup``: remove duplicate sentence pairs.
2. ``strip_invisible``: remove invisible characters, decode XML escapes.
3. ``normalize_width``: full-width symbols to half-width.
4. ``normalize_punct``: normalize punctuation.
5. ``t2s``: traditional to simplified Chinese.
6. ``lid``: drop sides in another language (needs a model).
7. ``alignment``: drop poorly aligned pairs (needs a translation table).
8. ``max_tokens``: drop pairs with a side longer than 150 tokens.
9. ``token_ratio``: drop pairs with a token ratio above 4 or below 0.25.

Steps which need a trained model are only part of a chain when configured.
The order is configurable::

    >>> from bitextkit.preprocess import filter_chain
    >>> stream, report = filter_chain(pairs, [
    ...     "dedup",
    ...     {"name": "max_tokens", "max_tokens": 100},
    ...     {"name": "lid", "model": "lid.json", "min_margin": 0.1},
    ... ])
    >>> kept = list(stream)
    >>> report.as_dict()["filters"][0]["dropped"]
    3

Splitting long monolingual sentences (:func:`split_long`) and subword
segmentation (:mod:`bitextkit.subword`) are not record filters and run
separately.
"""

__all__ = (
    "DEFAULT_FILTERS",
    "FILTER_TO_CLASS",
    "filter_chain",
    "get_filter_for_name",
    "options",
    "AlignmentFilter",
    "Dedup",
    "Filter",
    "FilterReport",
    "LidFilter",
    "LidModel",
    "MaxTokens",
    "Normalizer",
    "NormalizePunct",
    "NormalizeWidth",
    "StripInvisible",
    "T2SConvert",
    "TokenRatio",
    "TranslationTable",
    "align_score",
    "dedup",
    "dedup_key",
    "ibm1_train",
    "lid_classify",
    "lid_train",
    "load_t2s_mapping",
    "normalize_punct",
    "normalize_width",
    "split_long",
    "strip_invisible",
    "t2s_convert",
)

import os

import yaml

from bitextkit.exc import ConfigurationError, StageNotFound
from bitextkit.preprocess.alignment import (
    AlignmentFilter,
    TranslationTable,
    align_score,
    ibm1_train,
)
from bitextkit.preprocess.base import Filter, FilterReport, Normalizer, options
from bitextkit.preprocess.filters import (
    Dedup,
    MaxTokens,
    TokenRatio,
    dedup,
    dedup_key,
    split_long,
)
from bitextkit.preprocess.lid import LidFilter, LidModel, lid_classify, lid_train
from bitextkit.preprocess.normalize import (
    NormalizePunct,
    NormalizeWidth,
    StripInvisible,
    T2SConvert,
    load_t2s_mapping,
    normalize_punct,
    normalize_width,
    strip_invisible,
    t2s_convert,
)
from bitextkit.util import logger

FILTER_TO_CLASS = {
    "alignment": AlignmentFilter,
    "dedup": Dedup,
    "lid": LidFilter,
    "max_tokens": MaxTokens,
    "normalize_punct": NormalizePunct,
    "normalize_width": NormalizeWidth,
    "strip_invisible": StripInvisible,
    "t2s": T2SConvert,
    "token_ratio": TokenRatio,
}

#: Chain used when no configuration is given.
DEFAULT_FILTERS = (
    "dedup",
    "strip_invisible",
    "normalize_width",
    "normalize_punct",
    "t2s",
    "max_tokens",
    "token_ratio",
)

# Parameters holding file paths; relative ones are resolved against the
# directory of the YAML config they come from.
_PATH_PARAMS = ("mapping", "model", "table")


def get_filter_for_name(name):
    """
    For the name provided, try to return a filter class.

    >>> from bitextkit.preprocess import get_filter_for_name
    >>> get_filter_for_name("max_tokens")
    bitextkit.preprocess.filters.MaxTokens

    If the string given is not recognized, a
    :class:`bitextkit.exc.StageNotFound` exception is raised.
    """
    try:
        return FILTER_TO_CLASS[name.lower()]
    except (KeyError, AttributeError):
        raise StageNotFound(
            "Unknown filter '%s'; options are: %s"
            % (name, sorted(FILTER_TO_CLASS)),
            name=name,
        )


def _load_config(path):
    with open(path, encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as error:
            raise ConfigurationError("Can't parse filter config %s: %s" % (path, error))
    if isinstance(data, dict):
        data = data.get("filters")
    if not isinstance(data, list):
        raise ConfigurationError(
            "Filter config %s must be a list of filters or have a `filters` list"
            % path
        )
    return data, os.path.dirname(os.path.abspath(path))


def _build(entry, base_dir):
    if isinstance(entry, Filter):
        return entry.name, entry
    if isinstance(entry, str):
        entry = {"name": entry}
    if not isinstance(entry, dict) or "name" not in entry:
        raise ConfigurationError("Invalid filter entry: %r" % (entry,))
    params = dict(entry)
    name = params.pop("name")
    label = params.pop("label", None) or name
    cls = get_filter_for_name(name)
    if base_dir is not None:
        for key in _PATH_PARAMS:
            value = params.get(key)
            if isinstance(value, str) and not os.path.isabs(value):
                params[key] = os.path.join(base_dir, value)
    try:
        return label, cls(**params)
    except TypeError as error:
        raise ConfigurationError("Invalid parameters for filter %r: %s" % (name, error))


def _count_input(records, report):
    for pair in records:
        report.input += 1
        yield pair


def filter_chain(records, config=None, *, report=None, base_dir=None):
    """
    Run a stream of sentence pairs through an ordered chain of filters.

    :param records: Iterable of :class:`bitextkit.sentence.SentencePair`.

    :param config: ``None`` for :data:`DEFAULT_FILTERS`, a path to a YAML
        file, or a list whose items are filter names, dicts with a
        ``name`` key plus the filter's parameters (and optionally a
        ``label`` to tell two filters of the same kind apart), or
        :class:`bitextkit.preprocess.base.Filter` instances.

    :param report: A :class:`FilterReport` to fill, created if omitted.

    :param base_dir: Directory relative model and mapping paths of a list
        config are resolved against. For a YAML config it is the file's
        directory.

    :rtype: tuple
    :return: ``(stream, report)``. The stream is lazy; the report is
        complete once the stream is exhausted.
    """
    if config is None:
        config = DEFAULT_FILTERS
    elif isinstance(config, (str, os.PathLike)):
        config, base_dir = _load_config(config)
    chain = [_build(entry, base_dir) for entry in config]
    report = report if report is not None else FilterReport()
    for label, _ in chain:
        if label in report.entries:
            raise ConfigurationError(
                "Filter %r appears twice in the chain; give one a `label`"
                % label
            )
        report.register(label)
    logger.info("Filter chain: %s", ", ".join(label for label, _ in chain))
    stream = _count_input(records, report)
    for label, filter_ in chain:
        stream = filter_(stream, report, name=label)
    return stream, report
