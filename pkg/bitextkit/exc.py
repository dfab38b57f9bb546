"""
Exceptions raised by bitextkit.
"""


class BitextError(Exception):
    """
    bitextkit-specific exceptions are all inherited from BitextError.
    """


class ConfigurationError(BitextError, ValueError):
    """
    The arguments given to an operation, or the contents of a config,
    mapping or lexicon file, were invalid. See the documentation of each
    operation for its accepted parameters.
    """


class StageNotFound(ConfigurationError):
    """
    A pipeline config or a filter chain named a stage or a filter which
    doesn't exist, e.g. ``"frobnicate"``.

    Exception of this type has a ``name`` attribute with the unknown name.
    """

    def __init__(self, message, *, name=None):
        super().__init__(message)
        self.name = name


class TranslatorNotFound(ConfigurationError):
    """
    Caller requested the translator matching a string, e.g.,
    ``"lexicon"`` > ``DictTranslator``, but no translator could be found.
    """


class RecordFormatError(BitextError, ValueError):
    """
    A corpus, score or model file could not be parsed.

    Exception of this type has a ``line_numbers`` attribute listing
    (1-based) the offending lines, possibly truncated.
    """

    def __init__(self, message, *, line_numbers=()):
        super().__init__(message)
        self.line_numbers = tuple(line_numbers)


class RecordError(BitextError, ValueError):
    """
    A record doesn't satisfy the precondition of an operation, e.g. a
    sentence pair with an empty side passed to bidirectional reconstruction.
    """


class ScoreError(BitextError, ValueError):
    """
    A sentence pair can't be scored, most often because one of its sides
    is empty.
    """


class ClassificationError(BitextError, ValueError):
    """
    Language identification was requested for a text it can't classify
    (an empty string).
    """


class DecodeError(BitextError, ValueError):
    """
    A subword sequence doesn't follow the word-final marker convention
    and can't be joined back into words.
    """


class TemplateError(BitextError, ValueError):
    """
    A prompt template is missing a required placeholder or uses
    an unknown one.
    """


class InputError(BitextError, ValueError):
    """
    Inputs of a metric are inconsistent: mismatched lengths or dimensions,
    or something which is not a probability distribution.
    """


class TranslationError(BitextError):
    """
    A translator failed to translate a single record. Augmentation
    operations skip (and count) such records instead of aborting.
    """


class StageError(BitextError):
    """
    A pipeline stage failed. The original exception is chained as
    ``__cause__``; the failed stage name is in the ``stage`` attribute.
    """

    def __init__(self, message, *, stage=None):
        super().__init__(message)
        self.stage = stage
