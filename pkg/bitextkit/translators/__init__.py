"""
Translators produce n-best lists for source sentences; scorers assign
log-probabilities to sentence pairs; quality estimators score pairs without
a reference.

Augmentation and curriculum code only relies on these interfaces, so a real
NMT model is plugged in by subclassing :class:`Translator` or
:class:`Scorer`. The implementations shipped here are small deterministic
models: a word-by-word lexicon translator, add-k n-gram language models and
an IBM Model 1 channel scorer.

To translate with a lexicon::

    >>> from bitextkit.translators import DictTranslator, DecodeSpec
    >>> translator = DictTranslator({"a": [("x", 0.9), ("y", 0.1)]})
    >>> translator.translate("a a", DecodeSpec.beam(4), n=2).texts()
    ['x x', 'x y']

Sampling is seeded; the random stream only depends on the seed and the
source text, so results don't change with corpus order or sharding::

    >>> spec = DecodeSpec.sampling(1, seed=13)
    >>> translator.one_best("a a", spec) == translator.one_best("a a", spec)
    True
"""

__all__ = (
    "get_translator_for_name",
    "options",
    "ChannelScorer",
    "DecodeMode",
    "DecodeSpec",
    "DictTranslator",
    "IdentityTranslator",
    "LanguageModelScorer",
    "LengthRatioQE",
    "NgramLM",
    "QualityEstimator",
    "Scorer",
    "StoredScoreQE",
    "Translator",
    "channel_scorer",
    "dict_translate",
    "lm_logprob",
    "lm_train",
    "load_lexicon",
)

from bitextkit.exc import TranslatorNotFound
from bitextkit.translators.base import (
    DecodeMode,
    DecodeSpec,
    Scorer,
    Translator,
    options,
)
from bitextkit.translators.channel import ChannelScorer, channel_scorer
from bitextkit.translators.lexicon import (
    DictTranslator,
    IdentityTranslator,
    dict_translate,
    load_lexicon,
)
from bitextkit.translators.lm import (
    LanguageModelScorer,
    NgramLM,
    lm_logprob,
    lm_train,
)
from bitextkit.translators.qe import LengthRatioQE, QualityEstimator, StoredScoreQE

NAME_TO_TRANSLATOR = {
    "identity": IdentityTranslator,
    "lexicon": DictTranslator,
}


def get_translator_for_name(name):
    """
    For the name provided, try to return a translator class.

    >>> from bitextkit.translators import get_translator_for_name
    >>> get_translator_for_name("lexicon")
    bitextkit.translators.lexicon.DictTranslator

    If the string given is not recognized, a
    :class:`bitextkit.exc.TranslatorNotFound` exception is raised.
    """
    try:
        return NAME_TO_TRANSLATOR[name.lower()]
    except (KeyError, AttributeError):
        raise TranslatorNotFound(
            "Unknown translator '%s'; options are: %s"
            % (name, sorted(NAME_TO_TRANSLATOR))
        )
