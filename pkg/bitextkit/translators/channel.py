import math

from bitextkit.preprocess.alignment import TranslationTable
from bitextkit.sentence import Sentence
from bitextkit.translators.base import Scorer
from bitextkit.translators.lm import NgramLM

__all__ = (
    "ChannelScorer",
    "channel_scorer",
)


class ChannelScorer(Scorer):
    """
    Noisy-channel style pair score: for every target token, the best
    lexical translation probability from the source (IBM Model 1 table,
    NULL included) plus the target language model probability given the
    preceding target tokens::

        logprob(x, y) = sum_j [log max_i t(y_j | x_i) + log P_lm(y_j | y_<j)]

    The end of sentence is not scored. Both terms are floored.
    """

    def __init__(self, table, lm):
        """
        :param table: :class:`bitextkit.preprocess.TranslationTable` or a
            path to one.
        :param lm: :class:`bitextkit.translators.lm.NgramLM` or a path to one.
        """
        if not isinstance(table, TranslationTable):
            table = TranslationTable.load(table)
        if not isinstance(lm, NgramLM):
            lm = NgramLM.load(lm)
        self.table = table
        self.lm = lm

    def logprob(self, src, tgt):
        tokens = self._target_tokens(tgt)
        if not isinstance(src, Sentence):
            src = Sentence(src)
        sources = src.tokens
        lexical = [self.table.best_logprob(f, sources) for f in tokens]
        language = self.lm.token_logprobs(tokens, eos=False)
        return math.fsum(lexical) + math.fsum(language)

    def __repr__(self):
        return "ChannelScorer(%r, %r)" % (self.table, self.lm)


def channel_scorer(table, lm):
    """
    :rtype: :class:`ChannelScorer`
    """
    return ChannelScorer(table, lm)
