"""
Reference-free quality estimators. A quality estimator maps a sentence pair
to a score, higher meaning a better translation.
"""

import math

from bitextkit.exc import ScoreError

__all__ = (
    "LengthRatioQE",
    "QualityEstimator",
    "StoredScoreQE",
)


class QualityEstimator:
    """
    Template object for quality estimators.
    """

    def score(self, pair):
        raise NotImplementedError()

    def __call__(self, pair):
        return self.score(pair)

    def __repr__(self):
        return "%s()" % type(self).__name__


class LengthRatioQE(QualityEstimator):
    """
    A stand-in estimator: ``clamp(1 - |log(|src| / |tgt|)|, 0, 1)`` over
    token counts. Equal lengths score 1; pairs with an empty side score 0.
    """

    def score(self, pair):
        src_len, tgt_len = len(pair.src), len(pair.tgt)
        if not src_len or not tgt_len:
            return 0.0
        value = 1.0 - abs(math.log(src_len / tgt_len))
        return min(1.0, max(0.0, value))


class StoredScoreQE(QualityEstimator):
    """
    Reads a precomputed score (e.g. from an external QE model) from
    ``pair.scores[key]``.
    """

    def __init__(self, key="qe"):
        self.key = key

    def score(self, pair):
        try:
            return pair.scores[self.key]
        except KeyError:
            raise ScoreError(
                "Pair has no %r score: %r" % (self.key, pair)
            )

    def __repr__(self):
        return "StoredScoreQE(%r)" % self.key
