"""
Evaluation and training numerics: corpus BLEU over tokenized text, KL
divergence, the R-Drop consistency regularizer and label-smoothed
cross-entropy.

BLEU is computed on the corpus tokenization, so scores are comparable
within this toolkit only.
"""

import collections
import enum
import math

import numpy as np

from bitextkit.exc import InputError
from bitextkit.sentence import Sentence

__all__ = (
    "BleuResult",
    "Smoothing",
    "bleu",
    "bleu_stats",
    "kl",
    "kl_bidirectional",
    "label_smoothed_ce",
    "rdrop_loss",
    "rdrop_reg",
)

#: Floor of probabilities inside logarithms.
PROB_FLOOR = 1e-12

#: Probability vectors must sum to 1 within this tolerance.
PROB_TOLERANCE = 1e-9

DEFAULT_RDROP_ALPHA = 5.0
DEFAULT_LABEL_SMOOTHING = 0.1


class Smoothing(enum.Enum):
    NONE = "none"
    ADD1 = "add1"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InputError("Unknown smoothing %r; options are: none, add1" % (value,))


BleuResult = collections.namedtuple(
    "BleuResult", "score brevity_penalty precisions hyp_len ref_len"
)


def _tokens(item):
    if isinstance(item, Sentence):
        return item.tokens
    if isinstance(item, str):
        return Sentence(item).tokens
    return tuple(item)


def _ngrams(tokens, n):
    return collections.Counter(
        tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1)
    )


def bleu_stats(hypotheses, references, max_n=4, smoothing=Smoothing.NONE):
    """
    Corpus BLEU with its components.

    Orders for which the hypotheses contain no n-gram at all are left out
    of the geometric mean (their precision is ``None``). ``ADD1`` smoothing
    adds one to the matches and totals of orders 2 and up.

    :param hypotheses: Token lists (or strings, tokenized with the default
        tokenizer).
    :param references: One reference per hypothesis.
    :param int max_n: Highest n-gram order.
    :param smoothing: :class:`Smoothing` or its name.
    :rtype: :class:`BleuResult`
    """
    smoothing = Smoothing.parse(smoothing)
    hypotheses = [_tokens(h) for h in hypotheses]
    references = [_tokens(r) for r in references]
    if len(hypotheses) != len(references):
        raise InputError(
            "%d hypotheses for %d references" % (len(hypotheses), len(references))
        )
    if not hypotheses:
        raise InputError("BLEU needs at least one hypothesis")
    if max_n < 1:
        raise InputError("max_n must be >= 1, got %r" % max_n)

    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            hyp_counts = _ngrams(hyp, n)
            ref_counts = _ngrams(ref, n)
            matches[n - 1] += sum(
                min(count, ref_counts[gram]) for gram, count in hyp_counts.items()
            )
            totals[n - 1] += max(len(hyp) - n + 1, 0)

    precisions = []
    for n in range(1, max_n + 1):
        m, t = matches[n - 1], totals[n - 1]
        if not t:
            precisions.append(None)
        elif smoothing is Smoothing.ADD1 and n >= 2:
            precisions.append((m + 1) / (t + 1))
        else:
            precisions.append(m / t)

    if hyp_len == 0:
        brevity_penalty = 0.0
    elif hyp_len < ref_len:
        brevity_penalty = math.exp(1.0 - ref_len / hyp_len)
    else:
        brevity_penalty = 1.0

    effective = [p for p in precisions if p is not None]
    if not effective or min(effective) == 0.0 or brevity_penalty == 0.0:
        score = 0.0
    else:
        log_mean = math.fsum(math.log(p) for p in effective) / len(effective)
        score = 100.0 * brevity_penalty * math.exp(log_mean)
    return BleuResult(score, brevity_penalty, precisions, hyp_len, ref_len)


def bleu(hypotheses, references, max_n=4, smoothing=Smoothing.NONE):
    """
    Corpus BLEU in ``[0, 100]``::

        >>> round(bleu([["the", "cat", "sat"]],
        ...            [["the", "cat", "sat", "on", "mat"]], max_n=3), 2)
        51.34
    """
    return bleu_stats(hypotheses, references, max_n, smoothing).score


def _prob_vector(p, name="p"):
    vector = np.asarray(p, dtype=float)
    if vector.ndim != 1 or not vector.size:
        raise InputError("%s must be a non-empty vector" % name)
    if not np.all(np.isfinite(vector)) or np.any(vector < 0):
        raise InputError("%s has negative or non-finite entries" % name)
    if abs(vector.sum() - 1.0) > PROB_TOLERANCE:
        raise InputError("%s sums to %r, not 1" % (name, float(vector.sum())))
    return vector


def _prob_pair(p, q):
    p, q = _prob_vector(p, "p"), _prob_vector(q, "q")
    if p.shape != q.shape:
        raise InputError("Dimension mismatch: %d vs %d" % (p.size, q.size))
    return p, q


def _kl(p, q):
    support = p > 0
    return float(
        np.sum(p[support] * np.log(p[support] / np.maximum(q[support], PROB_FLOOR)))
    )


def kl(p, q):
    """
    ``KL(p || q) = sum_i p_i ln(p_i / q_i)``, with ``0 ln 0 = 0`` and
    ``q`` floored at ``1e-12`` where ``p > 0``.
    """
    p, q = _prob_pair(p, q)
    return max(_kl(p, q), 0.0)


def kl_bidirectional(p, q):
    """
    ``KL(p || q) + KL(q || p)``::

        >>> round(kl_bidirectional([0.5, 0.5], [0.25, 0.75]), 4)
        0.2747
    """
    p, q = _prob_pair(p, q)
    return max(_kl(p, q), 0.0) + max(_kl(q, p), 0.0)


def rdrop_reg(p, q, alpha=DEFAULT_RDROP_ALPHA):
    """
    R-Drop consistency term ``alpha / 2 * (KL(p || q) + KL(q || p))`` between
    the output distributions of two forward passes.
    """
    return alpha / 2.0 * kl_bidirectional(p, q)


def label_smoothed_ce(p_model, target, epsilon=DEFAULT_LABEL_SMOOTHING):
    """
    ``-(1 - eps) ln p[target] - eps / V * sum_v ln p[v]``.

    With ``epsilon=0`` this is the negative log-likelihood.
    """
    p = _prob_vector(p_model, "p_model")
    if not 0.0 <= epsilon < 1.0:
        raise InputError("epsilon must be in [0, 1), got %r" % epsilon)
    if not 0 <= int(target) < p.size:
        raise InputError("Target %r out of range for %d classes" % (target, p.size))
    log_p = np.log(np.maximum(p, PROB_FLOOR))
    nll = -log_p[int(target)]
    if not epsilon:
        return float(nll)
    smooth = -log_p.sum() / p.size
    return float((1.0 - epsilon) * nll + epsilon * smooth)


def rdrop_loss(p_first, p_second, targets, epsilon=DEFAULT_LABEL_SMOOTHING,
               alpha=DEFAULT_RDROP_ALPHA):
    """
    Per-token mean of the R-Drop training objective: label-smoothed
    cross-entropy of both passes plus the consistency term.

    :param p_first: ``T x V`` output distributions of the first pass.
    :param p_second: ``T x V`` distributions of the second pass.
    :param targets: ``T`` gold indices.
    """
    first = np.asarray(p_first, dtype=float)
    second = np.asarray(p_second, dtype=float)
    targets = list(targets)
    if first.ndim != 2 or first.shape != second.shape:
        raise InputError(
            "Expected two T x V arrays, got %r and %r" % (first.shape, second.shape)
        )
    if len(targets) != first.shape[0] or not targets:
        raise InputError(
            "%d targets for %d positions" % (len(targets), first.shape[0])
        )
    total = 0.0
    for p, q, target in zip(first, second, targets):
        total += (
            label_smoothed_ce(p, target, epsilon) +
            label_smoothed_ce(q, target, epsilon) +
            rdrop_reg(p, q, alpha)
        )
    return total / len(targets)
