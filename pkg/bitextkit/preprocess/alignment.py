"""
IBM Model 1 lexical translation tables, used to score and filter poorly
aligned sentence pairs.

Source tokens ``e`` are the tokens of ``pair.src``; target tokens ``f`` are
the tokens of ``pair.tgt``. Every source sentence is extended with
:data:`NULL`.
"""

import collections
import math

from bitextkit.exc import ConfigurationError, RecordFormatError, ScoreError
from bitextkit.preprocess.base import Filter, options
from bitextkit.util import DEFAULT_SENTINEL, logger, resolve_option

__all__ = (
    "NULL",
    "AlignmentFilter",
    "TranslationTable",
    "align_score",
    "ibm1_train",
)

NULL = "<NULL>"


class TranslationTable:
    """
    Lexical translation probabilities ``t(f|e)``. For every source token
    ``e`` the row ``t(.|e)`` sums to 1.
    """

    def __init__(self, rows, *, floor=DEFAULT_SENTINEL, log_likelihoods=()):
        """
        :param dict rows: ``{e: {f: t(f|e)}}``.

        :param float floor: Probability used for unseen pairs, default
            :attr:`bitextkit.preprocess.options.default_ibm1_floor`.

        :param log_likelihoods: Corpus log-likelihoods recorded during
            training.
        """
        self.rows = rows
        self.floor = resolve_option(floor, options.default_ibm1_floor)
        self.log_likelihoods = tuple(log_likelihoods)

    @property
    def source_vocab(self):
        return set(self.rows)

    def prob(self, f, e):
        """
        ``t(f|e)``, 0 for unseen pairs.
        """
        row = self.rows.get(e)
        if row is None:
            return 0.0
        return row.get(f, 0.0)

    def best_logprob(self, f, sources):
        """
        ``log max_i t(f|e_i)`` over ``sources`` and :data:`NULL`, floored.
        """
        best = self.prob(f, NULL)
        for e in sources:
            p = self.prob(f, e)
            if p > best:
                best = p
        return math.log(max(best, self.floor))

    def dumps(self):
        """
        ``e<TAB>f<TAB>t`` lines, sorted.
        """
        return "".join(
            "%s\t%s\t%r\n" % (e, tgt, self.rows[e][tgt])
            for e in sorted(self.rows)
            for tgt in sorted(self.rows[e])
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.dumps())

    @classmethod
    def load(cls, path, **kwargs):
        rows = collections.defaultdict(dict)
        with open(path, encoding="utf-8", newline="\n") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.rstrip("\r\n")
                if not line:
                    continue
                try:
                    e, tgt, p = line.split("\t")
                    p = float(p)
                    if not 0.0 <= p <= 1.0:
                        raise ValueError("probability out of range")
                except ValueError as error:
                    raise RecordFormatError(
                        "%s:%d: %s" % (path, lineno, error),
                        line_numbers=[lineno],
                    )
                rows[e][tgt] = p
        return cls(dict(rows), **kwargs)

    def __eq__(self, other):
        return isinstance(other, TranslationTable) and self.rows == other.rows

    def __repr__(self):
        return "TranslationTable(%d source tokens)" % len(self.rows)


def _corpus(pairs):
    corpus = []
    skipped = 0
    for pair in pairs:
        src, tgt = pair.src.tokens, pair.tgt.tokens
        if not src or not tgt:
            skipped += 1
            continue
        corpus.append(((NULL,) + tuple(src), tuple(tgt)))
    if skipped:
        logger.warning("IBM Model 1: skipped %d pairs with an empty side", skipped)
    return corpus


def _log_likelihood(corpus, t):
    total = 0.0
    for sources, targets in corpus:
        norm = math.log(len(sources))
        for f in targets:
            p = sum(t[e].get(f, 0.0) for e in sources)
            total += math.log(p) - norm
    return total


def ibm1_train(pairs, iterations=DEFAULT_SENTINEL, *, floor=DEFAULT_SENTINEL):
    """
    Train IBM Model 1 with EM, starting from uniform ``t(f|e)``.

    The corpus log-likelihood ``sum_j log(sum_i t(f_j|e_i) / (l + 1))``
    under the parameters of every E-step, and under the final table, is
    kept in :attr:`TranslationTable.log_likelihoods`; EM makes it
    non-decreasing.

    :param pairs: Iterable of :class:`bitextkit.sentence.SentencePair`.
        Pairs with an empty side are skipped.

    :param int iterations: EM iterations, default
        :attr:`bitextkit.preprocess.options.default_ibm1_iterations`.

    :param float floor: Stored as the table's floor probability.

    :rtype: :class:`TranslationTable`
    """
    iterations = resolve_option(iterations, options.default_ibm1_iterations)
    if iterations < 1:
        raise ConfigurationError(
            "IBM Model 1 needs at least one EM iteration, got %r" % iterations
        )
    corpus = _corpus(pairs)
    if not corpus:
        raise ConfigurationError("Can't train IBM Model 1 on an empty corpus")

    target_vocab = {f for _, targets in corpus for f in targets}
    uniform = 1.0 / len(target_vocab)
    t = None
    log_likelihoods = []
    for iteration in range(iterations):
        counts = collections.defaultdict(lambda: collections.defaultdict(float))
        log_likelihood = 0.0
        for sources, targets in corpus:
            norm = math.log(len(sources))
            for f in targets:
                if t is None:
                    probs = [uniform] * len(sources)
                else:
                    probs = [t[e].get(f, 0.0) for e in sources]
                total = sum(probs)
                log_likelihood += math.log(total) - norm
                for e, p in zip(sources, probs):
                    counts[e][f] += p / total
        log_likelihoods.append(log_likelihood)
        t = {}
        for e, row in counts.items():
            row_total = sum(row.values())
            t[e] = {f: c / row_total for f, c in row.items()}
        logger.info(
            "IBM Model 1 iteration %d: log-likelihood %.6f",
            iteration + 1, log_likelihood,
        )
    log_likelihoods.append(_log_likelihood(corpus, t))
    rows = {e: dict(sorted(t[e].items())) for e in sorted(t)}
    return TranslationTable(rows, floor=floor, log_likelihoods=log_likelihoods)


def align_score(table, pair):
    """
    Mean over target tokens of ``log max_i t(f_j|e_i)``, ``e_i`` ranging
    over the source tokens and :data:`NULL`. Higher means better aligned.

    :raises bitextkit.exc.ScoreError: if a side is empty.
    """
    src, tgt = pair.src.tokens, pair.tgt.tokens
    if not src or not tgt:
        raise ScoreError("Can't align a pair with an empty side: %r" % (pair,))
    return sum(table.best_logprob(f, src) for f in tgt) / len(tgt)


class AlignmentFilter(Filter):
    """
    Drops pairs whose :func:`align_score` is below ``threshold`` and pairs
    with an empty side.
    """

    name = "alignment"

    def __init__(self, table, *, threshold=DEFAULT_SENTINEL):
        if not isinstance(table, TranslationTable):
            table = TranslationTable.load(table)
        self.table = table
        self.threshold = resolve_option(
            threshold, options.default_align_threshold
        )

    def keep(self, pair):
        try:
            return align_score(self.table, pair) >= self.threshold
        except ScoreError:
            return False
