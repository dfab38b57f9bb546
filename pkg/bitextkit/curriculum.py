"""
Curriculum learning by domain feature.

The difficulty of a pair ``(x, y)`` is its length-normalized log-odds under
an in-domain and a general-domain model::

    q(x, y) = (log P(y|x; in) - log P(y|x; out)) / |y|

Higher ``q`` means more in-domain, which is treated as easier. Records are
split into bins by descending ``q`` (bin 0 is the most in-domain) and
mini-batches are sampled through a schedule of per-bin weights: early
phases favour bin 0, later ones approach uniform sampling. Sampling is with
replacement, so no record is ever discarded.

Scores may come from any :class:`bitextkit.translators.Scorer` or from a
precomputed score file (:func:`load_external_scores`).
"""

import json
import math
import os

import numpy as np

from bitextkit.exc import ConfigurationError, RecordFormatError, ScoreError
from bitextkit.util import logger

__all__ = (
    "DEFAULT_BINS",
    "DEFAULT_PHASES",
    "CurriculumBins",
    "DifficultyScore",
    "attach_external_scores",
    "build_bins",
    "cl_sample",
    "default_phase_weights",
    "domain_feature",
    "export_external_scores",
    "load_external_scores",
    "score_pairs",
)

DEFAULT_BINS = 4
DEFAULT_PHASES = 4

# Weight vectors must sum to 1 within this tolerance.
WEIGHT_TOLERANCE = 1e-9


class DifficultyScore:
    """
    The domain feature ``q`` of a pair and the components it is computed
    from::

        >>> DifficultyScore(-2.0, -5.0, 3).q
        1.0
    """

    __slots__ = ("logprob_in", "logprob_out", "target_token_count", "q")

    def __init__(self, logprob_in, logprob_out, target_token_count):
        if target_token_count < 1:
            raise ScoreError("Difficulty needs a non-empty target")
        if not (math.isfinite(logprob_in) and math.isfinite(logprob_out)):
            raise ScoreError(
                "Non-finite log-probabilities: %r, %r" % (logprob_in, logprob_out)
            )
        self.logprob_in = float(logprob_in)
        self.logprob_out = float(logprob_out)
        self.target_token_count = int(target_token_count)
        self.q = (self.logprob_in - self.logprob_out) / self.target_token_count

    @classmethod
    def from_pair(cls, pair):
        """
        Rebuild the score of a pair annotated by :func:`score_pairs` or
        :func:`attach_external_scores`.
        """
        try:
            return cls(
                pair.scores["logprob_in"], pair.scores["logprob_out"], len(pair.tgt)
            )
        except KeyError as error:
            raise ScoreError("Pair has no %s score: %r" % (error, pair))

    def as_dict(self):
        return {
            "q": self.q,
            "logprob_in": self.logprob_in,
            "logprob_out": self.logprob_out,
            "target_token_count": self.target_token_count,
        }

    def __eq__(self, other):
        return isinstance(other, DifficultyScore) and self.as_dict() == other.as_dict()

    def __repr__(self):
        return "DifficultyScore(%r, %r, %d)" % (
            self.logprob_in, self.logprob_out, self.target_token_count
        )


def domain_feature(pair, in_scorer, out_scorer):
    """
    :param pair: :class:`bitextkit.sentence.SentencePair`.
    :param in_scorer: In-domain :class:`bitextkit.translators.Scorer`.
    :param out_scorer: General-domain scorer.
    :rtype: :class:`DifficultyScore`
    :raises bitextkit.exc.ScoreError: for an empty target.
    """
    count = len(pair.tgt)
    if not count:
        raise ScoreError("Can't score a pair with an empty target: %r" % (pair,))
    return DifficultyScore(
        in_scorer.logprob(pair.src, pair.tgt),
        out_scorer.logprob(pair.src, pair.tgt),
        count,
    )


def score_pairs(pairs, in_scorer, out_scorer):
    """
    Yield pairs with ``logprob_in``, ``logprob_out`` and ``q`` scores.
    """
    for pair in pairs:
        score = domain_feature(pair, in_scorer, out_scorer)
        yield pair.with_scores(
            logprob_in=score.logprob_in,
            logprob_out=score.logprob_out,
            q=score.q,
        )


def default_phase_weights(num_bins=DEFAULT_BINS, phases=DEFAULT_PHASES):
    """
    Weight vectors moving linearly from all mass on bin 0 to uniform::

        >>> [round(w, 4) for w in default_phase_weights(4, 4)[1]]
        [0.75, 0.0833, 0.0833, 0.0833]

    A single phase is uniform.
    """
    if num_bins < 1 or phases < 1:
        raise ConfigurationError(
            "Need at least one bin and one phase, got %r, %r" % (num_bins, phases)
        )
    first = np.zeros(num_bins)
    first[0] = 1.0
    uniform = np.full(num_bins, 1.0 / num_bins)
    weights = []
    for t in range(phases):
        alpha = t / (phases - 1) if phases > 1 else 1.0
        weights.append(((1.0 - alpha) * first + alpha * uniform).tolist())
    return weights


def _check_weights(weights, num_bins):
    vector = np.asarray(weights, dtype=float)
    if vector.shape != (num_bins,):
        raise ConfigurationError(
            "Weight vector %r doesn't match %d bins" % (weights, num_bins)
        )
    if not np.all(np.isfinite(vector)) or np.any(vector < 0):
        raise ConfigurationError("Weights must be finite and >= 0: %r" % (weights,))
    if not vector.any():
        raise ConfigurationError("Weight vector is all zeros")
    if abs(vector.sum() - 1.0) > WEIGHT_TOLERANCE:
        raise ConfigurationError("Weights %r don't sum to 1" % (weights,))
    return vector


class CurriculumBins:
    """
    Record indices split into bins of decreasing ``q``, plus the schedule of
    sampling weights.
    """

    def __init__(self, bins, weights, *, q_ranges=None, lengths=None):
        """
        :param bins: List of lists of record indices; together they must
            partition ``range(N)``.
        :param weights: One weight vector over the bins per phase.
        :param q_ranges: ``(max q, min q)`` per bin.
        :param lengths: Target token count per record, used to sort
            records inside sampled batches.
        """
        self.bins = [list(map(int, b)) for b in bins]
        if not self.bins or not all(self.bins):
            raise ConfigurationError("Every bin needs at least one record")
        indices = sorted(i for b in self.bins for i in b)
        if indices != list(range(len(indices))):
            raise ConfigurationError("Bins don't partition the record indices")
        self.weights = [
            _check_weights(w, len(self.bins)).tolist() for w in weights
        ]
        if not self.weights:
            raise ConfigurationError("A curriculum needs at least one phase")
        self.q_ranges = None if q_ranges is None else [tuple(r) for r in q_ranges]
        self.lengths = None if lengths is None else [int(n) for n in lengths]
        self._bin_of = {i: b for b, members in enumerate(self.bins) for i in members}

    @property
    def num_records(self):
        return len(self._bin_of)

    def bin_of(self, index):
        return self._bin_of[index]

    def describe(self):
        """
        Size and ``q`` range of every bin.
        """
        out = []
        for b, members in enumerate(self.bins):
            entry = {"bin": b, "size": len(members)}
            if self.q_ranges is not None:
                entry["q_max"], entry["q_min"] = self.q_ranges[b]
            out.append(entry)
        return out

    def to_dict(self):
        return {
            "format": "curriculum-v1",
            "bins": self.bins,
            "weights": self.weights,
            "q_ranges": None if self.q_ranges is None else [list(r) for r in self.q_ranges],
            "lengths": self.lengths,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            if data.get("format") != "curriculum-v1":
                raise ValueError("unknown format %r" % data.get("format"))
            return cls(
                data["bins"], data["weights"],
                q_ranges=data.get("q_ranges"), lengths=data.get("lengths"),
            )
        except (AttributeError, KeyError, TypeError, ValueError) as error:
            if isinstance(error, ConfigurationError):
                raise
            raise RecordFormatError("Invalid curriculum: %s" % error)

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(self.to_dict(), f)
            f.write("\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            try:
                data = json.load(f)
            except ValueError as error:
                raise RecordFormatError("%s: %s" % (path, error))
        return cls.from_dict(data)

    def __eq__(self, other):
        return isinstance(other, CurriculumBins) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return "CurriculumBins(sizes=%r, phases=%d)" % (
            [len(b) for b in self.bins], len(self.weights)
        )


def _score_of(item):
    if isinstance(item, DifficultyScore):
        return item.q, item.target_token_count
    if hasattr(item, "scores"):
        score = DifficultyScore.from_pair(item)
        return score.q, score.target_token_count
    return float(item), None


def build_bins(scored, num_bins=DEFAULT_BINS, *, weights=None, phases=DEFAULT_PHASES):
    """
    Split records into ``num_bins`` bins by descending ``q``; equal ``q``
    keep input order and bin sizes differ by at most one::

        >>> build_bins([3.0, 1.0, 2.0, 0.0], 2).bins
        [[0, 2], [1, 3]]

    :param scored: :class:`DifficultyScore` objects, pairs annotated by
        :func:`score_pairs`, or plain ``q`` values.
    :param int num_bins: Number of bins.
    :param weights: Phase weight vectors; :func:`default_phase_weights`
        when omitted.
    :param int phases: Number of default phases.

    :raises bitextkit.exc.ConfigurationError: if there are fewer records
        than bins.
    """
    items = [_score_of(item) for item in scored]
    if num_bins < 1:
        raise ConfigurationError("Need at least one bin, got %r" % num_bins)
    if num_bins > len(items):
        raise ConfigurationError(
            "Can't split %d records into %d bins" % (len(items), num_bins)
        )
    order = sorted(range(len(items)), key=lambda i: -items[i][0])
    size, extra = divmod(len(items), num_bins)
    bins = []
    start = 0
    for b in range(num_bins):
        end = start + size + (1 if b < extra else 0)
        bins.append(order[start:end])
        start = end
    q_ranges = [(items[b[0]][0], items[b[-1]][0]) for b in bins]
    lengths = [n for _, n in items]
    if any(n is None for n in lengths):
        lengths = None
    if weights is None:
        weights = default_phase_weights(num_bins, phases)
    result = CurriculumBins(bins, weights, q_ranges=q_ranges, lengths=lengths)
    for entry in result.describe():
        logger.info(
            "Curriculum bin %(bin)d: %(size)d records, q in [%(q_min).4f, %(q_max).4f]",
            entry,
        )
    return result


def cl_sample(bins, phase, batch_size, seed, *, num_batches=None, epoch_coverage=False):
    """
    Sample mini-batches of record indices for one phase.

    Every draw picks bin ``b`` with probability ``weights[phase][b]`` and
    then a record of ``b`` uniformly, with replacement. Records of a batch
    are sorted by target length when lengths are known.

    With ``epoch_coverage`` every record of a bin with positive weight is
    emitted once, in a seeded random order, before weighted sampling
    continues.

    :param bins: :class:`CurriculumBins`.
    :param int phase: Index into the phase schedule.
    :param int batch_size: Records per batch.
    :param int seed: Sampling seed.
    :param int num_batches: Number of batches; unlimited when ``None``.
    """
    if not 0 <= phase < len(bins.weights):
        raise ConfigurationError(
            "Phase %r is not in the schedule of %d phases" % (phase, len(bins.weights))
        )
    weights = bins.weights[phase]
    if batch_size < 1:
        raise ConfigurationError("batch_size must be >= 1, got %r" % batch_size)
    weights = _check_weights(weights, len(bins.bins))
    rng = np.random.default_rng(seed)
    sizes = np.array([len(b) for b in bins.bins])

    def weighted(count):
        chosen = rng.choice(len(sizes), size=count, p=weights)
        offsets = (rng.random(count) * sizes[chosen]).astype(np.int64)
        return [bins.bins[b][o] for b, o in zip(chosen.tolist(), offsets.tolist())]

    def finish(batch):
        if bins.lengths is not None:
            batch = sorted(batch, key=lambda i: bins.lengths[i])
        return batch

    def generate():
        emitted = 0
        pending = []
        if epoch_coverage:
            pool = [i for b, w in zip(bins.bins, weights) if w > 0 for i in b]
            pending = [pool[i] for i in rng.permutation(len(pool)).tolist()]
        while num_batches is None or emitted < num_batches:
            batch = pending[:batch_size]
            pending = pending[batch_size:]
            if len(batch) < batch_size:
                batch.extend(weighted(batch_size - len(batch)))
            yield finish(batch)
            emitted += 1

    return generate()


def load_external_scores(path, count=None):
    """
    Read precomputed log-probabilities from ``index<TAB>logprob_in<TAB>
    logprob_out`` lines, indices counting records from 0.

    :param int count: Expected number of records. Defaults to one more than
        the largest index.
    :rtype: list
    :return: ``(logprob_in, logprob_out)`` per record.
    :raises bitextkit.exc.RecordFormatError: on malformed lines, duplicate
        indices or gaps; the message names the missing indices.
    """
    scores = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            try:
                index, lp_in, lp_out = line.split("\t")
                index = int(index)
                values = (float(lp_in), float(lp_out))
                if index < 0:
                    raise ValueError("negative index")
            except ValueError as error:
                raise RecordFormatError(
                    "%s:%d: %s" % (path, lineno, error), line_numbers=[lineno]
                )
            if index in scores:
                raise RecordFormatError(
                    "%s:%d: duplicate index %d" % (path, lineno, index),
                    line_numbers=[lineno],
                )
            scores[index] = values
    if count is None:
        count = max(scores) + 1 if scores else 0
    missing = [i for i in range(count) if i not in scores]
    unexpected = sorted(i for i in scores if i >= count)
    if missing or unexpected:
        parts = []
        if missing:
            parts.append("missing indices %s" % ", ".join(map(str, missing[:20])))
        if unexpected:
            parts.append("unexpected indices %s" % ", ".join(map(str, unexpected[:20])))
        raise RecordFormatError(
            "%s: %d score rows for %d records: %s"
            % (path, len(scores), count, "; ".join(parts))
        )
    return [scores[i] for i in range(count)]


def attach_external_scores(pairs, scores):
    """
    Yield pairs annotated with ``logprob_in``, ``logprob_out`` and ``q``
    from :func:`load_external_scores` output, matched by position.
    """
    scores = list(scores)
    count = 0
    for pair in pairs:
        if count >= len(scores):
            raise RecordFormatError(
                "%d score rows for more records: missing index %d"
                % (len(scores), count)
            )
        lp_in, lp_out = scores[count]
        score = DifficultyScore(lp_in, lp_out, len(pair.tgt))
        yield pair.with_scores(
            logprob_in=score.logprob_in, logprob_out=score.logprob_out, q=score.q
        )
        count += 1
    if count != len(scores):
        raise RecordFormatError(
            "%d score rows for %d records" % (len(scores), count)
        )


def export_external_scores(scores, path):
    """
    Write ``(logprob_in, logprob_out)`` pairs (or :class:`DifficultyScore`
    objects) in the :func:`load_external_scores` format.

    :rtype: int
    """
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for index, item in enumerate(scores):
            if isinstance(item, DifficultyScore):
                item = (item.logprob_in, item.logprob_out)
            f.write("%d\t%r\t%r\n" % (index, float(item[0]), float(item[1])))
            count += 1
    return count
