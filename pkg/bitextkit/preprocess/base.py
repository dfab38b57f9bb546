import json

from bitextkit.exc import RecordError
from bitextkit.util import logger

__all__ = (
    "Filter",
    "FilterReport",
    "Normalizer",
    "options",
)


class options:
    """The `options` object contains default configuration values for
    the cleaning and filtering chain.

    Thresholds without a value in the source recipe (alignment score,
    LID margin) are documented defaults tuned on toy corpora, not
    recommendations for real data.

    Attributes:
        default_max_tokens
            Pairs with a side longer than this many tokens are dropped.

        default_ratio_hi
            Pairs with ``|src| / |tgt|`` strictly greater than this
            are dropped.

        default_ratio_lo
            Pairs with ``|src| / |tgt|`` strictly less than this
            are dropped.

        default_lid_order
            Character n-gram order of language identification models.

        default_lid_k
            Add-k smoothing constant of language identification models.

        default_lid_floor
            Probability used for n-grams with zero probability.

        default_lid_min_margin
            Minimum per-character log-probability margin between the best
            and the second best language for a side to pass LID.

        default_ibm1_iterations
            EM iterations of IBM Model 1 training.

        default_ibm1_floor
            Translation probability used for unseen token pairs.

        default_align_threshold
            Pairs scoring below this (natural log per target token)
            are dropped by the alignment filter.

        default_report_samples
            How many rejected pairs are kept per filter in a
            :class:`FilterReport`.
    """

    # Please keep the attributes sorted and make sure that each attr has
    # a corresponding section in the docstring above.
    default_align_threshold = -6.0
    default_ibm1_floor = 1e-12
    default_ibm1_iterations = 5
    default_lid_floor = 1e-10
    default_lid_k = 0.5
    default_lid_min_margin = 0.0
    default_lid_order = 3
    default_max_tokens = 150
    default_ratio_hi = 4.0
    default_ratio_lo = 0.25
    default_report_samples = 5


class FilterReport:
    """
    Per-filter kept/dropped counts of a filter chain run, with a capped
    sample of rejected pairs.

    For every filter ``kept + dropped`` equals the number of records which
    reached it, and the chain's input equals the final output plus all
    dropped records.
    """

    def __init__(self, names=(), *, max_samples=None):
        self.max_samples = (
            options.default_report_samples if max_samples is None
            else max_samples
        )
        self.input = 0
        self.entries = {}
        for name in names:
            self.register(name)

    def register(self, name):
        if name in self.entries:
            raise ValueError("Filter %r is registered twice" % name)
        self.entries[name] = {"kept": 0, "dropped": 0, "samples": []}

    def kept(self, name):
        self.entries[name]["kept"] += 1

    def dropped(self, name, pair):
        entry = self.entries[name]
        entry["dropped"] += 1
        if len(entry["samples"]) < self.max_samples:
            entry["samples"].append([pair.src.text, pair.tgt.text])
        logger.debug("Filter %s dropped %r", name, pair)

    @property
    def output(self):
        """
        Records which passed every filter.
        """
        if not self.entries:
            return self.input
        return list(self.entries.values())[-1]["kept"]

    @property
    def total_dropped(self):
        return sum(e["dropped"] for e in self.entries.values())

    def as_dict(self):
        return {
            "input": self.input,
            "output": self.output,
            "filters": [
                dict(name=name, **entry) for name, entry in self.entries.items()
            ],
        }

    def to_json(self):
        return json.dumps(self.as_dict(), ensure_ascii=False, indent=2)

    def __repr__(self):
        return "FilterReport(input=%d, output=%d)" % (self.input, self.output)


class Filter:
    """
    Template object for record filters.

    A filter decides for every pair whether it is kept (:meth:`keep`).
    Calling a filter on a stream yields the kept pairs and accounts for
    every pair in a :class:`FilterReport`.
    """

    #: Registry name of the filter.
    name = None

    def keep(self, pair):
        raise NotImplementedError()

    def __call__(self, records, report=None, *, name=None):
        name = name or self.name
        for pair in records:
            if self.keep(pair):
                if report is not None:
                    report.kept(name)
                yield pair
            elif report is not None:
                report.dropped(name, pair)

    def __repr__(self):
        return "%s()" % type(self).__name__


class Normalizer(Filter):
    """
    Template object for record transforms: the text function is applied
    to both sides.

    A pair is dropped only when its rewritten form is no longer a valid
    record, e.g. an authentic source normalized into a synthetic tag.
    """

    def normalize(self, text):
        raise NotImplementedError()

    def keep(self, pair):
        return True

    def transform(self, pair):
        src = self.normalize(pair.src.text)
        tgt = self.normalize(pair.tgt.text)
        if src == pair.src.text and tgt == pair.tgt.text:
            return pair
        return type(pair)(
            src, tgt, pair.provenance, pair.scores,
            src_lang=pair.src.lang, tgt_lang=pair.tgt.lang,
        )

    def __call__(self, records, report=None, *, name=None):
        name = name or self.name
        for pair in records:
            try:
                out = self.transform(pair)
            except RecordError as error:
                if report is not None:
                    report.dropped(name, pair)
                else:
                    logger.debug("Filter %s dropped %r: %s", name, pair, error)
                continue
            if report is not None:
                report.kept(name)
            yield out
