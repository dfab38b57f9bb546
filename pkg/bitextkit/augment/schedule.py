"""
Training schedules: ordered phases, each naming the datasets a trainer
reads and how many passes it makes over them. Schedules are written as
JSON::

    {"format": "schedule-v1",
     "phases": [{"name": "round1-mixed",
                 "datasets": ["synthetic.jsonl", "authentic.jsonl"],
                 "passes": 1}, ...]}
"""

import json
import os

from bitextkit.exc import ConfigurationError, RecordFormatError
from bitextkit.util import logger

__all__ = (
    "Phase",
    "Schedule",
    "at_schedule",
    "bit_schedule",
)


class Phase:
    __slots__ = ("name", "datasets", "passes")

    def __init__(self, name, datasets, passes=1):
        datasets = tuple(os.fspath(d) for d in datasets)
        if not datasets:
            raise ConfigurationError("Phase %r has no datasets" % name)
        if len(set(datasets)) != len(datasets):
            raise ConfigurationError(
                "Phase %r lists a dataset twice: %r" % (name, datasets)
            )
        if int(passes) < 1:
            raise ConfigurationError(
                "Phase %r needs at least one pass, got %r" % (name, passes)
            )
        self.name = name
        self.datasets = datasets
        self.passes = int(passes)

    def as_dict(self):
        return {
            "name": self.name,
            "datasets": list(self.datasets),
            "passes": self.passes,
        }

    def __eq__(self, other):
        return isinstance(other, Phase) and self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return not (self == other)

    def __repr__(self):
        return "Phase(%r, %r, passes=%d)" % (self.name, list(self.datasets), self.passes)


class Schedule:
    """
    A non-empty ordered list of :class:`Phase` objects.
    """

    def __init__(self, phases):
        self.phases = list(phases)
        if not self.phases:
            raise ConfigurationError("A schedule needs at least one phase")

    def to_dict(self):
        return {
            "format": "schedule-v1",
            "phases": [phase.as_dict() for phase in self.phases],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            if data.get("format") != "schedule-v1":
                raise ValueError("unknown format %r" % data.get("format"))
            return cls(
                Phase(p["name"], p["datasets"], p.get("passes", 1))
                for p in data["phases"]
            )
        except (AttributeError, KeyError, TypeError, ValueError) as error:
            raise RecordFormatError("Invalid schedule: %s" % error)

    def dumps(self):
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def loads(cls, text):
        try:
            data = json.loads(text)
        except ValueError as error:
            raise RecordFormatError("Invalid schedule: %s" % error)
        return cls.from_dict(data)

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.dumps())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.loads(f.read())

    def __len__(self):
        return len(self.phases)

    def __iter__(self):
        return iter(self.phases)

    def __eq__(self, other):
        return isinstance(other, Schedule) and self.phases == other.phases

    def __ne__(self, other):
        return not (self == other)

    def __repr__(self):
        return "Schedule(%r)" % (self.phases,)


def _check_exists(paths, base_dir):
    for path in paths:
        full = path if base_dir is None else os.path.join(base_dir, path)
        if not os.path.exists(full):
            raise ConfigurationError("Dataset manifest %r does not exist" % path)


def at_schedule(authentic, synthetic, rounds, *, passes=1, check=True, base_dir=None):
    """
    Alternated training: every round is a phase over the synthetic and the
    authentic data, followed by a phase over the authentic data only::

        >>> [p.name for p in at_schedule("a.jsonl", ["s.jsonl"], 2, check=False)]
        ['round1-mixed', 'round1-authentic', 'round2-mixed', 'round2-authentic']

    Without synthetic data both phases of a round read the authentic data
    only, and a warning is logged.

    :param authentic: Path of the authentic dataset.
    :param synthetic: Paths of synthetic datasets (e.g. FT and BT outputs).
    :param int rounds: Number of rounds, at least 1.
    :param int passes: Passes per phase.
    :param bool check: Require every dataset to exist.
    :param base_dir: Directory relative paths are checked against.

    :rtype: :class:`Schedule`
    """
    if isinstance(synthetic, (str, os.PathLike)):
        synthetic = [synthetic]
    authentic = os.fspath(authentic)
    synthetic = [os.fspath(s) for s in synthetic]
    if rounds < 1:
        raise ConfigurationError("AT needs at least one round, got %r" % rounds)
    if authentic in synthetic:
        raise ConfigurationError(
            "The authentic dataset %r is also listed as synthetic" % authentic
        )
    if check:
        _check_exists([authentic] + synthetic, base_dir)
    if not synthetic:
        logger.warning(
            "AT schedule without synthetic data: every phase reads only %r",
            authentic,
        )
    phases = []
    for r in range(1, rounds + 1):
        phases.append(Phase("round%d-mixed" % r, synthetic + [authentic], passes))
        phases.append(Phase("round%d-authentic" % r, [authentic], passes))
    return Schedule(phases)


def bit_schedule(bidirectional, original, *, passes=(1, 1), check=True, base_dir=None):
    """
    Bidirectional training recipe: a phase over the bidirectional data
    (see :func:`bitextkit.augment.bit_reconstruct`), then a phase over the
    original direction only.
    """
    bidirectional, original = os.fspath(bidirectional), os.fspath(original)
    if check:
        _check_exists([bidirectional, original], base_dir)
    return Schedule([
        Phase("bidirectional", [bidirectional], passes[0]),
        Phase("original", [original], passes[1]),
    ])
