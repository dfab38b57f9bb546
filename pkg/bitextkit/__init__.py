"""
bitextkit builds training corpora for machine translation.

It cleans and filters parallel text, learns joint subword segmentation,
generates synthetic pairs (bidirectional copies, data diversification,
forward and back translation, ensemble outputs), schedules synthetic and
authentic data, scores pairs for curriculum learning and builds
post-editing datasets from n-best lists. Translation models are plugged in
through :class:`bitextkit.translators.Translator`; the models shipped
with the package are small and deterministic.

bitextkit is tested against CPython 3.8 and newer.
"""

from bitextkit.corpus import read_records, write_records  # noqa
from bitextkit.sentence import NBestList, Provenance, Sentence, SentencePair  # noqa
from bitextkit.util import __version__, __version_info__, get_version  # noqa

# `__all__` is intentionally not defined; the subpackages list their own
# public names.
