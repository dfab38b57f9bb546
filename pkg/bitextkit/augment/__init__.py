"""
Synthetic data strategies. Generators take translators
(:mod:`bitextkit.translators`) and produce provenance-tagged pairs:

- :func:`bit_reconstruct`: bidirectional training (``BIT_REVERSED`` copies).
- :func:`dd_generate`: data diversification (``DD_FWD``, ``DD_BWD``).
- :func:`ft_generate`: forward translation of sampled source
  monolingual data (``FT``).
- :func:`bt_generate`: back translation by beam search or sampling,
  optionally tagged (``BT_BEAM``, ``BT_SAMPLING``, ``BT_TAGGED``).
- :func:`tel_build`: transductive ensemble data (``TEL``).

Schedules (:func:`at_schedule`, :func:`bit_schedule`) tell a trainer in
which order to read the resulting datasets. :func:`hypo_build` and
:func:`ape_prompt` build post-editing data from n-best lists.
"""

__all__ = (
    "DEFAULT_NBEST",
    "DEFAULT_QE_THRESHOLD",
    "DEFAULT_TEMPLATE",
    "ApeRecord",
    "AugmentStats",
    "Phase",
    "Schedule",
    "ape_prompt",
    "at_schedule",
    "bit_reconstruct",
    "bit_schedule",
    "bt_generate",
    "dd_generate",
    "ft_generate",
    "hypo_build",
    "read_ape_records",
    "sft_records",
    "tel_build",
    "write_ape_records",
    "write_sft",
)

from bitextkit.augment.ape import (
    DEFAULT_NBEST,
    DEFAULT_QE_THRESHOLD,
    DEFAULT_TEMPLATE,
    ApeRecord,
    ape_prompt,
    hypo_build,
    read_ape_records,
    sft_records,
    write_ape_records,
    write_sft,
)
from bitextkit.augment.schedule import Phase, Schedule, at_schedule, bit_schedule
from bitextkit.augment.synthetic import (
    AugmentStats,
    bit_reconstruct,
    bt_generate,
    dd_generate,
    ft_generate,
    tel_build,
)
