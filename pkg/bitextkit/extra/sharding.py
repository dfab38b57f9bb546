""":class:`.ShardedMap` runs a record-parallel transform over shards of a
stream on a thread pool and yields the results in input order, so the
output doesn't depend on the number of workers.

In the example below back translation runs on 8 threads, 500 sentences per
shard::

    from bitextkit.augment import bt_generate
    from bitextkit.extra.sharding import ShardedMap

    back_translate = ShardedMap(
        lambda shard: list(bt_generate(shard, reverse, mode="sampling", seed=13)),
        jobs=8,
        shard_size=500,
    )
    pairs = list(back_translate(read_mono("mono.zh", "zh")))

Only transforms which handle every record independently may be sharded.
Stateful ones (like deduplication) see one shard at a time.
"""

import concurrent.futures
import itertools

from bitextkit.exc import ConfigurationError
from bitextkit.util import logger

__all__ = ("ShardedMap", "iter_shards")


def iter_shards(records, shard_size):
    """
    Split an iterable into lists of ``shard_size`` records; the last one
    may be shorter.
    """
    iterator = iter(records)
    while True:
        shard = list(itertools.islice(iterator, shard_size))
        if not shard:
            return
        yield shard


class ShardedMap:
    """Order-preserving parallel map over shards of a stream.

    At most ``2 * jobs`` shards are held in memory at a time.
    """

    def __init__(self, func, *, jobs=1, shard_size=1000):
        """
        :param callable func: Maps a list of records to an iterable of
            outputs.

        :param int jobs: Number of worker threads. With ``1`` shards are
            processed in the calling thread.

        :param int shard_size: Records per shard.
        """
        if jobs < 1:
            raise ConfigurationError("jobs must be >= 1, got %r" % jobs)
        if shard_size < 1:
            raise ConfigurationError("shard_size must be >= 1, got %r" % shard_size)
        self.func = func
        self.jobs = jobs
        self.shard_size = shard_size

    def _run(self, index, shard):
        logger.debug("Processing shard %d (%d records)", index, len(shard))
        return list(self.func(shard))

    def __call__(self, records):
        shards = enumerate(iter_shards(records, self.shard_size))
        if self.jobs == 1:
            for index, shard in shards:
                yield from self._run(index, shard)
            return
        with concurrent.futures.ThreadPoolExecutor(max_workers=self.jobs) as pool:
            pending = []
            for index, shard in shards:
                pending.append(pool.submit(self._run, index, shard))
                if len(pending) >= 2 * self.jobs:
                    yield from pending.pop(0).result()
            for future in pending:
                yield from future.result()

    def __repr__(self):
        return "ShardedMap(%r, jobs=%d, shard_size=%d)" % (
            self.func, self.jobs, self.shard_size
        )
