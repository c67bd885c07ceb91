"""Batching with an optional buffered shuffle."""

from typing import Iterable, Iterator, List, Optional

import numpy as np

from banditcp.data.records import Batch, StreamRecord
from banditcp.errors import InvalidInputError


def _buffered_shuffle(
    source: Iterable[StreamRecord], buffer_size: int, rng: np.random.Generator
) -> Iterator[StreamRecord]:
    buffer: List[StreamRecord] = []
    for record in source:
        buffer.append(record)
        if len(buffer) >= buffer_size:
            pick = int(rng.integers(len(buffer)))
            buffer[pick], buffer[-1] = buffer[-1], buffer[pick]
            yield buffer.pop()
    for pick in rng.permutation(len(buffer)):
        yield buffer[pick]


def batch_iterator(
    source: Iterable[StreamRecord],
    batch_size: int,
    shuffle_buffer: int = 0,
    rng: Optional[np.random.Generator] = None,
    audit: bool = False,
) -> Iterator[Batch]:
    """
    Group a record stream into consecutive batches.

    Args:
        source: Records in stream order
        batch_size: Records per batch; the final batch may be shorter
        shuffle_buffer: Size of the shuffle buffer, 0 keeps stream order
        rng: Generator for the shuffle, required when ``shuffle_buffer > 0``
        audit: Poison direct label reads on the emitted batches

    Yields:
        Batches indexed from 0
    """
    if batch_size < 1:
        raise InvalidInputError(f"batch_size must be >= 1, got {batch_size}")
    if shuffle_buffer > 0:
        if rng is None:
            raise InvalidInputError("a shuffle buffer needs a random generator")
        source = _buffered_shuffle(source, shuffle_buffer, rng)

    index = 0
    pending: List[StreamRecord] = []
    for record in source:
        pending.append(record)
        if len(pending) == batch_size:
            yield Batch(records=pending, index=index, audit=audit)
            index += 1
            pending = []
    if pending:
        yield Batch(records=pending, index=index, audit=audit)
