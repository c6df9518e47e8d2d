"""Contiguous range splitting over a process pool."""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Tuple, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


def split_range(total: int, workers: int) -> List[Tuple[int, int]]:
    """Contiguous [start, stop) chunks covering range(total)."""
    workers = max(1, min(workers, total))
    step, extra = divmod(total, workers)
    chunks, start = [], 0
    for i in range(workers):
        stop = start + step + (1 if i < extra else 0)
        chunks.append((start, stop))
        start = stop
    return chunks


def run_chunks(job: Callable[[int, int], List[T]], total: int, workers: int) -> List[T]:
    """job(start, stop) over range(total); job must be picklable when workers > 1."""
    if total <= 0:
        return []
    chunks = split_range(total, workers)
    if len(chunks) == 1:
        return job(0, total)
    logger.debug("Running %d chunks over %d indices", len(chunks), total)
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        futures = [pool.submit(job, start, stop) for start, stop in chunks]
        return [item for future in futures for item in future.result()]
