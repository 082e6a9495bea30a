import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

load_dotenv()

T = TypeVar("T")
R = TypeVar("R")


def max_workers() -> int:
    """Thread cap from OLAB_THREADS, defaulting to the CPU count."""
    raw = os.getenv("OLAB_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError as e:
        raise ValueError(f"OLAB_THREADS must be a positive integer, got {raw!r}") from e
    if value < 1:
        raise ValueError(f"OLAB_THREADS must be a positive integer, got {raw!r}")
    return value


def thread_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """Map fn over items on a thread pool; results come back in input order."""
    items = list(items)
    workers = min(workers or max_workers(), max(len(items), 1))
    if workers == 1:
        return [fn(item) for item in items]
    logger.debug("Mapping %d items over %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
