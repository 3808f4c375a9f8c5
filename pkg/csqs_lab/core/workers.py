"""
工作线程数策略与保序并行分发

网格填充与扫描将相互独立的任务交给线程池，结果始终按输入顺序返回，
线程数不影响输出。
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import psutil

from .config import current_config
from .exceptions import UsageError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    """物理核心数（未知时取逻辑核心数），受配置的线程上限约束"""
    cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    cap = current_config().threads
    return max(1, min(cores, cap) if cap else cores)


def resolve_workers(requested: Optional[int] = None) -> int:
    """显式请求优先于核心数，但不超过线程上限"""
    if requested is None:
        return default_workers()
    if requested < 1:
        raise UsageError("worker count must be >= 1", details={"workers": requested})
    cap = current_config().threads
    return min(requested, cap) if cap else requested


def ordered_map(
    fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None
) -> List[R]:
    """对每个元素应用 fn，结果列表与输入顺序一致"""
    items = list(items)
    count = min(resolve_workers(workers), max(len(items), 1))
    if count == 1:
        return [fn(item) for item in items]

    logger.debug(f"Fanning {len(items)} items out to {count} workers")
    with ThreadPoolExecutor(max_workers=count) as executor:
        return list(executor.map(fn, items))
