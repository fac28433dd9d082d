"""Utility functions for terminal output and parallel evaluation"""

import logging
from multiprocessing.pool import ThreadPool
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

EMOJI_MAP = {
    "✅": "[OK]",
    "❌": "[FAIL]",
    "⚠️": "[WARN]",
    "📐": "[MEASURE]",
    "📊": "[STATS]",
    "🎯": "[TARGET]",
    "💾": "[SAVE]",
    "🚀": "[START]",
    "🔬": "[CHECK]",
    "💡": "[INFO]",
    "🔧": "[CONFIG]",
    "⚙️": "[RUNTIME]",
    "📚": "[CATALOG]",
    "🔹": "-",
    "•": "-",
}


def safe_print(*args, **kwargs):
    """Safe print that handles Unicode on all platforms"""
    try:
        print(*args, **kwargs)
    except UnicodeEncodeError:
        safe_args = []
        for arg in args:
            if isinstance(arg, str):
                for emoji, ascii_text in EMOJI_MAP.items():
                    arg = arg.replace(emoji, ascii_text)
            safe_args.append(arg)
        print(*safe_args, **kwargs)


def parallel_map(func: Callable[[T], R], items: Iterable[T], max_workers: int = 1) -> List[R]:
    """
    Map func over items, in order, on up to max_workers threads.

    Results keep the input order whatever the worker count.
    """
    items = list(items)
    if max_workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    workers = min(max_workers, len(items))
    logger.debug(f"Evaluating {len(items)} items on {workers} threads")
    with ThreadPool(processes=workers) as pool:
        return pool.map(func, items)


__all__ = ["safe_print", "parallel_map", "EMOJI_MAP"]
