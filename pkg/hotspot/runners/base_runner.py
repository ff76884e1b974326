"""
Base runner with thread-pool fan-out and per-task timing.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, TypeVar

from hotspot.config import Config, get_config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class BaseRunner:
    """
    Base runner class.

    Attributes:
        runner_name (str): Name used in log messages
        settings (Config): Environment configuration
        options (dict): Runner options, defaults updated by the caller's
    """

    def __init__(self, runner_name: str, settings: Optional[Config] = None,
                 options: Optional[Dict[str, Any]] = None):
        """
        Initialize the runner.

        Args:
            runner_name: Name of the runner
            settings: Configuration object; get_config() when None
            options: Overrides of the default options
        """
        self.runner_name = runner_name
        self.settings = settings or get_config()
        self.options = {
            "threads": self.settings.THREADS,  # worker cap
            "fail_fast": False,                # re-raise the first task error
        }
        if options and isinstance(options, dict):
            self.options.update(options)

    @property
    def threads(self) -> int:
        return max(1, int(self.options["threads"]))

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """
        Apply fn to every item, concurrently when more than one thread is allowed.

        Results come back in input order.
        """
        items = list(items)
        if self.threads == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=min(self.threads, len(items)),
                                thread_name_prefix=self.runner_name) as pool:
            return list(pool.map(fn, items))

    def timed(self, fn: Callable[..., R], *args, **kwargs) -> Tuple[R, float]:
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        return result, time.perf_counter() - start
