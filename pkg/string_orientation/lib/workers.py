"""
Run independent checks, optionally on a thread pool.
Results come back keyed and ordered exactly as the tasks were given.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict

logger = logging.getLogger(__name__)


def run_tasks(tasks: Dict[str, Callable[[], Any]], jobs: int = 1) -> Dict[str, Any]:
    """
    Evaluate every task.

    Args:
        tasks: name -> zero-argument callable
        jobs: worker threads; 1 runs sequentially

    Returns:
        name -> result, in the insertion order of tasks
    """
    if jobs <= 1 or len(tasks) <= 1:
        return {name: task() for name, task in tasks.items()}
    logger.debug("running %d tasks on %d threads", len(tasks), jobs)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {name: pool.submit(task) for name, task in tasks.items()}
        return {name: futures[name].result() for name in tasks}
