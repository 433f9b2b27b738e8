"""Worker pool for (up card, pair) tasks"""
import logging
import multiprocessing
import sys
from collections.abc import Callable, Iterable
from typing import TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class TaskFailure(RuntimeError):
    """A worker task raised something other than a usage error"""


def progress(items: Iterable[T], total: int, desc: str) -> Iterable[T]:
    """Progress bar on stderr, silent when stderr is not a terminal."""
    return tqdm(
        items,
        total=total,
        desc=desc,
        file=sys.stderr,
        leave=False,
        disable=not sys.stderr.isatty(),
    )


def run_tasks(func: Callable[[T], R], tasks: list[T], workers: int = 1, desc: str = "tasks") -> list[R]:
    """
    Run independent tasks and return their results in task order.

    Tasks share nothing; each builds its own caches. With workers <= 1 the
    tasks run in this process, which keeps tracebacks and debugging simple.

    Args:
        func: Top-level (picklable) task function
        tasks: Task arguments, already in the order results should come back
        workers: Number of processes
        desc: Progress bar label

    Returns:
        One result per task, in the same order

    Raises:
        ValueError: re-raised unchanged from a task
        TaskFailure: any other exception inside a task
    """
    if not tasks:
        return []
    workers = min(workers, len(tasks))
    logger.info("Running %d %s on %d worker(s)", len(tasks), desc, max(workers, 1))
    try:
        if workers <= 1:
            return [func(task) for task in progress(tasks, len(tasks), desc)]
        with multiprocessing.Pool(processes=workers) as pool:
            # imap keeps task order, so the merge does not depend on scheduling
            return list(progress(pool.imap(func, tasks), len(tasks), desc))
    except ValueError:
        raise
    except Exception as exc:
        logger.exception("Worker task failed")
        raise TaskFailure(str(exc)) from exc
