import functools
import logging
import multiprocessing
import os
import traceback
from logging.handlers import QueueHandler, QueueListener
from typing import Any, Iterable, Optional

import constants
from utilities.logs import logger


def _wrapped_func(func: functools.partial, log_queue, queue: multiprocessing.Queue):
    try:
        if log_queue is not None:
            # Spawned children start with fresh logging; route records back to the parent.
            child_logger = logging.getLogger(constants.LOGGER_NAME)
            while child_logger.handlers:
                child_logger.removeHandler(child_logger.handlers[0])
            child_logger.addHandler(QueueHandler(log_queue))
            child_logger.propagate = False
        result = func()
        queue.put((result,))
    except BaseException as e:
        # Catch exceptions here to add them to the queue.
        queue.put((e, traceback.format_exc()))


def run_in_subprocess(func: functools.partial, ttl: float, mode: str = "fork",
                      expected_errors: Iterable[str] = ()) -> Any:
    """Runs the provided function on a subprocess with 'ttl' seconds to complete.

    Args:
        func (functools.partial): Function to be run.
        ttl (float): How long to try for in seconds.
        mode: "fork" or "spawn".
        expected_errors: exception type names that are re-raised without logging a traceback.

    Returns:
        Any: The value returned by 'func'

    Raises:
        TimeoutError: If the subprocess did not finish within 'ttl' seconds.
    """
    ctx = multiprocessing.get_context(mode)
    queue = ctx.Queue()
    log_queue = None
    listener = None
    if mode == "spawn":
        log_queue = ctx.Manager().Queue()
        listener = QueueListener(log_queue, *logger.handlers, respect_handler_level=True)
        listener.start()
    process = ctx.Process(target=_wrapped_func, args=[func, log_queue, queue])
    process.start()

    # Drain before join so a large result cannot block the child on a full pipe.
    try:
        result = queue.get(timeout=ttl)
    except Exception:
        result = None
    finally:
        if listener is not None:
            listener.stop()

    if result is None:
        if process.is_alive():
            process.terminate()
        process.join()
        raise TimeoutError(f"Failed to {func.func.__name__} after {ttl} seconds")
    process.join()

    if len(result) == 2 and isinstance(result[0], BaseException):
        error, stack_trace = result
        if type(error).__name__ not in set(expected_errors):
            logger.error(f"Exception in subprocess:\n{stack_trace}")
        if isinstance(error, Exception):
            raise error
        raise Exception(f"BaseException raised in subprocess: {error}")
    return result[0]


def budget_from_env(default: Optional[float] = None) -> float:
    """Per-run time budget: SURROOTS_BUDGET_SECS when set, else ``default``."""
    value = os.environ.get(constants.ENV_BUDGET_SECS)
    if value:
        try:
            return float(value)
        except ValueError:
            logger.warning(f"Ignoring non-numeric {constants.ENV_BUDGET_SECS}={value}")
    return float(default if default is not None else constants.DEFAULT_BUDGET_SECS)


def slow_tests_enabled() -> bool:
    return bool(os.environ.get(constants.ENV_SLOW_TESTS))
