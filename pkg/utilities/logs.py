import logging

from rich.console import Console
from rich.logging import RichHandler

import constants

TRACE = 5
logging.addLevelName(TRACE, "TRACE")


class ProjectLogger(logging.Logger):
    """Logger with an extra trace level below debug."""

    def trace(self, msg, *args, **kwargs):
        if self.isEnabledFor(TRACE):
            self._log(TRACE, msg, args, **kwargs)

    def success(self, msg, *args, **kwargs):
        self.info(msg, *args, **kwargs)


logging.setLoggerClass(ProjectLogger)
logger: ProjectLogger = logging.getLogger(constants.LOGGER_NAME)
logging.setLoggerClass(logging.Logger)
logger.addHandler(logging.NullHandler())


def setup_logging(debug: bool = False, trace: bool = False) -> None:
    """Attaches a rich console handler to the project logger.

    Safe to call repeatedly; only one console handler is kept.
    """
    level = TRACE if trace else logging.DEBUG if debug else logging.INFO
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False, markup=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
