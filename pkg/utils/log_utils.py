import logging
import os

from dotenv import load_dotenv

load_dotenv()

# Configure the logger
logger = logging.getLogger("captureLab")


def configure_logging(level: str | None = None) -> logging.Logger:
    """
    Attach a stderr handler to the package logger.

    The level comes from the argument, then CAPTURE_LOG_LEVEL, then WARNING.
    Data files never receive log output; everything goes to stderr.
    """
    level = (level or os.getenv("CAPTURE_LOG_LEVEL", "WARNING")).upper()

    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)

    logger.setLevel(level)
    return logger
