"""Logging setup"""
import logging

from app.config import settings

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str | None = None) -> None:
    """Configure the root logger once; later calls only change the level."""
    level = (level or settings.LOG_LEVEL).upper()
    if settings.DEBUG:
        level = "DEBUG"
    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(format=LOG_FORMAT)
    root.setLevel(level)
