import logging

LOG_FORMAT = '[%(asctime)s] %(levelname)s: %(message)s'


def get_logger(name="cipwave", level=None):
    logger = logging.getLogger(name)
    logger.propagate = False  # Prevent double logging via parent/root logger

    if level is not None:
        logger.setLevel(_coerce_level(level))
    elif logger.level == logging.NOTSET:
        logger.setLevel(logging.INFO)

    # Keep exactly one handler no matter how many modules ask for the logger
    if not logger.handlers:
        handler = logging.StreamHandler()  # stderr, stdout is reserved for tables
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    return logger


def set_level(level, name="cipwave"):
    """Change the level of an existing logger (used by --verbose and LOG_LEVEL)."""
    logger = get_logger(name)
    logger.setLevel(_coerce_level(level))
    return logger


def _coerce_level(level):
    if isinstance(level, int):
        return level
    value = logging.getLevelName(str(level).upper())
    if not isinstance(value, int):
        return logging.INFO
    return value
