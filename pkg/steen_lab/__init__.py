# Package-wide logger, level from STEEN_LAB_LOG
import logging
import os
from typing import Optional

__version__ = "0.3.0"

# Create or get the logger
logger = logging.getLogger("steen-lab")

# Create a console handler
console_handler = logging.StreamHandler()
console_handler.setLevel(logging.DEBUG)  # the logger level does the filtering

# Create a formatter and set it for the handler
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
console_handler.setFormatter(formatter)

# Add the handler to the logger
logger.addHandler(console_handler)


def configure_level(level: Optional[str] = None) -> int:
    """Sets the logger level from `level`, or from STEEN_LAB_LOG (default WARNING).

    Unknown level names fall back to INFO with a warning.
    """
    name = (level if level is not None else os.getenv("STEEN_LAB_LOG", "WARNING")).strip().upper()
    try:
        logger.setLevel(name)
    except ValueError:
        logger.setLevel(logging.INFO)
        logger.warning(f"Unknown log level '{name}' in STEEN_LAB_LOG; using INFO.")
    return logger.level


configure_level()
