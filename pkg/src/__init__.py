__all__ = [
    "start",
    "settings",
    "logger",
]

from .config import settings
from .logger import logger
from .main import start
