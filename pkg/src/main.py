from src.cli import main
from src.logger import logger as log


def start() -> None:
    log.debug("Command line started")
    main()
