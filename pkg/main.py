from src import start
from src.logger import logger as log


if __name__ == "__main__":
    try:
        start()
    except KeyboardInterrupt:
        print("Interrupted.")
    except Exception as e:
        log.exception(f"Unhandled error: {e}")
        raise SystemExit(1)
