import os
from dotenv import load_dotenv

_INT_KEYS = {
    "OBC_MAX_DOTS": 64,
    "OBC_MAX_WORD": 6,
    "OBC_MAX_ELL": 4,
    "OBC_MAX_DIM": 4096,
    "OBC_DELTA_PRECISION": 8,
}

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def load():
    # Load environment variables from .env file
    env_path = os.path.join(os.path.dirname(__file__), "..", ".env")
    load_dotenv(dotenv_path=env_path)

    cfg = {}
    for key, default in _INT_KEYS.items():
        raw = os.getenv(key, str(default)).strip()
        try:
            value = int(raw)
        except ValueError:
            raise RuntimeError(f"{key} must be an integer, got {raw!r}")
        if value < 1:
            raise RuntimeError(f"{key} must be positive, got {value}")
        cfg[key] = value

    level = os.getenv("OBC_LOG_LEVEL", "INFO").strip().upper()
    if level not in _LEVELS:
        raise RuntimeError(f"Invalid OBC_LOG_LEVEL: {level}")
    cfg["OBC_LOG_LEVEL"] = level
    return cfg
