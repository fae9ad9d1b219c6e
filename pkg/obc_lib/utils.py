import logging
import os
import re

# Words: 'u' is an up strand, 'd' a down strand. Arrows are accepted on input.
_WORD = re.compile(r"^[ud]*$")
_ARROWS = {"↑": "u", "↓": "d", "U": "u", "D": "d"}


class CapExceeded(RuntimeError):
    """A configured resource cap (dots, word length, matrix size) was hit."""


def normalize_word(value) -> str:
    """Convert user input to a canonical word over 'u'/'d'. '1', '' and None mean the unit object."""
    if value is None:
        return ""
    s = str(value).strip()
    if s in ("1", "𝟙", "unit", "-"):
        return ""
    s = "".join(_ARROWS.get(ch, ch) for ch in s)
    if not _WORD.match(s):
        raise ValueError(f"invalid word {value!r}: use letters u/d")
    if len(s) > MAX_WORD:
        raise CapExceeded(f"word {s!r} longer than OBC_MAX_WORD={MAX_WORD}")
    return s


def flow(word: str) -> int:
    """#up minus #down."""
    return word.count("u") - word.count("d")


# Environment variable helpers
def _get_int_env(name: str, default: int) -> int:
    """Get integer value from environment variable with fallback"""
    try:
        return int(os.getenv(name, str(default)).strip())
    except Exception:
        return default


MAX_DOTS = _get_int_env("OBC_MAX_DOTS", 64)
MAX_WORD = _get_int_env("OBC_MAX_WORD", 6)
MAX_ELL = _get_int_env("OBC_MAX_ELL", 4)
MAX_DIM = _get_int_env("OBC_MAX_DIM", 4096)
DELTA_PRECISION = _get_int_env("OBC_DELTA_PRECISION", 8)


def check_dots(count: int, where: str = "strand") -> int:
    if count > MAX_DOTS:
        raise CapExceeded(f"{count} dots on one {where} exceeds OBC_MAX_DOTS={MAX_DOTS}")
    return count


def check_dim(dim: int, what: str = "matrix") -> int:
    if dim > MAX_DIM:
        raise CapExceeded(f"{what} dimension {dim} exceeds OBC_MAX_DIM={MAX_DIM}")
    return dim


def check_ell(ell: int) -> int:
    if ell > MAX_ELL:
        raise CapExceeded(f"degree {ell} exceeds OBC_MAX_ELL={MAX_ELL}")
    return ell


def apply_caps(cfg: dict) -> None:
    """Install validated config values as the active caps."""
    global MAX_DOTS, MAX_WORD, MAX_ELL, MAX_DIM, DELTA_PRECISION
    MAX_DOTS = cfg.get("OBC_MAX_DOTS", MAX_DOTS)
    MAX_WORD = cfg.get("OBC_MAX_WORD", MAX_WORD)
    MAX_ELL = cfg.get("OBC_MAX_ELL", MAX_ELL)
    MAX_DIM = cfg.get("OBC_MAX_DIM", MAX_DIM)
    DELTA_PRECISION = cfg.get("OBC_DELTA_PRECISION", DELTA_PRECISION)


def setup_logging(level: str = "INFO") -> None:
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format="[%(name)s] %(message)s")
