import os

DEFAULT_MAX_PREC = 8192
EXACT_DEGREE_CAP = 64


def max_prec() -> int:
    """Working-precision cap in bits; ``CFCERT_MAX_PREC`` overrides it."""
    raw = os.environ.get("CFCERT_MAX_PREC")
    if not raw:
        return DEFAULT_MAX_PREC
    value = int(raw)
    if value < 64:
        raise ValueError("CFCERT_MAX_PREC must be at least 64")
    return value
