"""Shared odds and ends."""

from __future__ import annotations

import os


def worker_count() -> int:
    """Worker cap from SWARMVQC_THREADS; 0 or unset means auto (cpu count)."""
    raw = os.environ.get("SWARMVQC_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"SWARMVQC_THREADS must be an integer, got {raw!r}") from None
    if value < 0:
        raise ValueError(f"SWARMVQC_THREADS must be >= 0, got {value}")
    if value == 0:
        return os.cpu_count() or 1
    return value
