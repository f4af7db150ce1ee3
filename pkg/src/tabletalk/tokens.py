"""Token-count estimation for prompt budgeting.

The default estimator is the documented chars/4 heuristic; anything that
budgets text takes an estimator argument so an exact tokenizer can be
plugged in.
"""

from __future__ import annotations

from typing import Callable

TokenEstimator = Callable[[str], int]


def estimate_tokens(text: str) -> int:
    """ceil(len(text) / 4); the empty string costs nothing."""
    return (len(text) + 3) // 4
