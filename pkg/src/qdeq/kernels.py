"""Kernel selection: compiled extension when importable, else pure Python.

Set ``QDEQ_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _nested_py

BACKEND = "python"
nested_sums = _nested_py.nested_sums

if os.environ.get("QDEQ_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _nested  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        pass
    else:
        nested_sums = _nested.nested_sums
        BACKEND = "cython"


def frac_limbs_for(digits: int) -> int:
    """Number of 64-bit fraction limbs giving ``digits`` decimals plus guard bits.

    The guard covers truncation error accumulated over ~10^7 additions.
    """
    bits = int(digits * 3.3219280948873626) + 40
    return -(-bits // 64)
