"""Kernel selection: compiled extension when available, pure Python otherwise.

Set AEGISIM_PURE=1 to force the pure-Python kernel (used by the benchmark
to compare both implementations).
"""

from __future__ import annotations

import os

from . import pure

JOIN_NEW = pure.JOIN_NEW
JOIN_SIMILAR = pure.JOIN_SIMILAR
JOIN_RULE = pure.JOIN_RULE

if os.environ.get("AEGISIM_PURE") == "1":
    Grouper = pure.Grouper
    KERNEL_BACKEND = "pure"
else:
    try:
        from ._grouping import Grouper  # type: ignore[attr-defined]

        KERNEL_BACKEND = "compiled"
    except ImportError:  # pragma: no cover
        Grouper = pure.Grouper
        KERNEL_BACKEND = "pure"

__all__ = ["Grouper", "KERNEL_BACKEND", "JOIN_NEW", "JOIN_SIMILAR", "JOIN_RULE", "pure"]
