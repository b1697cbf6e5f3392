"""Kernel selection: compiled extension when available, numpy otherwise.

Set ``COMBSEARCH_BACKEND=python`` to force the fallback (useful for the
benchmark and for debugging) or ``COMBSEARCH_BACKEND=c`` to insist on the
compiled kernel.
"""

from __future__ import annotations

import os

_requested = os.environ.get("COMBSEARCH_BACKEND", "").strip().lower()
if _requested not in {"", "c", "python"}:
    raise ImportError(f"COMBSEARCH_BACKEND must be 'c' or 'python', "
                      f"got {_requested!r}")

if _requested == "python":
    from ._kernel_py import cd_path
    BACKEND = "python"
else:
    try:
        from ._cdkernel import cd_path  # type: ignore[no-redef]
        BACKEND = "c"
    except ImportError:
        if _requested == "c":
            raise ImportError(
                "compiled kernel requested via COMBSEARCH_BACKEND=c but the "
                "extension is not built; run: python setup.py build_ext --inplace"
            ) from None
        from ._kernel_py import cd_path  # type: ignore[no-redef]
        BACKEND = "python"

__all__ = ["cd_path", "BACKEND"]
