"""Kernel backend selection.

The compiled extension is used when importable; otherwise the numpy
fallback.  Override with RRHSIM_BACKEND=ext|python (``ext`` raises if the
extension is missing instead of silently degrading).
"""

from __future__ import annotations

import os

_requested = os.environ.get("RRHSIM_BACKEND", "auto").strip().lower()

if _requested in ("auto", ""):
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "ext"
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        BACKEND = "python"
elif _requested in ("ext", "extension", "compiled"):
    from . import _kernels as kernels  # type: ignore[attr-defined,no-redef]

    BACKEND = "ext"
elif _requested in ("python", "py", "numpy"):
    from . import _kernels_py as kernels  # type: ignore[no-redef]

    BACKEND = "python"
else:
    raise RuntimeError(
        f"RRHSIM_BACKEND={_requested!r} not understood (use 'ext' or 'python')"
    )


def get_kernels(name: str | None = None):
    """Fetch a kernel module by name ('ext' or 'python'); default: active."""
    if name is None or name == BACKEND:
        return kernels
    if name == "ext":
        from . import _kernels  # type: ignore[attr-defined]

        return _kernels
    if name == "python":
        from . import _kernels_py

        return _kernels_py
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    out = []
    try:
        from . import _kernels  # noqa: F401

        out.append("ext")
    except ImportError:
        pass
    out.append("python")
    return out
