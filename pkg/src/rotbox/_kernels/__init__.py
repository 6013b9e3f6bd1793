"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python mirror
is the fallback.  ROTBOX_BACKEND=native|python forces one side (native then
raises if the extension is missing instead of silently degrading).
"""

import os

_requested = os.environ.get("ROTBOX_BACKEND", "").strip().lower()

if _requested == "python":
    from rotbox._kernels import fallback as impl
elif _requested == "native":
    from rotbox._kernels import _native as impl  # type: ignore[no-redef]
elif _requested:
    raise ImportError(
        f"unknown ROTBOX_BACKEND value {_requested!r}; expected 'native' or 'python'"
    )
else:
    try:
        from rotbox._kernels import _native as impl  # type: ignore[no-redef]
    except ImportError:
        from rotbox._kernels import fallback as impl

backend_name: str = impl.BACKEND
