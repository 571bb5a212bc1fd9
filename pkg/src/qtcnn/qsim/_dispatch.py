"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
always available.  Set QTCNN_KERNELS=python or QTCNN_KERNELS=compiled before
import to force a backend (forcing "compiled" raises if the extension is
missing).  `use_backend` swaps backends at runtime for tests and benchmarks.
"""

from __future__ import annotations

import contextlib
import os

from . import _kernels_py


def _import_compiled():
    from . import _kernels_cy

    return _kernels_cy


def _select():
    forced = os.environ.get("QTCNN_KERNELS")
    if forced == "python":
        return _kernels_py, "python"
    if forced == "compiled":
        return _import_compiled(), "compiled"
    if forced is not None:
        raise ValueError(f"QTCNN_KERNELS must be 'python' or 'compiled', got {forced!r}")
    try:
        return _import_compiled(), "compiled"
    except ImportError:
        return _kernels_py, "python"


kernels, backend_name = _select()


def available_backends() -> dict[str, object]:
    out: dict[str, object] = {}
    try:
        out["compiled"] = _import_compiled()
    except ImportError:
        pass
    out["python"] = _kernels_py
    return out


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily route gate calls through the named backend."""
    global kernels, backend_name
    backends = available_backends()
    if name not in backends:
        raise ValueError(f"backend {name!r} not available; have {sorted(backends)}")
    saved = (kernels, backend_name)
    kernels, backend_name = backends[name], name
    try:
        yield
    finally:
        kernels, backend_name = saved
