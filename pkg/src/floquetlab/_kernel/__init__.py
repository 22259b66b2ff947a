"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``FLOQUETLAB_PURE=1`` to force the Python fallback (used by the
benchmark and the cross-check tests).  ``FLOQUET_THREADS`` caps the OpenMP
parallelism of the compiled kernel.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("FLOQUETLAB_PURE", "").strip() not in ("", "0"):
    _impl = _pure
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

IMPLEMENTATION = _impl.IMPLEMENTATION
STATUS_OK = _impl.STATUS_OK
STATUS_STEP_UNDERFLOW = _impl.STATUS_STEP_UNDERFLOW

propagate = _impl.propagate
_monodromy_many_impl = _impl.monodromy_many


def num_threads() -> int:
    cap = os.environ.get("FLOQUET_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def monodromy_many(tbl, Es, rtol=1e-10, atol=1e-12, max_step=1e9,
                   want_pruefer=False):
    if _impl is _pure:
        return _pure.monodromy_many(tbl, Es, rtol, atol, max_step,
                                    want_pruefer)
    return _impl.monodromy_many(tbl, Es, rtol, atol, max_step, want_pruefer,
                                num_threads())
