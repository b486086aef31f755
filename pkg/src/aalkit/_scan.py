"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``AALKIT_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the parity tests).
"""

import os

if os.environ.get("AALKIT_PURE_PYTHON"):
    from aalkit import _scan_py as _impl
else:
    try:
        from aalkit import _scan_c as _impl  # type: ignore[attr-defined]
    except ImportError:
        from aalkit import _scan_py as _impl

IMPLEMENTATION = _impl.IMPLEMENTATION
parse_field_desc = _impl.parse_field_desc
parse_method_desc = _impl.parse_method_desc
parse_member_sig = _impl.parse_member_sig
