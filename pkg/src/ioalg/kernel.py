"""Select the compiled kernel when available, else the pure-Python fallback.

Set ``IOALG_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("IOALG_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ioalg._ckernel import conv_pairs, poly_mulmod  # noqa: F401

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        pass

if BACKEND == "python":
    from ioalg._pykernel import conv_pairs, poly_mulmod  # noqa: F401

__all__ = ["BACKEND", "conv_pairs", "poly_mulmod"]
