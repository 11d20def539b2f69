"""Select the compiled kernel module, falling back to the numpy implementation.

Set ``ASNEWTON_PURE_PYTHON=1`` to force the fallback even when the extension
is built.
"""

import os

BACKEND = "python"
if not os.environ.get("ASNEWTON_PURE_PYTHON"):
    try:
        from asnewton.linalg import _ckernels as kernels

        BACKEND = "cython"
    except ImportError:  # extension not built
        kernels = None
if BACKEND == "python":
    from asnewton.linalg import _pykernels as kernels  # noqa: F811

__all__ = ["BACKEND", "kernels"]
