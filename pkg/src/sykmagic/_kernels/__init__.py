"""Backend selection for the bit-level kernels.

The compiled ``_core`` extension is used when it was built; otherwise the
numpy implementation in ``_fallback`` is loaded. Setting the environment
variable ``SYKMAGIC_BACKEND=python`` forces the fallback.

Kernels
-------
string_expectations(vs, psi, support, n)
    Complex expectation of each 2N-bit string in ``vs``.
even_spectrum(psi, n)
    Expectations of all even strings via a per-flip-mask Walsh-Hadamard transform.
metropolis_chain(psi, support, n, v0, site_a, site_b, op_a, op_b, uniforms, filtered)
    Metropolis walk driven by pre-drawn random arrays.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

try:
    from . import _core
except ImportError:  # extension not built
    _core = None


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _core is not None else [])


def get_backend(name: str | None = None) -> ModuleType:
    """Return the kernel module for ``name`` ('cython', 'python' or None for the default)."""
    if name is None:
        name = BACKEND
    if name == "python":
        return _fallback
    if name == "cython":
        if _core is None:
            raise ImportError("compiled kernels are not built")
        return _core
    raise ValueError(f"unknown backend {name!r}")


if os.environ.get("SYKMAGIC_BACKEND", "").lower() == "python" or _core is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

kernels = get_backend(BACKEND)
