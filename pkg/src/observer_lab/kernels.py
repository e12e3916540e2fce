"""Hot-loop kernels, compiled when available.

The Cython extension ``_kernels`` is preferred; ``_kernels_py`` is the
fallback. Set ``OBSERVER_LAB_PURE_PYTHON=1`` to force the fallback.
Both expose:

``lti_rk4(M, F0, Fm, F1, x0, h)``
    Classical RK4 for ``x' = M x + F(t)`` over ``len(F0)`` steps, where
    ``F0[k]``, ``Fm[k]``, ``F1[k]`` are the forcing at the start, midpoint
    and end of step ``k``. Returns an ``(steps + 1, n)`` array.

``gradient_flow(m, phi, gamma, h, theta0, nsub)``
    RK4 on ``theta' = -gamma*phi*(phi*theta - m)`` with ``m`` and ``phi``
    linearly interpolated, ``nsub`` equal substeps per sample interval.
"""
import os

from . import _kernels_py

_python = _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

if _compiled is not None and os.environ.get("OBSERVER_LAB_PURE_PYTHON", "") in ("", "0"):
    _impl = _compiled
    BACKEND = "compiled"
else:
    _impl = _python
    BACKEND = "python"

lti_rk4 = _impl.lti_rk4
gradient_flow = _impl.gradient_flow


def get_backend(name):
    """Return the kernel module for ``"compiled"`` or ``"python"``."""
    if name == "python":
        return _python
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def compiled_available():
    return _compiled is not None
