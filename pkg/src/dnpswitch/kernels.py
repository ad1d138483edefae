"""Backend selection for the hot numerical kernels.

The compiled Cython module is used when it has been built; otherwise the
pure-Python module with the same interface is loaded. ``use_backend`` lets
tests and the benchmark switch explicitly.
"""

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_impl = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return sorted(_BACKENDS)


def backend():
    """Name of the active backend."""
    return "cython" if _impl is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Activate backend ``name`` and return the name of the previous one."""
    global _impl
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    previous = backend()
    _impl = _BACKENDS[name]
    return previous


def rate(B, coeffs):
    return _impl.rate(B, *coeffs)


def rate_grid(lo, hi, n, coeffs):
    return _impl.rate_grid(lo, hi, n, *coeffs)


def bisect(a, b, fa, tol, coeffs):
    return _impl.bisect(a, b, fa, tol, *coeffs)


def find_roots(lo, hi, n, tol, coeffs):
    """Sorted roots on ``[lo, hi]`` from an ``n``-cell scan plus bisection, and the cell width."""
    return _impl.find_roots(lo, hi, n, tol, *coeffs)


def rk4(B0, dt, nsteps, bsat, conv_eps, conv_count, record, coeffs):
    return _impl.rk4(B0, dt, nsteps, bsat, conv_eps, conv_count, record, *coeffs)
