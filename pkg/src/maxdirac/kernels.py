"""Backend selection for the hot pointwise kernels.

The compiled extension ``maxdirac._ckernels`` is used when it imports; the
numpy fallback otherwise.  Set ``MAXDIRAC_PURE_PYTHON=1`` to force the
fallback.
"""

import os

import numpy as np

from . import _pykernels

_compiled = None
if os.environ.get("MAXDIRAC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _pykernels


def _c4(a):
    return np.ascontiguousarray(a, dtype=np.complex128)


def _r(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def fw_apply(f, ap, c1, c2, c3, sign):
    return _impl.fw_apply(_c4(f), _r(ap), _r(c1), _r(c2), _r(c3), float(sign))


def cross_bilinears(psi, xi):
    return _impl.cross_bilinears(_c4(psi), _c4(xi))


def apply_potential(psi, scalar, vec=None):
    return _impl.apply_potential(_c4(psi), _r(scalar), None if vec is None else _r(vec))


def pair_sum_direct(f, g, kernel):
    return float(_impl.pair_sum_direct(_r(f), _r(g), _r(kernel)))


def inverse_dft_direct(k_values, momenta_1d, positions_1d):
    return _impl.inverse_dft_direct(_c4(k_values), _r(momenta_1d), _r(positions_1d))


def backends():
    """Mapping of available backend name to module, for cross-checks and benchmarks."""
    out = {"python": _pykernels}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
