"""Backend selection for the numerical kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise the
pure-Python ``_kernels_py`` twin.  Set ``RATERCHECK_PURE_PYTHON=1`` to force
the fallback.  Both backends produce bit-identical results.
"""

import os

from . import _kernels_py

if os.environ.get("RATERCHECK_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "cython"

# int64 limits of the compiled DP; larger instances use exact Python ints
_MAX_COMPILED_U = 900
_MAX_COMPILED_T = 62

log_gamma = _impl.log_gamma
gammainc_p = _impl.gammainc_p
gammainc_q = _impl.gammainc_q
betainc = _impl.betainc
norm_cdf = _impl.norm_cdf
kolmogorov_sf = _impl.kolmogorov_sf
ks_normal_statistic = _impl.ks_normal_statistic
midranks = _impl.midranks


def u_counts(m, n):
    if m * n > _MAX_COMPILED_U:
        return _kernels_py.u_counts(m, n)
    return _impl.u_counts(m, n)


def signed_rank_counts(n):
    if n > _MAX_COMPILED_T:
        return _kernels_py.signed_rank_counts(n)
    return _impl.signed_rank_counts(n)


def available_backends():
    """Kernel modules importable in this environment, keyed by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out
