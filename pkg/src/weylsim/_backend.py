"""Kernel backend selection.

The hot inner loops (Monte Carlo path stepping, log-gas Metropolis sweeps)
exist twice: a numba ``@njit`` version and a pure-numpy version with identical
semantics.  The env var ``WEYLSIM_BACKEND`` picks one:

    WEYLSIM_BACKEND=numba   force numba (error if unavailable)
    WEYLSIM_BACKEND=numpy   force the pure-numpy fallback

Unset, numba is used when importable, numpy otherwise.
"""

import os

_choice = os.environ.get("WEYLSIM_BACKEND", "").strip().lower()

if _choice not in ("", "numba", "numpy"):
    raise RuntimeError(f"WEYLSIM_BACKEND must be 'numba' or 'numpy', got {_choice!r}")

if _choice == "numpy":
    HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401
        HAVE_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise
        HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _choice != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """numba.njit when active, identity decorator otherwise."""
    if USE_NUMBA:
        from numba import njit as _njit

        return _njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]

    def deco(f):
        return f

    return deco
