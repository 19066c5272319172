"""numba shim: fall back to plain Python when numba is unavailable.

The simulator works without numba, just much slower; anything that imports
njit from here keeps a single code path either way.
"""

try:
    from numba import njit
except ImportError:  # pragma: no cover

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap
