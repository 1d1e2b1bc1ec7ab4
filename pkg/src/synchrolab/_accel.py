"""Backend selection for the numeric kernels.

Every hot kernel ships twice: a numba ``@njit`` loop version and a
vectorised numpy version. ``SYNCHROLAB_BACKEND=numpy`` forces the numpy path
(also used automatically when numba is not importable). The variable is read
on every dispatch so tests can flip it with ``monkeypatch.setenv``.
"""
import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False


def njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend():
    name = os.environ.get("SYNCHROLAB_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown SYNCHROLAB_BACKEND {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


def use_numba():
    return backend() == "numba"
