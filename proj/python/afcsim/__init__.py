"""Atomic frequency comb memory simulator (C++ core)."""

try:
    from ._afcsim import *  # noqa: F401,F403  installed wheel
except ImportError:
    # Source tree: the extension sits in the CMake build directory on sys.path.
    from _afcsim import *  # noqa: F401,F403

__version__ = "0.1.0"
