"""AES-128 timing/fault anomaly-detection laboratory.

Thin Python layer over the C++ core; see the project README for the CLI and
file formats.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:
    # Development builds put the extension next to the package on PYTHONPATH.
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
