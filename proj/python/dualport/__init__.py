"""Concave envelopes, dynamic multipliers and optimal portfolios for
piecewise (possibly non-concave) utilities in a Black-Scholes market.

The heavy lifting lives in the compiled extension ``dualport._core``.
"""

try:
    from ._core import *  # noqa: F401,F403  (installed wheel layout)
    from ._core import oracle  # noqa: F401
except ImportError:  # development layout: extension sits in the build tree
    import os
    import sys

    _ext_dir = os.environ.get("DUALPORT_EXT_DIR")
    if not _ext_dir:
        raise
    sys.path.insert(0, _ext_dir)
    from _core import *  # noqa: F401,F403
    from _core import oracle  # noqa: F401

__version__ = "0.1.0"
