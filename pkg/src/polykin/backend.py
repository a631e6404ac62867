"""Backend selection for the collision inner loop.

The compiled extension is preferred when importable; setting the
environment variable ``POLYKIN_FORCE_PYTHON=1`` forces the pure-Python
loop (useful for debugging and for the backend benchmark). Both backends
consume identical random streams and produce bit-identical trajectories.
"""

from __future__ import annotations

import os

from . import _loop_py

if os.environ.get("POLYKIN_FORCE_PYTHON", "") in {"1", "true", "yes"}:
    collision_pass = _loop_py.collision_pass
    BACKEND = "python"
else:
    try:
        from . import _loop_c

        collision_pass = _loop_c.collision_pass
        BACKEND = "compiled"
    except ImportError:
        collision_pass = _loop_py.collision_pass
        BACKEND = "python"

__all__ = ["collision_pass", "BACKEND"]
