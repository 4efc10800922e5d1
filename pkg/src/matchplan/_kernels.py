"""Kernel backend selection.

Prefers the compiled extension (``matchplan._core``, built from Cython) and
falls back to the NumPy implementation when the extension is missing.  Set
``MATCHPLAN_PURE_PYTHON=1`` to force the fallback; both modules expose the
same functions with the same contracts (see ``_core_py`` docstrings).
"""

from __future__ import annotations

import os

if os.environ.get("MATCHPLAN_PURE_PYTHON", "") not in ("", "0"):
    from . import _core_py as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as _impl

BACKEND: str = "compiled" if _impl.__name__.endswith("._core") else "python"

poisson_binomial_pmf = _impl.poisson_binomial_pmf
match_expectations = _impl.match_expectations
mc_accumulate = _impl.mc_accumulate
mc_accumulate_raw = _impl.mc_accumulate_raw
oracle_scan = _impl.oracle_scan


def backend_name() -> str:
    """Name of the active kernel backend: ``"compiled"`` or ``"python"``."""
    return BACKEND
