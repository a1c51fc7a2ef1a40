"""Backend selection for the hot kernels.

The compiled extension is preferred when present; setting the environment
variable ``CROWDSCHED_PURE_PYTHON=1`` forces the numpy fallback.  Both
backends implement the same four entry points with matching semantics.
"""

from __future__ import annotations

import os

FORCE_PURE_ENV = "CROWDSCHED_PURE_PYTHON"


def _load_compiled():
    from . import _speedups  # noqa: PLC0415

    return _speedups


def _load_python():
    from . import _kernels_py  # noqa: PLC0415

    return _kernels_py


if os.environ.get(FORCE_PURE_ENV, "") not in ("", "0"):
    _impl = _load_python()
    BACKEND = "python"
else:
    try:
        _impl = _load_compiled()
        BACKEND = "compiled"
    except ImportError:
        _impl = _load_python()
        BACKEND = "python"

repair_batch = _impl.repair_batch
similarity_repair_batch = _impl.similarity_repair_batch
evaluate_batch = _impl.evaluate_batch
pareto_ranks = _impl.pareto_ranks


def available_backends() -> list[str]:
    names = []
    try:
        _load_compiled()
        names.append("compiled")
    except ImportError:
        pass
    names.append("python")
    return names


def get_backend(name: str):
    """Fetch a backend module by name ('compiled' or 'python')."""
    if name == "compiled":
        return _load_compiled()
    if name == "python":
        return _load_python()
    raise ValueError(f"unknown backend: {name!r}")
