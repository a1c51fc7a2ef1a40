"""Build script for the optional compiled kernels.

The package works without the extension (a pure-numpy fallback is selected at
import time), so a failed compile degrades gracefully instead of blocking the
install.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/crowdsched/_speedups.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    include_dirs = [numpy.get_include()]
except ImportError as exc:  # pragma: no cover - build environment dependent
    print(f"crowdsched: skipping compiled kernels ({exc})", file=sys.stderr)
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
