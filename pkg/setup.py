"""Build script for the compiled LU kernel.

The extension is optional: if Cython is unavailable or compilation fails,
the package still installs and falls back to the NumPy kernel at import
time (see rlra.backend).  Set RLRA_SKIP_EXT=1 to skip the build outright.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RLRA_SKIP_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "rlra._lu_cython",
                    ["src/rlra/_lu_cython.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # no fused multiply-add: the compiled kernel must round
                    # exactly like the NumPy fallback, operation for operation
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
