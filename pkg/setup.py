"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time); compilation failures therefore
only cost speed.  Set ANTIZENO_NO_EXTENSION=1 to skip the build.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ANTIZENO_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "antizeno._kernels._native",
                    ["src/antizeno/_kernels/_native.pyx"],
                    # -ffp-contract=off keeps the compiled arithmetic
                    # IEEE-identical to the pure-Python fallback.
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
