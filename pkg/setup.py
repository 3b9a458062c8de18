"""Build script for the optional compiled kernels.

The package works without the extension (a pure fallback is selected at
import time), so a missing Cython toolchain downgrades the build instead
of failing it.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "keendelay.kernels._ckernels",
                ["src/keendelay/kernels/_ckernels.pyx"],
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
